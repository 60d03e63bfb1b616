#pragma once

#include <functional>

namespace htnc {

struct Minimum {
    double x = 0.0;
    double value = 0.0;
};

// Golden-section search on [lo, hi]; stops when the bracket is narrower
// than tol * max(1, |x|).
Minimum golden_section(const std::function<double(double)>& f, double lo, double hi,
                       double tol = 1e-10);

// min over sigma1 + sigma2 = total of first(sigma1) + second(sigma2).
// Scans a logistic parametrization of the split and refines the best scan
// cell by golden section, so a non-unimodal sum falls back to the scan
// minimum instead of a spurious local one. Returns the sigma1 achieving it.
Minimum minimize_split(const std::function<double(double)>& first,
                       const std::function<double(double)>& second, double total);

}  // namespace htnc
