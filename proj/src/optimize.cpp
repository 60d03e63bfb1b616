#include "htnc/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace htnc {

Minimum golden_section(const std::function<double(double)>& f, double lo, double hi,
                       double tol) {
    if (!(lo < hi)) throw std::invalid_argument("golden_section: empty bracket");
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 400 && (b - a) > tol * std::max(1.0, std::abs(c)); ++it) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc <= fd ? Minimum{c, fc} : Minimum{d, fd};
}

Minimum minimize_split(const std::function<double(double)>& first,
                       const std::function<double(double)>& second, double total) {
    if (!(total > 0.0)) throw std::invalid_argument("minimize_split: total must be positive");
    // sigma1 = total * logistic(v); the tails at both ends are resolved on a log scale.
    auto share = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
    auto objective = [&](double v) {
        const double p = share(v);
        const double s1 = total * p;
        const double s2 = total * (1.0 - p);
        if (!(s1 > 0.0) || !(s2 > 0.0)) return HUGE_VAL;
        return first(s1) + second(s2);
    };
    constexpr int kScan = 161;
    constexpr double kSpan = 36.0;
    std::vector<double> vs(kScan), fs(kScan);
    std::size_t best = 0;
    for (int i = 0; i < kScan; ++i) {
        vs[i] = -kSpan + 2.0 * kSpan * i / (kScan - 1);
        fs[i] = objective(vs[i]);
        if (fs[i] < fs[best]) best = static_cast<std::size_t>(i);
    }
    const double lo = vs[best == 0 ? 0 : best - 1];
    const double hi = vs[std::min<std::size_t>(best + 1, kScan - 1)];
    Minimum m = golden_section(objective, lo, hi, 1e-12);
    if (fs[best] < m.value) m = {vs[best], fs[best]};
    return {total * share(m.x), m.value};
}

}  // namespace htnc
