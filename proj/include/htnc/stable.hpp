#pragma once

// Totally skewed standardized alpha-stable variates (skewness 1, scale 1,
// location 0) with 1 < alpha < 2.

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

namespace htnc::stable {

struct StableSpec {
    double alpha = 1.5;
};

// (2 Gamma(alpha) sin(pi alpha / 2) / pi)^(-1/alpha); the tail satisfies
// P(S > z) ~ (c_alpha z)^-alpha.
double c_alpha(double alpha);

// One variate from uniform draws v in (-pi/2, pi/2) and w ~ Exp(1)
// (Chambers-Mallows-Stuck).
double transform(double alpha, double v, double w);

// Draws one variate from rng.
double draw(double alpha, std::mt19937_64& rng);

std::vector<double> sample(const StableSpec& spec, std::uint64_t seed, std::size_t n);

struct QuantileEntry {
    double epsilon;
    double z;
};

class QuantileTable {
public:
    QuantileTable(double alpha, std::vector<QuantileEntry> entries, std::size_t sample_count,
                  std::uint64_t seed);

    double alpha() const { return alpha_; }
    std::size_t sample_count() const { return sample_count_; }
    std::uint64_t seed() const { return seed_; }
    // Sorted by decreasing epsilon (increasing z).
    const std::vector<QuantileEntry>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

    void save_csv(const std::filesystem::path& path) const;
    static QuantileTable load_csv(const std::filesystem::path& path);

private:
    double alpha_;
    std::vector<QuantileEntry> entries_;
    std::size_t sample_count_;
    std::uint64_t seed_;
};

// Monte Carlo estimate of z with P(S > z) = epsilon. Needs
// sample_count >= 10 / epsilon.
double quantile(const StableSpec& spec, double epsilon, std::size_t sample_count,
                std::uint64_t seed);

// All quantiles from one shared sample.
QuantileTable quantile_table(const StableSpec& spec, const std::vector<double>& epsilons,
                             std::size_t sample_count, std::uint64_t seed);

// Default epsilon grid used for quantile-based envelopes: 0.5 down to 1e-4.
std::vector<double> default_epsilons();

}  // namespace htnc::stable
