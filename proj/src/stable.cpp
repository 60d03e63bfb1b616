#include "htnc/stable.hpp"

#include "htnc/errors.hpp"
#include "htnc/random.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

namespace htnc::stable {

namespace {

void require_alpha(double alpha) {
    if (!(alpha > 1.0 && alpha < 2.0)) {
        throw std::domain_error("stable: alpha must lie in (1, 2)");
    }
}

// Order statistic for P(S > z) = eps on a sorted sample.
double upper_quantile(const std::vector<double>& sorted, double eps) {
    const auto n = static_cast<double>(sorted.size());
    auto idx = static_cast<std::ptrdiff_t>(std::ceil(n * (1.0 - eps))) - 1;
    idx = std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(sorted.size()) - 1);
    return sorted[static_cast<std::size_t>(idx)];
}

}  // namespace

double c_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw std::domain_error("c_alpha: alpha must lie in (0, 2)");
    const double base = 2.0 * std::tgamma(alpha) * std::sin(std::numbers::pi * alpha / 2.0) /
                        std::numbers::pi;
    return std::pow(base, -1.0 / alpha);
}

double transform(double alpha, double v, double w) {
    const double t = std::tan(std::numbers::pi * alpha / 2.0);
    const double b = std::atan(t) / alpha;
    const double s = std::pow(1.0 + t * t, 1.0 / (2.0 * alpha));
    const double a = alpha * (v + b);
    return s * std::sin(a) / std::pow(std::cos(v), 1.0 / alpha) *
           std::pow(std::cos(v - a) / w, (1.0 - alpha) / alpha);
}

double draw(double alpha, std::mt19937_64& rng) {
    const double v = std::numbers::pi * (uniform_open(rng) - 0.5);
    const double w = -std::log(uniform_open(rng));
    return transform(alpha, v, w);
}

std::vector<double> sample(const StableSpec& spec, std::uint64_t seed, std::size_t n) {
    require_alpha(spec.alpha);
    std::mt19937_64 rng(seed);
    std::vector<double> out(n);
    for (auto& x : out) x = draw(spec.alpha, rng);
    return out;
}

QuantileTable::QuantileTable(double alpha, std::vector<QuantileEntry> entries,
                             std::size_t sample_count, std::uint64_t seed)
    : alpha_(alpha), entries_(std::move(entries)), sample_count_(sample_count), seed_(seed) {
    std::sort(entries_.begin(), entries_.end(),
              [](const QuantileEntry& a, const QuantileEntry& b) { return a.epsilon > b.epsilon; });
    for (std::size_t i = 1; i < entries_.size(); ++i) {
        if (entries_[i].epsilon == entries_[i - 1].epsilon) {
            throw std::invalid_argument("quantile table: duplicate epsilon");
        }
        if (entries_[i].z < entries_[i - 1].z) {
            throw std::invalid_argument("quantile table: z must be nonincreasing in epsilon");
        }
    }
}

void QuantileTable::save_csv(const std::filesystem::path& path) const {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path.string());
    os.precision(17);
    os << "# alpha=" << alpha_ << " sampleCount=" << sample_count_ << " seed=" << seed_ << '\n';
    os << "epsilon,z\n";
    for (const auto& e : entries_) os << e.epsilon << ',' << e.z << '\n';
    if (!os) throw IoError("write failed: " + path.string());
}

QuantileTable QuantileTable::load_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot read " + path.string());
    std::string line;
    double alpha = 0.0;
    std::size_t count = 0;
    std::uint64_t seed = 0;
    if (!std::getline(is, line) || line.rfind("#", 0) != 0) {
        throw IoError("quantile cache: missing header in " + path.string());
    }
    {
        std::istringstream hs(line.substr(1));
        std::string tok;
        while (hs >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos) continue;
            const auto key = tok.substr(0, eq);
            const auto val = tok.substr(eq + 1);
            if (key == "alpha") alpha = std::stod(val);
            else if (key == "sampleCount") count = std::stoull(val);
            else if (key == "seed") seed = std::stoull(val);
        }
    }
    std::getline(is, line);  // column names
    std::vector<QuantileEntry> entries;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw IoError("quantile cache: malformed row: " + line);
        entries.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
    }
    return QuantileTable(alpha, std::move(entries), count, seed);
}

QuantileTable quantile_table(const StableSpec& spec, const std::vector<double>& epsilons,
                             std::size_t sample_count, std::uint64_t seed) {
    require_alpha(spec.alpha);
    for (double eps : epsilons) {
        if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("quantile: epsilon outside (0,1)");
        if (static_cast<double>(sample_count) < 10.0 / eps) {
            throw PreconditionError("quantile: sampleCount below 10/epsilon");
        }
    }
    auto xs = sample(spec, seed, sample_count);
    std::sort(xs.begin(), xs.end());
    std::vector<QuantileEntry> entries;
    entries.reserve(epsilons.size());
    for (double eps : epsilons) entries.push_back({eps, upper_quantile(xs, eps)});
    return QuantileTable(spec.alpha, std::move(entries), sample_count, seed);
}

double quantile(const StableSpec& spec, double epsilon, std::size_t sample_count,
                std::uint64_t seed) {
    return quantile_table(spec, {epsilon}, sample_count, seed).entries().front().z;
}

std::vector<double> default_epsilons() {
    return {0.5, 0.3, 0.2, 0.1, 5e-2, 3e-2, 2e-2, 1e-2, 5e-3, 3e-3, 2e-3, 1e-3, 5e-4, 2e-4, 1e-4};
}

}  // namespace htnc::stable
