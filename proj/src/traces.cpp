#include "htnc/traces.hpp"

#include "htnc/errors.hpp"
#include "htnc/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

namespace htnc {

namespace {

std::vector<double> relative_seconds(const std::vector<std::int64_t>& t_ns) {
    std::vector<double> rel(t_ns.size());
    for (std::size_t i = 0; i < t_ns.size(); ++i) rel[i] = static_cast<double>(t_ns[i] - t_ns[0]) * 1e-9;
    return rel;
}

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

}  // namespace

PacketTrace::PacketTrace(std::vector<std::int64_t> timestamps_ns, std::vector<double> sizes_bytes,
                         std::optional<double> duration_s)
    : t_ns_(std::move(timestamps_ns)), bytes_(std::move(sizes_bytes)) {
    if (t_ns_.size() != bytes_.size()) throw std::invalid_argument("trace: column length mismatch");
    for (std::size_t i = 0; i < t_ns_.size(); ++i) {
        if (!(bytes_[i] > 0.0)) {
            throw std::invalid_argument("trace: nonpositive size at packet " + std::to_string(i));
        }
        if (i > 0 && t_ns_[i] < t_ns_[i - 1]) {
            throw std::invalid_argument("trace: timestamps decrease at packet " + std::to_string(i));
        }
    }
    cum_bits_.assign(bytes_.size() + 1, 0.0);
    for (std::size_t i = 0; i < bytes_.size(); ++i) cum_bits_[i + 1] = cum_bits_[i] + 8.0 * bytes_[i];
    if (duration_s) {
        if (*duration_s < 0.0) throw std::invalid_argument("trace: negative duration");
        duration_ = *duration_s;
    } else if (t_ns_.size() >= 2) {
        const double n = static_cast<double>(t_ns_.size());
        duration_ = static_cast<double>(t_ns_.back() - t_ns_.front()) * 1e-9 * n / (n - 1.0);
    }
}

double PacketTrace::start_s() const { return t_ns_.empty() ? 0.0 : static_cast<double>(t_ns_.front()) * 1e-9; }

double PacketTrace::total_bytes() const { return cum_bits_.empty() ? 0.0 : cum_bits_.back() / 8.0; }

double PacketTrace::average_rate_bps() const {
    return duration_ > 0.0 ? 8.0 * total_bytes() / duration_ : 0.0;
}

double PacketTrace::max_packet_bytes() const {
    return bytes_.empty() ? 0.0 : *std::max_element(bytes_.begin(), bytes_.end());
}

double PacketTrace::bits_in(double start, double len) const {
    if (t_ns_.empty()) return 0.0;
    const auto t0 = t_ns_.front();
    auto idx = [&](double rel) {
        // window edges like k * stride carry rounding error; snap to the
        // nanosecond grid before taking the ceiling
        const double x = rel * 1e9;
        const double nearest = std::round(x);
        const double ns = std::abs(x - nearest) < 1e-3 ? nearest : std::ceil(x);
        const auto key = t0 + static_cast<std::int64_t>(ns);
        return static_cast<std::size_t>(std::lower_bound(t_ns_.begin(), t_ns_.end(), key) - t_ns_.begin());
    };
    return cum_bits_[idx(start + len)] - cum_bits_[idx(start)];
}

void PacketTrace::write_csv(std::ostream& os) const {
    os << "timestamp_ns,size_bytes\n";
    for (std::size_t i = 0; i < t_ns_.size(); ++i) {
        os << t_ns_[i] << ',' << static_cast<long long>(std::ceil(bytes_[i])) << '\n';
    }
}

PacketTrace ingest_csv(std::istream& is, std::optional<double> duration_s) {
    std::vector<std::int64_t> ts;
    std::vector<double> sizes;
    std::string line;
    std::size_t row = 0;
    while (std::getline(is, line)) {
        ++row;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw IoError("trace row " + std::to_string(row) + ": expected two columns");
        const std::string a = trim(line.substr(0, comma));
        const std::string b = trim(line.substr(comma + 1));
        std::int64_t t = 0;
        long long s = 0;
        const auto ra = std::from_chars(a.data(), a.data() + a.size(), t);
        const auto rb = std::from_chars(b.data(), b.data() + b.size(), s);
        if (ra.ec != std::errc() || rb.ec != std::errc() || ra.ptr != a.data() + a.size() ||
            rb.ptr != b.data() + b.size()) {
            if (ts.empty() && row == 1) continue;  // header
            throw IoError("trace row " + std::to_string(row) + ": not two integers");
        }
        if (s <= 0) {
            throw std::invalid_argument("trace row " + std::to_string(row) + ": nonpositive size");
        }
        if (!ts.empty() && t < ts.back()) {
            throw std::invalid_argument("trace row " + std::to_string(row) + ": timestamps not sorted");
        }
        ts.push_back(t);
        sizes.push_back(static_cast<double>(s));
    }
    return PacketTrace(std::move(ts), std::move(sizes), duration_s);
}

PacketTrace ingest(const std::filesystem::path& path, std::optional<double> duration_s) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot read " + path.string());
    return ingest_csv(is, duration_s);
}

std::vector<EnvelopePoint> deterministic_envelope(const PacketTrace& trace, double horizon,
                                                  double step) {
    if (!(step > 0.0)) throw std::invalid_argument("deterministic envelope: step must be positive");
    if (!(horizon > 0.0)) throw std::invalid_argument("deterministic envelope: horizon must be positive");
    if (horizon > trace.duration_s() * (1.0 + 1e-12)) {
        throw std::invalid_argument("deterministic envelope: horizon exceeds trace duration");
    }
    const auto rel = relative_seconds(trace.timestamps_ns());
    const auto& bytes = trace.sizes_bytes();
    std::vector<double> cum(bytes.size() + 1, 0.0);
    for (std::size_t i = 0; i < bytes.size(); ++i) cum[i + 1] = cum[i] + 8.0 * bytes[i];
    const auto n_grid = static_cast<std::size_t>(std::floor(horizon / step + 1e-9));
    std::vector<EnvelopePoint> out;
    out.reserve(n_grid);
    for (std::size_t g = 1; g <= n_grid; ++g) {
        const double t = step * static_cast<double>(g);
        double best = 0.0;
        std::size_t j = 0;
        for (std::size_t i = 0; i < rel.size(); ++i) {
            // packets with rel in [rel_i, rel_i + t)
            j = std::max(j, i);
            while (j < rel.size() && rel[j] < rel[i] + t) ++j;
            best = std::max(best, cum[j] - cum[i]);
        }
        out.push_back({t, best});
    }
    return out;
}

WindowCcdf y_statistic(const PacketTrace& trace, double r, double H, double window, double stride) {
    if (!(window > 0.0) || !(stride > 0.0)) throw std::invalid_argument("y statistic: window and stride must be positive");
    if (!(H > 0.0 && H < 1.0)) throw std::invalid_argument("y statistic: H must lie in (0,1)");
    if (window > trace.duration_s()) throw std::invalid_argument("y statistic: window longer than trace");
    const double scale = std::pow(window, H);
    std::vector<double> ys;
    for (std::size_t k = 0;; ++k) {
        const double s = stride * static_cast<double>(k);
        if (s + window > trace.duration_s() * (1.0 + 1e-12)) break;
        ys.push_back((trace.bits_in(s, window) - r * window) / scale);
    }
    if (ys.empty()) throw std::invalid_argument("y statistic: no complete window");
    std::sort(ys.begin(), ys.end());
    WindowCcdf out;
    out.window = window;
    out.sample_count = ys.size();
    const double n = static_cast<double>(ys.size());
    for (std::size_t j = 0; j < ys.size(); ++j) {
        if (j > 0 && ys[j] == ys[j - 1]) continue;
        out.points.push_back({ys[j], static_cast<double>(ys.size() - j) / n});
    }
    return out;
}

double EnvelopeFit::sigma_at(double eps) const { return std::pow(K / eps, 1.0 / alpha); }

double EnvelopeFit::G(double t, double eps) const { return r * t + sigma_at(eps) * std::pow(t, H); }

EnvelopeFit fit_from_ccdfs(std::vector<WindowCcdf> curves, double r, double alpha, double H,
                           FitOptions opts) {
    if (!(alpha > 0.0)) throw std::invalid_argument("fit: alpha must be positive");
    EnvelopeFit fit;
    fit.alpha = alpha;
    fit.H = H;
    fit.r = r;
    for (const auto& c : curves) {
        fit.windows.push_back(c.window);
        const double floor_p =
            (opts.include_deep_tail || c.sample_count == 0) ? 0.0 : 10.0 / static_cast<double>(c.sample_count);
        for (const auto& p : c.points) {
            if (!(p.sigma > 0.0) || p.prob < floor_p || !(p.prob > 0.0)) continue;
            ++fit.points_used;
            fit.K = std::max(fit.K, p.prob * std::pow(p.sigma, alpha));
        }
    }
    if (fit.K == 0.0) fit.warning = "no positive Y values: the trace never exceeds rate r";
    fit.curves = std::move(curves);
    return fit;
}

EnvelopeFit fit_htss_K(const PacketTrace& trace, double r, double alpha, double H,
                       const std::vector<double>& windows, double stride, FitOptions opts) {
    std::vector<WindowCcdf> curves;
    for (double w : windows) curves.push_back(y_statistic(trace, r, H, w, stride > 0.0 ? stride : w / 10.0));
    return fit_from_ccdfs(std::move(curves), r, alpha, H, opts);
}

std::vector<WindowCcdf> read_ccdf_csv(std::istream& is) {
    std::map<double, WindowCcdf> by_window;
    std::string line;
    std::size_t row = 0;
    while (std::getline(is, line)) {
        ++row;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("sigma", 0) == 0) continue;
        std::istringstream ls(line);
        std::string a, b, c;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c, ',')) {
            throw IoError("ccdf row " + std::to_string(row) + ": expected sigma,prob,window_ms");
        }
        try {
            const double w = std::stod(c) / 1000.0;
            auto& curve = by_window[w];
            curve.window = w;
            curve.points.push_back({std::stod(a), std::stod(b)});
        } catch (const std::exception&) {
            throw IoError("ccdf row " + std::to_string(row) + ": not numeric");
        }
    }
    std::vector<WindowCcdf> out;
    for (auto& [w, c] : by_window) out.push_back(std::move(c));
    return out;
}

void write_ccdf_csv(std::ostream& os, const std::vector<WindowCcdf>& curves) {
    os << "sigma,prob,window_ms\n";
    const auto old = os.precision(10);
    for (const auto& c : curves) {
        for (const auto& p : c.points) os << p.sigma << ',' << p.prob << ',' << c.window * 1000.0 << '\n';
    }
    os.precision(old);
}

PacketTrace generate_pareto_trace(double lambda_pps, double b_bytes, double alpha,
                                  std::size_t n_packets, std::uint64_t seed) {
    if (!(lambda_pps > 0.0) || !(b_bytes > 0.0) || !(alpha > 0.0)) {
        throw std::invalid_argument("pareto trace: parameters must be positive");
    }
    std::mt19937_64 rng(seed);
    std::vector<std::int64_t> ts(n_packets);
    std::vector<double> sizes(n_packets);
    for (std::size_t i = 0; i < n_packets; ++i) {
        ts[i] = std::llround(static_cast<double>(i) * 1e9 / lambda_pps);
        sizes[i] = b_bytes * std::pow(uniform_open(rng), -1.0 / alpha);
    }
    return PacketTrace(std::move(ts), std::move(sizes), static_cast<double>(n_packets) / lambda_pps);
}

}  // namespace htnc
