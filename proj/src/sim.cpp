#include "htnc/sim.hpp"

#include "htnc/errors.hpp"
#include "htnc/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace htnc::sim {

namespace {

struct Packet {
    double t;
    int origin;  // 0 for the through flow, node index + 1 for cross traffic
    std::size_t seq;
    double bits;
};

std::vector<double> pareto_bits(const ParetoSource& s, std::size_t n, std::mt19937_64& rng) {
    std::vector<double> out(n);
    for (auto& x : out) x = s.b_bits() * std::pow(uniform_open(rng), -1.0 / s.alpha);
    return out;
}

void check_source(const ParetoSource& s, const char* what) {
    if (!(s.lambda_pps > 0.0) || !(s.b_bytes > 0.0) || !(s.alpha > 1.0)) {
        throw std::invalid_argument(std::string(what) + ": need lambda > 0, b > 0, alpha > 1");
    }
}

}  // namespace

std::size_t default_warmup(std::size_t n_packets) { return std::max<std::size_t>(10000, n_packets / 100); }

double Ccdf::exceedance(double w) const {
    // rows are sorted by w; P(X > w) equals p of the last row with row.w <= w
    auto it = std::upper_bound(rows.begin(), rows.end(), w,
                               [](double v, const CcdfRow& r) { return v < r.w; });
    if (it == rows.begin()) return 1.0;
    return std::prev(it)->p;
}

double Ccdf::quantile(double eps) const {
    for (const auto& r : rows) {
        if (r.p <= eps) return r.w;
    }
    return rows.empty() ? 0.0 : rows.back().w;
}

Ccdf ccdf(std::vector<double> samples) {
    if (samples.empty()) throw std::invalid_argument("ccdf: no samples");
    std::sort(samples.begin(), samples.end());
    Ccdf out;
    out.n = samples.size();
    const double n = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < samples.size();) {
        std::size_t j = i;
        while (j < samples.size() && samples[j] == samples[i]) ++j;
        const std::size_t above = samples.size() - j;
        out.rows.push_back({samples[i], static_cast<double>(above) / n, above, above >= kReliableCount});
        i = j;
    }
    return out;
}

std::vector<double> fifo_departures(const std::vector<double>& arrivals,
                                    const std::vector<double>& service) {
    if (arrivals.size() != service.size()) throw std::invalid_argument("fifo: length mismatch");
    std::vector<double> d(arrivals.size());
    double last = -HUGE_VAL;
    for (std::size_t k = 0; k < arrivals.size(); ++k) {
        last = std::max(arrivals[k], last) + service[k];
        d[k] = last;
    }
    return d;
}

TandemResult run_tandem(const TandemConfig& cfg, std::size_t n_packets) {
    if (cfg.N < 1) throw std::invalid_argument("tandem: N must be at least 1");
    if (!(cfg.C > 0.0)) throw std::invalid_argument("tandem: C must be positive");
    if (n_packets < cfg.warmup_packets || n_packets == 0) {
        throw std::invalid_argument("tandem: packet count must be positive and at least the warmup");
    }
    if (!cfg.cross.empty() && cfg.cross.size() != static_cast<std::size_t>(cfg.N)) {
        throw std::invalid_argument("tandem: cross sources must be empty or one per node");
    }

    std::mt19937_64 rng(cfg.seed);
    std::vector<double> arr(n_packets), bits;
    double through_rate = 0.0;
    double span = 0.0;
    if (cfg.replay) {
        const auto& r = *cfg.replay;
        if (r.times_s.size() < n_packets || r.sizes_bits.size() < n_packets) {
            throw std::invalid_argument("tandem: replay trace shorter than the requested packet count");
        }
        std::copy_n(r.times_s.begin(), n_packets, arr.begin());
        bits.assign(r.sizes_bits.begin(), r.sizes_bits.begin() + static_cast<std::ptrdiff_t>(n_packets));
        span = arr.back() - arr.front();
        // A single replayed packet carries no rate information.
        through_rate = span > 0.0 ? std::accumulate(bits.begin(), bits.end(), 0.0) / span : 0.0;
    } else {
        check_source(cfg.source, "tandem source");
        for (std::size_t i = 0; i < n_packets; ++i) arr[i] = static_cast<double>(i) / cfg.source.lambda_pps;
        bits = pareto_bits(cfg.source, n_packets, rng);
        through_rate = cfg.source.rate_bps();
        span = static_cast<double>(n_packets) / cfg.source.lambda_pps;
    }

    for (int i = 0; i < cfg.N; ++i) {
        double load = through_rate;
        if (!cfg.cross.empty() && cfg.cross[static_cast<std::size_t>(i)]) load += cfg.cross[static_cast<std::size_t>(i)]->rate_bps();
        const double rho = load / cfg.C;
        if (!(rho < 1.0)) {
            std::ostringstream os;
            os << "tandem: node " << i << " has utilization " << rho << " >= 1";
            throw InstabilityError(os.str(), i);
        }
    }

    TandemResult res;
    res.packets = n_packets;
    std::vector<double> cur = arr;  // through arrival times at the current node
    std::vector<Packet> merged;
    std::vector<double> a, s;
    for (int node = 0; node < cfg.N; ++node) {
        merged.clear();
        for (std::size_t k = 0; k < n_packets; ++k) merged.push_back({cur[k], 0, k, bits[k]});
        std::optional<ParetoSource> cs;
        if (!cfg.cross.empty()) cs = cfg.cross[static_cast<std::size_t>(node)];
        if (cs) {
            check_source(*cs, "tandem cross source");
            // Independent stream per node; evenly spaced with a random phase.
            std::mt19937_64 crng(cfg.seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(node + 1)));
            const double phase = uniform_open(crng) / cs->lambda_pps;
            const auto m = static_cast<std::size_t>(std::ceil(span * cs->lambda_pps));
            const auto cb = pareto_bits(*cs, m, crng);
            for (std::size_t k = 0; k < m; ++k) {
                merged.push_back({phase + static_cast<double>(k) / cs->lambda_pps, node + 1, k, cb[k]});
            }
        }
        // Ties: earlier time, then lower originating node, then sequence.
        std::sort(merged.begin(), merged.end(), [](const Packet& x, const Packet& y) {
            return std::tie(x.t, x.origin, x.seq) < std::tie(y.t, y.origin, y.seq);
        });
        a.resize(merged.size());
        s.resize(merged.size());
        NodeStats st;
        for (std::size_t k = 0; k < merged.size(); ++k) {
            a[k] = merged[k].t;
            s[k] = merged[k].bits / cfg.C;
            st.arrived_bits += merged[k].bits;
        }
        const std::vector<double> d = fifo_departures(a, s);
        // Backlog after each departure: bits that arrived by then minus bits served.
        std::vector<double> cum(merged.size() + 1, 0.0);
        for (std::size_t k = 0; k < merged.size(); ++k) cum[k + 1] = cum[k] + merged[k].bits;
        std::vector<double> backlog(merged.size());
        std::size_t j = 0;
        for (std::size_t k = 0; k < merged.size(); ++k) {
            while (j < a.size() && a[j] <= d[k]) ++j;
            backlog[k] = std::max(0.0, cum[j] - cum[k + 1]);
        }
        st.departed_bits = cum.back();
        const double busy = std::accumulate(s.begin(), s.end(), 0.0);
        const double horizon = d.empty() ? 0.0 : d.back() - a.front();
        st.utilization = horizon > 0.0 ? busy / horizon : 0.0;
        st.backlog = ccdf(std::move(backlog));
        res.nodes.push_back(std::move(st));
        for (std::size_t k = 0; k < merged.size(); ++k) {
            if (merged[k].origin == 0) cur[merged[k].seq] = d[k];
        }
    }

    std::vector<double> delays;
    delays.reserve(n_packets - cfg.warmup_packets);
    for (std::size_t k = cfg.warmup_packets; k < n_packets; ++k) delays.push_back(cur[k] - arr[k]);
    if (delays.empty()) throw std::invalid_argument("tandem: no packets left after warmup");
    res.delay.ccdf = ccdf(delays);
    res.delay.samples = std::move(delays);
    res.delay.max_reliable_eps = static_cast<double>(kReliableCount) / static_cast<double>(res.delay.samples.size());
    return res;
}

void write_ccdf_csv(std::ostream& os, const Ccdf& c, std::size_t max_rows) {
    os << "w_s,prob,count,reliable_flag\n";
    const auto old = os.precision(12);
    auto emit = [&](const CcdfRow& r) {
        os << r.w << ',' << r.p << ',' << r.count << ',' << (r.reliable ? 1 : 0) << '\n';
    };
    if (max_rows == 0 || c.rows.size() <= max_rows) {
        for (const auto& r : c.rows) emit(r);
    } else {
        // Keep the first row at or below each target probability.
        const double pmin = 1.0 / static_cast<double>(c.n);
        double next = 1.0;
        const double ratio = std::pow(pmin, 1.0 / static_cast<double>(max_rows - 1));
        for (const auto& r : c.rows) {
            if (r.p <= next) {
                emit(r);
                // the last row has p = 0; multiplying never gets below it
                if (r.p <= 0.0) break;
                while (next >= r.p) next *= ratio;
            }
        }
    }
    os.precision(old);
}

}  // namespace htnc::sim
