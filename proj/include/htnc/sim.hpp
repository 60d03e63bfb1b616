#pragma once

// Tandem of FIFO constant-rate links. The through flow crosses every node;
// cross traffic at a node leaves the path after that node. A packet keeps
// its size at every node.

#include "htnc/envelopes.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

namespace htnc::sim {

struct TraceSource {
    std::vector<double> times_s;
    std::vector<double> sizes_bits;
};

struct TandemConfig {
    int N = 1;
    double C = 0.0;
    ParetoSource source;
    // Replaces the Pareto source when set.
    std::optional<TraceSource> replay;
    // Empty, or one entry per node.
    std::vector<std::optional<ParetoSource>> cross;
    std::size_t warmup_packets = 0;
    std::uint64_t seed = 1;
};

// 1% of the run, at least 10^4 packets.
std::size_t default_warmup(std::size_t n_packets);

struct CcdfRow {
    double w = 0.0;
    double p = 0.0;
    // Samples strictly above w.
    std::size_t count = 0;
    bool reliable = false;
};

struct Ccdf {
    std::size_t n = 0;
    std::vector<CcdfRow> rows;

    // Empirical P(X > w).
    double exceedance(double w) const;
    // Smallest sample value v with P(X > v) <= eps.
    double quantile(double eps) const;
};

inline constexpr std::size_t kReliableCount = 100;

// Exact empirical CCDF, one row per distinct value; rows with fewer than
// 100 exceedances are flagged unreliable.
Ccdf ccdf(std::vector<double> samples);

struct DelayCcdfEstimate {
    std::vector<double> samples;
    Ccdf ccdf;
    // Exceedance probability below which fewer than 100 samples support the
    // estimate.
    double max_reliable_eps = 1.0;
};

struct NodeStats {
    // Bits queued or in service just after each departure.
    Ccdf backlog;
    double utilization = 0.0;
    double arrived_bits = 0.0;
    double departed_bits = 0.0;
};

struct TandemResult {
    DelayCcdfEstimate delay;
    std::vector<NodeStats> nodes;
    std::size_t packets = 0;
};

// Refuses (InstabilityError) if any node is loaded at or above capacity.
TandemResult run_tandem(const TandemConfig& cfg, std::size_t n_packets);

// Per-packet departure times of a single FIFO link, given arrival times in
// service order and transmission times.
std::vector<double> fifo_departures(const std::vector<double>& arrivals,
                                    const std::vector<double>& service);

// CSV w_s,prob,count,reliable_flag with at most max_rows rows chosen evenly
// in log probability (0 keeps every row).
void write_ccdf_csv(std::ostream& os, const Ccdf& c, std::size_t max_rows = 0);

}  // namespace htnc::sim
