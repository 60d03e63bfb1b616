#pragma once

#include "htnc/envelopes.hpp"

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace htnc {

// Packet arrivals; A(t) counts the bits of packets with timestamp < t.
class PacketTrace {
public:
    PacketTrace() = default;
    // Timestamps must be nondecreasing and sizes positive. Without an
    // explicit duration, a trace of n packets spans n/(n-1) times the
    // distance between first and last timestamp (one mean gap past the end).
    PacketTrace(std::vector<std::int64_t> timestamps_ns, std::vector<double> sizes_bytes,
                std::optional<double> duration_s = std::nullopt);

    std::size_t size() const { return t_ns_.size(); }
    bool empty() const { return t_ns_.empty(); }
    const std::vector<std::int64_t>& timestamps_ns() const { return t_ns_; }
    const std::vector<double>& sizes_bytes() const { return bytes_; }

    double start_s() const;
    double duration_s() const { return duration_; }
    double total_bytes() const;
    double average_rate_bps() const;
    // Bits of packets with timestamp in [start, start + len), seconds
    // relative to the first packet.
    double bits_in(double start, double len) const;
    double max_packet_bytes() const;

    void write_csv(std::ostream& os) const;

private:
    std::vector<std::int64_t> t_ns_;
    std::vector<double> bytes_;
    // cum_bits_[i] = bits of packets 0..i-1
    std::vector<double> cum_bits_;
    double duration_ = 0.0;
};

// CSV with columns timestamp_ns,size_bytes (header optional).
PacketTrace ingest_csv(std::istream& is, std::optional<double> duration_s = std::nullopt);
PacketTrace ingest(const std::filesystem::path& path, std::optional<double> duration_s = std::nullopt);

struct EnvelopePoint {
    double t = 0.0;
    double bits = 0.0;
};

// G(t) = sup over window starts of A(tau, tau + t), for t = step, 2 step, ...
// up to horizon. Window starts at arrival instants suffice; cost is
// O(packets * grid points).
std::vector<EnvelopePoint> deterministic_envelope(const PacketTrace& trace, double horizon,
                                                  double step);

struct CcdfPoint {
    double sigma = 0.0;
    // Fraction of samples >= sigma, which dominates P(Y > s) for s near sigma.
    double prob = 0.0;
};

struct WindowCcdf {
    double window = 0.0;
    std::size_t sample_count = 0;
    std::vector<CcdfPoint> points;
};

// Y = (A(s, s + T) - r T) / T^H over windows s = 0, stride, 2 stride, ...
// Units: sigma in bits * s^-H.
WindowCcdf y_statistic(const PacketTrace& trace, double r, double H, double window,
                       double stride);

struct EnvelopeFit {
    double alpha = 0.0;
    double H = 0.0;
    double r = 0.0;
    double K = 0.0;
    std::vector<double> windows;
    std::vector<WindowCcdf> curves;
    std::size_t points_used = 0;
    std::string warning;

    // (K / eps)^(1/alpha)
    double sigma_at(double eps) const;
    // r t + sigma(eps) t^H
    double G(double t, double eps) const;
};

struct FitOptions {
    // Drop points with probability below 10 / sample count.
    bool include_deep_tail = false;
};

// K = max of p sigma^alpha over the given CCDF points with sigma > 0.
EnvelopeFit fit_from_ccdfs(std::vector<WindowCcdf> curves, double r, double alpha, double H,
                           FitOptions opts = {});

// Stride 0 selects the default of window/10.
EnvelopeFit fit_htss_K(const PacketTrace& trace, double r, double alpha, double H,
                       const std::vector<double>& windows, double stride = 0.0,
                       FitOptions opts = {});

// CSV sigma,prob,window_ms; lines starting with '#' are comments.
std::vector<WindowCcdf> read_ccdf_csv(std::istream& is);
void write_ccdf_csv(std::ostream& os, const std::vector<WindowCcdf>& curves);

// Packet i at time i/lambda with size b U^(-1/alpha) bytes.
PacketTrace generate_pareto_trace(double lambda_pps, double b_bytes, double alpha,
                                  std::size_t n_packets, std::uint64_t seed);

}  // namespace htnc
