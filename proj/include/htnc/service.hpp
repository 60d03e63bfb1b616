#pragma once

#include "htnc/envelopes.hpp"
#include "htnc/tail_bound.hpp"

#include <optional>

namespace htnc {

// P(D(t) < A * [R t - sigma]_+) <= tail(sigma)
struct HtServiceCurve {
    double R = 0.0;
    TailBound tail = TailBound::zero();
};

// Packetizer for a flow with packet-size tail P(X > x) <= L_p x^-alpha_p.
// Sizes in bits.
struct PacketizerSpec {
    double alpha_p = 1.5;
    double L_p = 1.0;
    double mean_packet = 1.0;
    // Utilization of the link by the packetized flow.
    double rho = 1.0;
};

// Pareto(b, alpha) sizes: L_p = (8 b)^alpha, E[X] = 8 b alpha / (alpha - 1).
PacketizerSpec pareto_packetizer(double b_bytes, double alpha_p, double rho);

struct LinkSpec {
    double C = 0.0;
    std::optional<ArrivalEnvelope> cross;
    std::optional<PacketizerSpec> packetizer;
};

HtServiceCurve packetizer_curve(double C, double alpha_p, double L_p, double mean_packet,
                                double rho);
HtServiceCurve packetizer_curve(double C, const PacketizerSpec& p);

// Leftover service under cross traffic, relaxed by mu: rate C - r_c - mu.
// Power-law cross traffic gives a power-law tail, Gaussian cross traffic a
// Weibull tail.
HtServiceCurve leftover_curve(const LinkSpec& link, double mu);

// Leftover service plus the packetizer of the through flow, as one power
// law with the smaller of the two exponents.
HtServiceCurve leftover_with_packetizer(const LinkSpec& link, double mu);

// Preset relaxations: a fraction of the capacity left after cross and
// through traffic.
inline constexpr double kMuHalf = 0.5;
inline constexpr double kMuThird = 1.0 / 3.0;

}  // namespace htnc
