#include "htnc/service.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace htnc {

PacketizerSpec pareto_packetizer(double b_bytes, double alpha_p, double rho) {
    if (!(alpha_p > 1.0)) throw std::invalid_argument("packetizer: alpha_p must exceed 1");
    if (!(b_bytes > 0.0)) throw std::invalid_argument("packetizer: b must be positive");
    const double b = 8.0 * b_bytes;
    return PacketizerSpec{alpha_p, std::pow(b, alpha_p), b * alpha_p / (alpha_p - 1.0), rho};
}

HtServiceCurve packetizer_curve(double C, double alpha_p, double L_p, double mean_packet,
                                double rho) {
    if (!(alpha_p > 1.0)) {
        throw std::invalid_argument("packetizer: alpha_p must exceed 1 (lifetime integral diverges)");
    }
    if (!(C > 0.0)) throw std::invalid_argument("packetizer: C must be positive");
    if (!(mean_packet > 0.0) || !(L_p > 0.0)) {
        throw std::invalid_argument("packetizer: L_p and mean packet must be positive");
    }
    if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("packetizer: rho must lie in (0,1]");
    return {C, TailBound::power_law(rho * L_p / ((alpha_p - 1.0) * mean_packet), alpha_p - 1.0)};
}

HtServiceCurve packetizer_curve(double C, const PacketizerSpec& p) {
    return packetizer_curve(C, p.alpha_p, p.L_p, p.mean_packet, p.rho);
}

HtServiceCurve leftover_curve(const LinkSpec& link, double mu) {
    if (!link.cross) throw std::invalid_argument("leftover curve: link has no cross traffic");
    if (!(mu > 0.0)) throw std::invalid_argument("leftover curve: mu must be positive");
    const double R = link.C - rate_of(*link.cross) - mu;
    if (!(R > 0.0)) throw std::invalid_argument("leftover curve: C - r_c - mu must be positive");
    return {R, sample_path_envelope(*link.cross, mu).tail};
}

HtServiceCurve leftover_with_packetizer(const LinkSpec& link, double mu) {
    HtServiceCurve left = leftover_curve(link, mu);
    if (!link.packetizer) return left;
    if (left.tail.kind() != TailKind::PowerLaw) {
        throw std::invalid_argument("leftover with packetizer: needs power-law cross traffic");
    }
    const TailBound pkt = packetizer_curve(link.C, *link.packetizer).tail;
    const double beta = std::min(left.tail.alpha(), pkt.alpha());
    auto lowered = [beta](const TailBound& t) {
        return t.alpha() > beta ? lower_power(t, beta) : t;
    };
    const std::array<TailBound, 2> terms{lowered(left.tail), lowered(pkt)};
    return {left.R, minimize_sum(terms).bound};
}

}  // namespace htnc
