#pragma once

#include "htnc/bounds.hpp"
#include "htnc/envelopes.hpp"
#include "htnc/service.hpp"
#include "htnc/tail_bound.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace htnc {

// Service curve whose tail has no closed form (an infimum over splits).
struct ComposedCurve {
    double R = 0.0;
    TailFunction tail;
};

ComposedCurve as_composed(const HtServiceCurve& sc);

// 2^max(1,beta) L / (beta log gamma): the prefactor of the log-corrected
// tail of a power-law curve after one concatenation step.
double concat_prefactor(double L, double beta, double gamma);

// Log-corrected tail of the first node: 2^[b-1]+ e~ (|log e~| + 2) with
// e~ = min(1, concat_prefactor * sigma^-beta).
double concat_first_term(const TailBound& first, double gamma, double sigma);

// Two nodes in series, the first with a power-law tail. Rate
// min(R1, R2/gamma); tail is the infimum over splits.
ComposedCurve concat_two(const HtServiceCurve& sc1, const ComposedCurve& sc2, double gamma);

// Same pair reduced to one power law with exponent beta (beta < beta1,
// beta <= beta2).
HtServiceCurve concat_two_power(const HtServiceCurve& sc1, const HtServiceCurve& sc2,
                                double gamma, double beta);

// Two nodes, the first with a Weibull tail.
ComposedCurve concat_two_weibull(const HtServiceCurve& sc1, const ComposedCurve& sc2,
                                 double gamma);

struct NetworkServiceCurve {
    double R_net = 0.0;
    TailBound tail = TailBound::zero();
    int N = 1;
    double gamma = 1.0;
};

// N identical power-law nodes, rate R/gamma.
NetworkServiceCurve network_service_curve(const HtServiceCurve& per_node, int N, double gamma);
// N identical Weibull nodes, rate R/gamma.
NetworkServiceCurve network_service_curve_weibull(const HtServiceCurve& per_node, int N,
                                                  double gamma);

// One curve dominating every input: smallest rate and exponent, largest
// prefactor after lowering (and largest Weibull scale).
HtServiceCurve homogenize(std::span<const HtServiceCurve> curves);

struct MuPolicy {
    enum class Kind { Fraction, Explicit };
    Kind kind = Kind::Fraction;
    double fraction = 1.0 / 3.0;
    std::vector<double> values;
};

struct PathSpec {
    std::vector<LinkSpec> nodes;
    ArrivalEnvelope through = HtssEnvelope{};
    // Set when the through flow is a Pareto packet source; enables the
    // lower-bound column and the simulator.
    std::optional<ParetoSource> source;
    // Per-node cross-traffic generators for the simulator.
    std::vector<std::optional<ParetoSource>> cross_sources;
    MuPolicy mu;
    // Unset: gamma chosen so that the network rate is r0 + mu.
    std::optional<double> gamma;
};

// Path of n copies of the first node of the template.
PathSpec replicate(const PathSpec& tmpl, int n);

struct EndToEndResult {
    DelayBound delay;
    std::vector<HtServiceCurve> per_node;
    HtServiceCurve homogenized;
    std::optional<NetworkServiceCurve> network;
    double gamma = 1.0;
    double R_net = 0.0;
    double mu_through = 0.0;
    std::string notes;
};

// Per-node leftover curves, homogenized, combined into a network curve and
// paired with the through flow's sample-path envelope.
EndToEndResult end_to_end_delay(const PathSpec& path);

struct ScalingRow {
    int N = 1;
    double w_upper = 0.0;
    std::optional<double> w_lower;
};

struct ScalingStudy {
    std::vector<ScalingRow> rows;
    std::optional<double> slope_upper;
    std::optional<double> slope_lower;
    // Slope of log(w / (log N)^(1/beta)) against log N, for Weibull paths.
    std::optional<double> slope_normalized;
    std::optional<double> beta;
};

// Long paths push small quantiles far past the default search limit, so the
// study searches up to 1e18 s.
inline constexpr double kScalingSearchMax = 1e18;

ScalingStudy scaling_study(const PathSpec& tmpl, std::span<const int> Ns, double eps);

// Least-squares slope of y against x.
double fit_slope(std::span<const double> x, std::span<const double> y);

}  // namespace htnc
