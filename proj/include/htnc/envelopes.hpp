#pragma once

// Arrival envelopes. Rates are bits/s, time is seconds, and sigma of an htss
// envelope carries bits * s^-H.

#include "htnc/stable.hpp"
#include "htnc/tail_bound.hpp"

#include <variant>

namespace htnc {

// P(A(s,t) > r(t-s) + sigma (t-s)^H) <= K sigma^-alpha
struct HtssEnvelope {
    double r = 0.0;
    double H = 0.5;
    double alpha = 1.5;
    double K = 1.0;
    // Dispersion b of the generating process, when known.
    double b = 0.0;

    double epsilon(double sigma) const;
    // Smallest sigma with K sigma^-alpha <= eps.
    double sigma_at(double eps) const;
    double G(double t, double sigma) const;
    TailBound tail() const { return TailBound::power_law(K, alpha); }
};

// P(A(s,t) > r(t-s) + sigma (t-s)^H) <= K exp(-(sigma/b)^2 / 2)
struct GaussEnvelope {
    double r = 0.0;
    double H = 0.5;
    double b = 1.0;
    double K = 0.5;

    double epsilon(double sigma) const;
    double sigma_at(double eps) const;
    double G(double t, double sigma) const;
    TailBound tail() const;
};

using ArrivalEnvelope = std::variant<HtssEnvelope, GaussEnvelope>;

double rate_of(const ArrivalEnvelope& env);

enum class SourceKind { PowerLaw, Weibull };

// P(sup_s {A(s,t) - rate (t-s)} > sigma) <= tail(sigma)
struct SamplePathEnvelope {
    double rate = 0.0;
    TailBound tail = TailBound::zero();
    double mu = 0.0;
    SourceKind source = SourceKind::PowerLaw;
};

// Objective of the sample-path constant at a given gamma, without the K
// factor. Finite only for 1 < gamma < 1 + mu/r.
double k_tilde_objective(const HtssEnvelope& env, double mu, double gamma);

// K * inf over gamma of k_tilde_objective.
double k_tilde(const HtssEnvelope& env, double mu);

SamplePathEnvelope sample_path_envelope(const HtssEnvelope& env, double mu);
SamplePathEnvelope sample_path_envelope_gauss(const GaussEnvelope& env, double mu);
SamplePathEnvelope sample_path_envelope(const ArrivalEnvelope& env, double mu);

// K = (b / c_alpha)^alpha; only accurate for large sigma.
HtssEnvelope envelope_from_stable(double r, double alpha, double H, double b);

// K = max over the table of eps (b z(eps))^alpha; valid for every sigma.
HtssEnvelope envelope_from_stable_quantiles(double r, double alpha, double H, double b,
                                            const stable::QuantileTable& qt);

// Pareto(b, alpha) packet sizes at a constant packet rate.
struct ParetoSource {
    double lambda_pps = 0.0;
    double b_bytes = 0.0;
    double alpha = 1.5;

    double mean_bytes() const { return b_bytes * alpha / (alpha - 1.0); }
    double rate_bps() const { return lambda_pps * 8.0 * mean_bytes(); }
    double b_bits() const { return 8.0 * b_bytes; }
};

// Packet rate that gives the requested mean data rate.
ParetoSource pareto_from_data_rate(double rate_bps, double b_bytes, double alpha);

// r = lambda E[X], H = 1/alpha. K = lambda when sigma is counted in units of
// b; converted here to bits, K = lambda (8 b_bytes)^alpha.
HtssEnvelope envelope_from_pareto(double lambda_pps, double b_bytes, double alpha);
HtssEnvelope envelope_from_pareto(const ParetoSource& src);

// Fractional Brownian motion with variance b^2 t^2H: K = 1/2.
GaussEnvelope envelope_from_fbm(double r, double H, double b);
// Same envelope derived from the effective-bandwidth bound: K = 1.
GaussEnvelope envelope_from_fbm_effective_bandwidth(double r, double H, double b);

}  // namespace htnc
