#include "htnc/envelopes.hpp"

#include "htnc/optimize.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace htnc {

namespace {

void check_htss(const HtssEnvelope& env) {
    if (!(env.r >= 0.0)) throw std::invalid_argument("envelope: r must be nonnegative");
    if (!(env.H > 0.0 && env.H < 1.0)) throw std::invalid_argument("envelope: H must lie in (0,1)");
    if (!(env.alpha > 1.0 && env.alpha <= 2.0)) {
        throw std::invalid_argument("envelope: alpha must lie in (1,2]");
    }
    if (!(env.K > 0.0)) throw std::invalid_argument("envelope: K must be positive");
}

}  // namespace

double HtssEnvelope::epsilon(double sigma) const { return tail()(sigma); }

double HtssEnvelope::sigma_at(double eps) const {
    if (!(eps > 0.0)) throw std::invalid_argument("sigma_at: eps must be positive");
    return std::pow(K / eps, 1.0 / alpha);
}

double HtssEnvelope::G(double t, double sigma) const { return r * t + sigma * std::pow(t, H); }

double GaussEnvelope::epsilon(double sigma) const {
    return std::min(1.0, K * std::exp(-0.5 * (sigma / b) * (sigma / b)));
}

double GaussEnvelope::sigma_at(double eps) const {
    if (!(eps > 0.0)) throw std::invalid_argument("sigma_at: eps must be positive");
    return eps >= K ? 0.0 : b * std::sqrt(2.0 * std::log(K / eps));
}

double GaussEnvelope::G(double t, double sigma) const { return r * t + sigma * std::pow(t, H); }

TailBound GaussEnvelope::tail() const {
    return TailBound::weibull(K, b * std::numbers::sqrt2, 2.0);
}

double rate_of(const ArrivalEnvelope& env) {
    return std::visit([](const auto& e) { return e.r; }, env);
}

double k_tilde_objective(const HtssEnvelope& env, double mu, double gamma) {
    const double aH = env.alpha * env.H;
    const double slack = (env.r + mu) / gamma - env.r;
    if (!(gamma > 1.0) || !(slack > 0.0)) return HUGE_VAL;
    return std::pow(slack, -aH) * std::pow(gamma, aH * (1.0 - env.H)) /
           (aH * (1.0 - env.H) * std::log(gamma));
}

double k_tilde(const HtssEnvelope& env, double mu) {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("k_tilde: mu must be positive");
    check_htss(env);
    const double aH = env.alpha * env.H;
    const double hi = env.r > 0.0 ? mu / env.r : HUGE_VAL;
    // gamma = 1 + g with g in (0, hi); search over log g. The objective is
    // evaluated in log form so large rates do not overflow.
    auto log_obj = [&](double u) {
        const double g = std::exp(u);
        const double gamma = 1.0 + g;
        const double slack = (env.r + mu) / gamma - env.r;
        if (!(g < hi) || !(slack > 0.0)) return HUGE_VAL;
        return -aH * std::log(slack) + aH * (1.0 - env.H) * std::log1p(g) -
               std::log(aH * (1.0 - env.H) * std::log1p(g));
    };
    const double u_hi = std::isfinite(hi) ? std::log(hi) : 50.0;
    const double u_lo = u_hi - 60.0;
    constexpr int kScan = 241;
    double best_u = u_lo, best = HUGE_VAL;
    const double step = (u_hi - u_lo) / (kScan - 1);
    for (int i = 0; i < kScan - 1; ++i) {
        const double u = u_lo + step * i;
        const double v = log_obj(u);
        if (v < best) {
            best = v;
            best_u = u;
        }
    }
    if (!std::isfinite(best)) throw std::domain_error("k_tilde: objective not finite");
    const double lo = best_u - step;
    const double up = std::min(best_u + step, u_hi);
    const Minimum m = golden_section(log_obj, lo, up, 1e-12);
    return env.K * std::exp(std::min(m.value, best));
}

SamplePathEnvelope sample_path_envelope(const HtssEnvelope& env, double mu) {
    SamplePathEnvelope sp;
    sp.rate = env.r + mu;
    sp.tail = TailBound::power_law(k_tilde(env, mu), env.alpha * (1.0 - env.H));
    sp.mu = mu;
    sp.source = SourceKind::PowerLaw;
    return sp;
}

SamplePathEnvelope sample_path_envelope_gauss(const GaussEnvelope& env, double mu) {
    if (!(mu > 0.0)) throw std::invalid_argument("sample path envelope: mu must be positive");
    if (!(env.H > 0.0 && env.H < 1.0)) throw std::invalid_argument("envelope: H must lie in (0,1)");
    if (!(env.b > 0.0) || !(env.K > 0.0)) throw std::invalid_argument("envelope: b, K must be positive");
    const double H = env.H;
    const double beta = 2.0 * (1.0 - H);
    const double c = std::pow(2.0 * env.b / std::pow(mu, H), 1.0 / (1.0 - H));
    const double L = std::numbers::e *
                     std::max(1.0, std::pow(4.0, H) * env.K * (env.r / mu + 2.0 - H) / (H * (1.0 - H)));
    SamplePathEnvelope sp;
    sp.rate = env.r + mu;
    sp.tail = TailBound::weibull(L, c, beta);
    sp.mu = mu;
    sp.source = SourceKind::Weibull;
    return sp;
}

SamplePathEnvelope sample_path_envelope(const ArrivalEnvelope& env, double mu) {
    return std::visit(
        [mu](const auto& e) {
            if constexpr (std::is_same_v<std::decay_t<decltype(e)>, HtssEnvelope>) {
                return sample_path_envelope(e, mu);
            } else {
                return sample_path_envelope_gauss(e, mu);
            }
        },
        env);
}

HtssEnvelope envelope_from_stable(double r, double alpha, double H, double b) {
    if (!(b > 0.0)) throw std::invalid_argument("envelope_from_stable: b must be positive");
    HtssEnvelope env{r, H, alpha, std::pow(b / stable::c_alpha(alpha), alpha), b};
    check_htss(env);
    return env;
}

HtssEnvelope envelope_from_stable_quantiles(double r, double alpha, double H, double b,
                                            const stable::QuantileTable& qt) {
    if (qt.empty()) throw std::invalid_argument("quantile envelope: empty table");
    if (!(b > 0.0)) throw std::invalid_argument("quantile envelope: b must be positive");
    if (std::abs(qt.alpha() - alpha) > 1e-12) {
        throw std::invalid_argument("quantile envelope: table built for a different alpha");
    }
    double K = 0.0;
    for (const auto& e : qt.entries()) {
        if (e.z <= 0.0) continue;
        K = std::max(K, e.epsilon * std::pow(b * e.z, alpha));
    }
    if (!(K > 0.0)) throw std::invalid_argument("quantile envelope: no positive quantiles in table");
    HtssEnvelope env{r, H, alpha, K, b};
    check_htss(env);
    return env;
}

ParetoSource pareto_from_data_rate(double rate_bps, double b_bytes, double alpha) {
    if (!(alpha > 1.0)) throw std::invalid_argument("pareto: alpha must exceed 1");
    if (!(b_bytes > 0.0) || !(rate_bps > 0.0)) throw std::invalid_argument("pareto: b and rate must be positive");
    ParetoSource s{0.0, b_bytes, alpha};
    s.lambda_pps = rate_bps / (8.0 * s.mean_bytes());
    return s;
}

HtssEnvelope envelope_from_pareto(double lambda_pps, double b_bytes, double alpha) {
    if (!(alpha > 1.0 && alpha < 2.0)) throw std::invalid_argument("pareto envelope: alpha must lie in (1,2)");
    if (!(b_bytes > 0.0)) throw std::invalid_argument("pareto envelope: b must be positive");
    if (!(lambda_pps > 0.0)) throw std::invalid_argument("pareto envelope: lambda must be positive");
    const ParetoSource s{lambda_pps, b_bytes, alpha};
    return HtssEnvelope{s.rate_bps(), 1.0 / alpha, alpha, lambda_pps * std::pow(s.b_bits(), alpha),
                        s.b_bits()};
}

HtssEnvelope envelope_from_pareto(const ParetoSource& src) {
    return envelope_from_pareto(src.lambda_pps, src.b_bytes, src.alpha);
}

GaussEnvelope envelope_from_fbm(double r, double H, double b) {
    if (!(b > 0.0)) throw std::invalid_argument("fbm envelope: b must be positive");
    if (!(H > 0.0 && H < 1.0)) throw std::invalid_argument("fbm envelope: H must lie in (0,1)");
    return GaussEnvelope{r, H, b, 0.5};
}

GaussEnvelope envelope_from_fbm_effective_bandwidth(double r, double H, double b) {
    GaussEnvelope env = envelope_from_fbm(r, H, b);
    env.K = 1.0;
    return env;
}

}  // namespace htnc
