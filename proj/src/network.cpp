#include "htnc/network.hpp"

#include "htnc/errors.hpp"
#include "htnc/optimize.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace htnc {

namespace {

void require_gamma(double gamma) {
    if (!(gamma > 1.0)) throw std::invalid_argument("gamma must exceed 1");
}

TailFunction inf_form(TailFunction first, TailFunction second) {
    return [first = std::move(first), second = std::move(second)](double sigma) {
        if (!(sigma > 0.0)) return 1.0;
        return std::min(1.0, minimize_split(first, second, sigma).value);
    };
}

TailBound lowered_to(const TailBound& t, double beta) {
    return t.alpha() > beta ? lower_power(t, beta) : t;
}

}  // namespace

ComposedCurve as_composed(const HtServiceCurve& sc) { return {sc.R, sc.tail.as_function()}; }

double concat_prefactor(double L, double beta, double gamma) {
    require_gamma(gamma);
    return std::pow(2.0, std::max(1.0, beta)) * L / (beta * std::log(gamma));
}

double concat_first_term(const TailBound& first, double gamma, double sigma) {
    if (first.is_zero()) return 0.0;
    if (!(sigma > 0.0)) return 1.0;
    const double beta = first.alpha();
    const double Lt = concat_prefactor(first.K(), beta, gamma);
    const double e = std::min(1.0, Lt * std::pow(sigma, -beta));
    return std::pow(2.0, positive_part(beta - 1.0)) * e * (std::abs(std::log(e)) + 2.0);
}

ComposedCurve concat_two(const HtServiceCurve& sc1, const ComposedCurve& sc2, double gamma) {
    require_gamma(gamma);
    if (sc1.tail.kind() != TailKind::PowerLaw) {
        throw std::invalid_argument("concat_two: first curve must have a power-law tail");
    }
    TailFunction first = [t = sc1.tail, gamma](double s) { return concat_first_term(t, gamma, s); };
    return {std::min(sc1.R, sc2.R / gamma), inf_form(std::move(first), sc2.tail)};
}

HtServiceCurve concat_two_power(const HtServiceCurve& sc1, const HtServiceCurve& sc2,
                                double gamma, double beta) {
    require_gamma(gamma);
    if (sc1.tail.kind() != TailKind::PowerLaw || sc2.tail.kind() != TailKind::PowerLaw) {
        throw std::invalid_argument("concat_two_power: both tails must be power laws");
    }
    const double b1 = sc1.tail.alpha();
    if (!(beta > 0.0) || !(beta < b1) || (!sc2.tail.is_zero() && beta > sc2.tail.alpha())) {
        throw std::invalid_argument("concat_two_power: need beta < beta1 and beta <= beta2");
    }
    const double R = std::min(sc1.R, sc2.R / gamma);
    TailBound first = TailBound::zero();
    if (!sc1.tail.is_zero()) {
        // Where e~ < 1 the first term is
        // f Lt s^-b1 (b1 log s + 2 - log Lt), f = 2^[b1-1]+.
        const double Lt = concat_prefactor(sc1.tail.K(), b1, gamma);
        const double f = std::pow(2.0, positive_part(b1 - 1.0));
        double A = f * Lt * b1 * remove_log(b1, beta).K();
        const double shift = 2.0 - std::log(Lt);
        if (shift > 0.0) A += lower_power(TailBound::power_law(f * Lt * shift, b1), beta).K();
        // Below Lt^(1/b1) the term is capped; A s^-beta must reach 1 there.
        A = std::max(A, std::pow(Lt, beta / b1));
        first = TailBound::power_law(A, beta);
    }
    const std::array<TailBound, 2> terms{first, lowered_to(sc2.tail, beta)};
    return {R, minimize_sum(terms).bound};
}

ComposedCurve concat_two_weibull(const HtServiceCurve& sc1, const ComposedCurve& sc2,
                                 double gamma) {
    require_gamma(gamma);
    if (sc1.tail.kind() != TailKind::Weibull) {
        throw std::invalid_argument("concat_two_weibull: first curve must have a Weibull tail");
    }
    const TailBound& t = sc1.tail;
    const double b1 = t.alpha();
    const double c1 = t.c();
    // The union-bound integral carries a factor c1 that cancels against the
    // step tau ~ c1^b1, so the prefactor is dimensionless: no 1/c1 here.
    const double Lt = std::max(std::exp(2.0), gamma / (gamma - 1.0) *
                                                  std::pow(2.0 * std::numbers::e, positive_part(b1 - 1.0)) *
                                                  t.K());
    const TailBound first = TailBound::weibull(Lt, c1, b1);
    return {std::min(sc1.R, sc2.R / gamma), inf_form(first.as_function(), sc2.tail)};
}

NetworkServiceCurve network_service_curve(const HtServiceCurve& per_node, int N, double gamma) {
    if (N < 1) throw std::invalid_argument("network service curve: N must be at least 1");
    require_gamma(gamma);
    if (per_node.tail.kind() != TailKind::PowerLaw) {
        throw std::invalid_argument("network service curve: per-node tail must be a power law");
    }
    NetworkServiceCurve out;
    out.R_net = per_node.R / gamma;
    out.N = N;
    out.gamma = gamma;
    if (per_node.tail.is_zero()) return out;
    const double beta = per_node.tail.alpha();
    const double Lt = concat_prefactor(per_node.tail.K(), beta, gamma);
    const double n = static_cast<double>(N);
    // N^(2+b) 2^[b-1]+ e~ (|log e~| + (1+b) log N + 2), e~ = min(1, Lt s^-b)
    const double A = std::pow(n, 2.0 + beta) * std::pow(2.0, positive_part(beta - 1.0)) * Lt;
    const double b = 2.0 + (1.0 + beta) * std::log(n) - std::log(Lt);
    out.tail = TailBound::power_law_log(A, beta, beta, b, std::pow(Lt, 1.0 / beta));
    return out;
}

NetworkServiceCurve network_service_curve_weibull(const HtServiceCurve& per_node, int N,
                                                  double gamma) {
    if (N < 1) throw std::invalid_argument("network service curve: N must be at least 1");
    require_gamma(gamma);
    if (per_node.tail.kind() != TailKind::Weibull) {
        throw std::invalid_argument("network service curve: per-node tail must be Weibull");
    }
    const TailBound& t = per_node.tail;
    const double n = static_cast<double>(N);
    const double lg = std::log(gamma);
    const double Lt = std::max(std::exp(2.0) / n * lg,
                               std::pow(2.0 * std::numbers::e, positive_part(t.alpha() - 1.0)) * t.K());
    NetworkServiceCurve out;
    out.R_net = per_node.R / gamma;
    out.N = N;
    out.gamma = gamma;
    out.tail = TailBound::weibull(n * (1.0 + n / lg) * Lt, n * t.c(), t.alpha());
    return out;
}

HtServiceCurve homogenize(std::span<const HtServiceCurve> curves) {
    if (curves.empty()) throw std::invalid_argument("homogenize: no curves");
    double R = HUGE_VAL;
    for (const auto& c : curves) R = std::min(R, c.R);
    const bool weibull = std::any_of(curves.begin(), curves.end(),
                                     [](const auto& c) { return c.tail.kind() == TailKind::Weibull; });
    if (weibull) {
        // Larger L and c and a smaller shape weaken the bound wherever
        // sigma >= c; below that the Weibull prefactors in use exceed e and
        // the bound is capped anyway.
        double L = 0.0, c = 0.0, beta = HUGE_VAL;
        for (const auto& cv : curves) {
            if (cv.tail.kind() != TailKind::Weibull) {
                if (cv.tail.is_zero()) continue;
                throw std::invalid_argument("homogenize: cannot mix Weibull and power-law tails");
            }
            L = std::max(L, cv.tail.K());
            c = std::max(c, cv.tail.c());
            beta = std::min(beta, cv.tail.alpha());
        }
        return {R, TailBound::weibull(L, c, beta)};
    }
    double beta = HUGE_VAL;
    for (const auto& c : curves) {
        if (c.tail.kind() != TailKind::PowerLaw) {
            throw std::invalid_argument("homogenize: unsupported tail kind");
        }
        if (!c.tail.is_zero()) beta = std::min(beta, c.tail.alpha());
    }
    if (!std::isfinite(beta)) return {R, TailBound::zero()};
    double L = 0.0;
    for (const auto& c : curves) {
        if (c.tail.is_zero()) continue;
        L = std::max(L, lowered_to(c.tail, beta).K());
    }
    return {R, TailBound::power_law(L, beta)};
}

PathSpec replicate(const PathSpec& tmpl, int n) {
    if (tmpl.nodes.empty()) throw std::invalid_argument("replicate: template has no nodes");
    if (n < 1) throw std::invalid_argument("replicate: N must be at least 1");
    PathSpec p = tmpl;
    p.nodes.assign(static_cast<std::size_t>(n), tmpl.nodes.front());
    const std::optional<ParetoSource> cs =
        tmpl.cross_sources.empty() ? std::nullopt : tmpl.cross_sources.front();
    p.cross_sources.assign(static_cast<std::size_t>(n), cs);
    if (p.mu.kind == MuPolicy::Kind::Explicit) {
        if (tmpl.mu.values.empty()) throw std::invalid_argument("replicate: explicit mu list is empty");
        p.mu.values.assign(static_cast<std::size_t>(n), tmpl.mu.values.front());
    }
    return p;
}

EndToEndResult end_to_end_delay(const PathSpec& path) {
    const std::size_t N = path.nodes.size();
    if (N == 0) throw std::invalid_argument("path has no nodes");
    if (path.mu.kind == MuPolicy::Kind::Explicit && path.mu.values.size() != N) {
        throw std::invalid_argument("explicit mu list must have one entry per node");
    }
    if (path.mu.kind == MuPolicy::Kind::Fraction && !(path.mu.fraction > 0.0 && path.mu.fraction < 1.0)) {
        throw std::invalid_argument("mu fraction must lie in (0,1)");
    }
    const double r0 = rate_of(path.through);
    std::vector<HtServiceCurve> curves;
    curves.reserve(N);
    double mu_min = HUGE_VAL;
    for (std::size_t i = 0; i < N; ++i) {
        const LinkSpec& link = path.nodes[i];
        const double rc = link.cross ? rate_of(*link.cross) : 0.0;
        const double residual = link.C - rc - r0;
        if (!(residual > 0.0)) {
            std::ostringstream os;
            os << "node " << i << " unstable: through " << r0 << " bps + cross " << rc
               << " bps >= capacity " << link.C << " bps";
            throw InstabilityError(os.str(), static_cast<std::ptrdiff_t>(i));
        }
        const double mu = path.mu.kind == MuPolicy::Kind::Fraction ? path.mu.fraction * residual
                                                                   : path.mu.values[i];
        if (!(mu > 0.0 && mu < residual)) {
            std::ostringstream os;
            os << "node " << i << ": mu " << mu << " bps must lie in (0, " << residual << ")";
            throw InstabilityError(os.str(), static_cast<std::ptrdiff_t>(i));
        }
        mu_min = std::min(mu_min, mu);
        if (link.cross) {
            curves.push_back(leftover_with_packetizer(link, mu));
        } else if (link.packetizer) {
            curves.push_back(packetizer_curve(link.C, *link.packetizer));
        } else {
            curves.push_back({link.C, TailBound::zero()});
        }
    }

    if (N == 1) {
        const HtServiceCurve& sc = curves.front();
        std::optional<DelayBound> db;
        if (const auto* env = std::get_if<HtssEnvelope>(&path.through);
            env && sc.tail.kind() == TailKind::PowerLaw) {
            db = delay_bound(*env, sc);
        } else {
            const SamplePathEnvelope sp = sample_path_envelope(path.through, sc.R - r0);
            db = DelayBound(sc.R, sp.tail.as_function(), sc.tail.as_function());
        }
        return EndToEndResult{*db, curves, sc, std::nullopt, 1.0, sc.R, sc.R - r0,
                              "single node: per-node curve used directly, no rate relaxation"};
    }

    const HtServiceCurve h = homogenize(curves);
    const double gamma = path.gamma ? *path.gamma : h.R / (r0 + mu_min);
    if (!(gamma > 1.0)) {
        throw std::invalid_argument("gamma must exceed 1 (automatic choice needs mu below half the residual rate)");
    }
    const NetworkServiceCurve nsc = h.tail.kind() == TailKind::Weibull
                                        ? network_service_curve_weibull(h, static_cast<int>(N), gamma)
                                        : network_service_curve(h, static_cast<int>(N), gamma);
    if (!(nsc.R_net > r0)) {
        throw InstabilityError("network rate R/gamma does not exceed the through rate");
    }
    const double mu0 = nsc.R_net - r0;
    const SamplePathEnvelope sp = sample_path_envelope(path.through, mu0);
    DelayBound db(nsc.R_net, sp.tail.as_function(), nsc.tail.as_function());
    if (!nsc.tail.is_zero()) {
        const double beta = nsc.tail.alpha();
        const double share = std::pow(static_cast<double>(N), -1.0 - 2.0 / beta);
        db.set_fallback_share([share](double) { return share; });
    }
    std::ostringstream notes;
    notes << "N=" << N << " gamma=" << gamma << " R_net=" << nsc.R_net << " mu=" << mu0;
    return EndToEndResult{db, curves, h, nsc, gamma, nsc.R_net, mu0, notes.str()};
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_slope: need two or more points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ScalingStudy scaling_study(const PathSpec& tmpl, std::span<const int> Ns, double eps) {
    if (Ns.empty()) throw std::invalid_argument("scaling study: no node counts");
    ScalingStudy out;
    const bool no_cross = std::none_of(tmpl.nodes.begin(), tmpl.nodes.end(),
                                       [](const LinkSpec& l) { return l.cross.has_value(); });
    bool weibull = true;
    for (int N : Ns) {
        const PathSpec p = replicate(tmpl, N);
        const EndToEndResult e2e = end_to_end_delay(p);
        ScalingRow row;
        row.N = N;
        row.w_upper = delay_quantile(e2e.delay, eps, kScalingSearchMax);
        if (tmpl.source && no_cross && eps < 1.0) {
            const ParetoSource& s = *tmpl.source;
            row.w_lower = lower_bound_quantile_pareto(N, s.b_bits() / tmpl.nodes.front().C, s.alpha,
                                                      s.lambda_pps, eps);
        }
        if (e2e.homogenized.tail.kind() == TailKind::Weibull && N >= 2) {
            out.beta = e2e.homogenized.tail.alpha();
        } else {
            weibull = false;
        }
        out.rows.push_back(row);
    }
    if (out.rows.size() >= 2) {
        std::vector<double> lx, lu, ll, ln;
        for (const auto& r : out.rows) {
            lx.push_back(std::log(r.N));
            lu.push_back(std::log(r.w_upper));
            if (r.w_lower) ll.push_back(std::log(*r.w_lower));
        }
        out.slope_upper = fit_slope(lx, lu);
        if (ll.size() == lx.size()) out.slope_lower = fit_slope(lx, ll);
        if (weibull && out.beta) {
            for (const auto& r : out.rows) {
                ln.push_back(std::log(r.w_upper) - std::log(std::log(r.N)) / *out.beta);
            }
            out.slope_normalized = fit_slope(lx, ln);
        }
    }
    if (!weibull) out.beta.reset();
    return out;
}

}  // namespace htnc
