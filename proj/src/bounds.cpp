#include "htnc/bounds.hpp"

#include "htnc/errors.hpp"
#include "htnc/optimize.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace htnc {

BacklogBound backlog_bound(const HtssEnvelope& env, double C) {
    if (!(C > env.r)) throw InstabilityError("backlog bound: link rate must exceed the envelope rate");
    return {TailBound::power_law(k_tilde(env, C - env.r), env.alpha * (1.0 - env.H))};
}

double ClosedDelayForm::operator()(double w) const {
    if (!(w > 0.0)) return 1.0;
    if (M == 0.0) return 0.0;
    return std::min(1.0, M * std::pow(R * w, -beta_prime));
}

double ClosedDelayForm::quantile(double eps) const {
    return std::pow(M / eps, 1.0 / beta_prime) / R;
}

DelayBound::DelayBound(double R, TailFunction arrival, TailFunction service,
                       std::optional<ClosedDelayForm> closed)
    : R_(R), arrival_(std::move(arrival)), service_(std::move(service)), closed_(closed) {
    if (!(R > 0.0)) throw std::invalid_argument("delay bound: rate must be positive");
}

double DelayBound::operator()(double w) const {
    if (!(w > 0.0)) return 1.0;
    const double total = R_ * w;
    double best = minimize_split(arrival_, service_, total).value;
    if (closed_) {
        // The split that is optimal for the relaxed problem is a valid
        // candidate too, so this value never exceeds the closed form.
        best = std::min(best, closed(w));
    }
    if (fallback_) best = std::min(best, fallback(w));
    return std::min(1.0, best);
}

double DelayBound::best_split(double w) const {
    return minimize_split(arrival_, service_, R_ * w).x;
}

double DelayBound::at_share(double w, double share) const {
    const double total = R_ * w;
    const double s1 = share * total;
    return std::min(1.0, arrival_(s1) + service_(total - s1));
}

double DelayBound::closed(double w) const {
    if (!closed_) return (*this)(w);
    return (*closed_)(w);
}

double DelayBound::fallback(double w) const {
    if (!fallback_) throw std::logic_error("delay bound: no fallback split configured");
    return at_share(w, fallback_(w));
}

TailFunction DelayBound::as_function() const {
    return [self = *this](double w) { return self(w); };
}

DelayBound delay_bound(const HtssEnvelope& env, const HtServiceCurve& sc) {
    if (!(env.r < sc.R)) throw InstabilityError("delay bound: envelope rate must be below service rate");
    const SamplePathEnvelope sp = sample_path_envelope(env, sc.R - env.r);
    std::optional<ClosedDelayForm> closed;
    if (sc.tail.kind() == TailKind::PowerLaw) {
        const double bp = std::min(sp.tail.alpha(), sc.tail.alpha());
        auto lowered = [bp](const TailBound& t) { return t.alpha() > bp ? lower_power(t, bp) : t; };
        const std::array<TailBound, 2> terms{lowered(sp.tail), lowered(sc.tail)};
        const SumMinimum m = minimize_sum(terms);
        closed = ClosedDelayForm{m.bound.K(), sc.R, bp};
        DelayBound db(sc.R, sp.tail.as_function(), sc.tail.as_function(), closed);
        // The relaxed problem's optimal split, kept as the named fallback.
        const double share = m.split[0];
        db.set_fallback_share([share](double) { return share; });
        return db;
    }
    return DelayBound(sc.R, sp.tail.as_function(), sc.tail.as_function(), closed);
}

double delay_quantile(const TailFunction& bound, double eps, double w_max) {
    if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("delay quantile: eps must lie in (0,1]");
    auto ok = [&](double w) {
        const double p = bound(w);
        return eps >= 1.0 ? p < 1.0 : p <= eps;
    };
    constexpr int kPerDecade = 20;
    const double lo_exp = std::log10(kDelaySearchMin);
    if (!(w_max > kDelaySearchMin)) throw std::invalid_argument("delay quantile: search range is empty");
    const double hi_exp = std::log10(w_max);
    const int steps = static_cast<int>((hi_exp - lo_exp) * kPerDecade);
    double prev = kDelaySearchMin;
    if (ok(prev)) return prev;
    for (int i = 1; i <= steps; ++i) {
        const double w = std::pow(10.0, lo_exp + static_cast<double>(i) / kPerDecade);
        if (ok(w)) {
            double a = prev, b = w;
            while ((b - a) > 1e-5 * b) {
                const double m = std::sqrt(a * b);
                if (ok(m)) b = m;
                else a = m;
            }
            return b;
        }
        prev = w;
    }
    std::ostringstream os;
    os << "delay quantile: bound never reaches eps within [1e-9, " << w_max << "] s";
    throw std::range_error(os.str());
}

double delay_quantile(const DelayBound& db, double eps, double w_max) {
    return delay_quantile(db.as_function(), eps, w_max);
}

double lower_bound_quantile_pareto(int N, double b_seconds, double alpha, double lambda_pps,
                                   double eps) {
    if (N < 1) throw std::invalid_argument("lower bound: N must be at least 1");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("lower bound: eps must lie in (0,1)");
    if (!(alpha > 1.0)) throw std::invalid_argument("lower bound: alpha must exceed 1");
    if (!(b_seconds > 0.0) || !(lambda_pps > 0.0)) {
        throw std::invalid_argument("lower bound: b and lambda must be positive");
    }
    const double num = std::pow(N * b_seconds, alpha / (alpha - 1.0));
    const double den = std::pow((alpha - 1.0) / lambda_pps * std::abs(std::log1p(-eps)),
                                1.0 / (alpha - 1.0));
    return num / den;
}

void write_bound_csv(std::ostream& os, const TailFunction& bound, std::span<const double> ws) {
    os << "w_seconds,prob_bound\n";
    const auto old = os.precision(10);
    for (double w : ws) os << w << ',' << bound(w) << '\n';
    os.precision(old);
}

std::vector<double> log_space(double lo, double hi, std::size_t n) {
    if (n == 0) return {};
    if (n == 1) return {lo};
    std::vector<double> out(n);
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    out.back() = hi;
    return out;
}

}  // namespace htnc
