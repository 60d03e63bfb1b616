#include "htnc/tail_bound.hpp"

#include "htnc/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace htnc {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(name) + " must be positive and finite");
    }
}

// E1(x) = -Ei(-x)
double expint_e1(double x) { return -std::expint(-x); }

// Point where the uncapped formula crosses 1, or 0 if it never exceeds 1.
double cap_point(const TailBound& tb) {
    switch (tb.kind()) {
    case TailKind::PowerLaw:
        return tb.is_zero() ? 0.0 : std::pow(tb.K(), 1.0 / tb.alpha());
    case TailKind::Weibull:
        return tb.K() > 1.0 ? tb.c() * std::pow(std::log(tb.K()), 1.0 / tb.alpha()) : 0.0;
    case TailKind::PowerLawLog:
        return tb.log_terms()->cap_below;
    }
    return 0.0;
}

double raw_integral(const TailBound& tb, double z) {
    switch (tb.kind()) {
    case TailKind::PowerLaw:
        return tb.K() * std::pow(z, -tb.alpha()) / tb.alpha();
    case TailKind::PowerLawLog: {
        const auto& t = *tb.log_terms();
        const double beta = tb.alpha();
        return tb.K() * std::pow(z, -beta) *
               ((t.a * std::log(z) + t.b) / beta + t.a / (beta * beta));
    }
    case TailKind::Weibull: {
        const double u = z / tb.c();
        if (tb.alpha() == 2.0) {
            return tb.K() / (2.0 * u * u) * std::exp(-u * u);
        }
        return tb.K() / tb.alpha() * expint_e1(std::pow(u, tb.alpha()));
    }
    }
    return 0.0;
}

}  // namespace

TailBound TailBound::power_law(double K, double alpha) {
    require_positive(K, "K");
    require_positive(alpha, "alpha");
    TailBound t;
    t.kind_ = TailKind::PowerLaw;
    t.K_ = K;
    t.alpha_ = alpha;
    return t;
}

TailBound TailBound::power_law_log(double A, double beta, double a, double b, double cap_below) {
    require_positive(A, "A");
    require_positive(beta, "beta");
    if (a < 0.0) throw std::invalid_argument("log coefficient a must be nonnegative");
    if (cap_below < 0.0) throw std::invalid_argument("cap_below must be nonnegative");
    TailBound t;
    t.kind_ = TailKind::PowerLawLog;
    t.K_ = A;
    t.alpha_ = beta;
    t.log_ = LogShiftTerms{a, b, cap_below};
    return t;
}

TailBound TailBound::weibull(double L, double c, double beta) {
    require_positive(L, "L");
    require_positive(c, "c");
    require_positive(beta, "beta");
    TailBound t;
    t.kind_ = TailKind::Weibull;
    t.K_ = L;
    t.c_ = c;
    t.alpha_ = beta;
    return t;
}

TailBound TailBound::zero() {
    TailBound t;
    t.kind_ = TailKind::PowerLaw;
    t.K_ = 0.0;
    t.alpha_ = 1.0;
    return t;
}

double TailBound::raw(double sigma) const {
    if (is_zero()) return 0.0;
    switch (kind_) {
    case TailKind::PowerLaw:
        return K_ * std::pow(sigma, -alpha_);
    case TailKind::PowerLawLog:
        if (sigma < log_->cap_below) return 1.0;
        return K_ * std::pow(sigma, -alpha_) * (log_->a * std::log(sigma) + log_->b);
    case TailKind::Weibull:
        return K_ * std::exp(-std::pow(sigma / c_, alpha_));
    }
    return 1.0;
}

double TailBound::operator()(double sigma) const {
    if (!(sigma > 0.0)) throw std::domain_error("tail bound evaluated at sigma <= 0");
    const double v = raw(sigma);
    if (std::isnan(v)) return 1.0;
    return std::min(1.0, std::max(0.0, v));
}

TailFunction TailBound::as_function() const {
    return [tb = *this](double sigma) { return sigma > 0.0 ? tb(sigma) : 1.0; };
}

std::string TailBound::describe() const {
    std::ostringstream os;
    os.precision(6);
    switch (kind_) {
    case TailKind::PowerLaw:
        os << K_ << "*s^-" << alpha_;
        break;
    case TailKind::PowerLawLog:
        os << K_ << "*s^-" << alpha_ << "*(" << log_->a << "*log s + " << log_->b << ")";
        break;
    case TailKind::Weibull:
        os << K_ << "*exp(-(s/" << c_ << ")^" << alpha_ << ")";
        break;
    }
    return os.str();
}

double evaluate(const TailBound& tb, double sigma) { return tb(sigma); }

TailBound lower_power(const TailBound& tb, double alpha_prime) {
    if (tb.kind() != TailKind::PowerLaw) throw std::invalid_argument("lower_power needs a power law");
    require_positive(alpha_prime, "alpha'");
    if (alpha_prime >= tb.alpha()) {
        throw std::invalid_argument("lower_power: alpha' must be below alpha");
    }
    if (tb.is_zero()) return tb;
    return TailBound::power_law(std::pow(tb.K(), alpha_prime / tb.alpha()), alpha_prime);
}

TailBound remove_log(double beta, double beta_prime) {
    require_positive(beta_prime, "beta'");
    if (beta_prime >= beta) throw std::invalid_argument("remove_log: beta' must be below beta");
    return TailBound::power_law(1.0 / (std::numbers::e * (beta - beta_prime)), beta_prime);
}

TailBound remove_shift(const TailBound& tb, double sigma0) {
    if (tb.kind() != TailKind::PowerLaw) throw std::invalid_argument("remove_shift needs a power law");
    if (sigma0 < 0.0) throw std::invalid_argument("remove_shift: sigma0 must be nonnegative");
    const double a = tb.alpha();
    const double K = std::pow(2.0, positive_part(a - 1.0)) * (tb.K() + std::pow(sigma0, a));
    if (K == 0.0) return TailBound::zero();
    return TailBound::power_law(K, a);
}

SumMinimum minimize_sum(std::span<const TailBound> terms) {
    if (terms.empty()) throw std::invalid_argument("minimize_sum: empty term list");
    // Zero terms carry no weight; the nonzero ones must share an exponent.
    std::optional<double> alpha;
    for (const auto& t : terms) {
        if (t.kind() != TailKind::PowerLaw) {
            throw std::invalid_argument("minimize_sum: terms must be power laws");
        }
        if (t.is_zero()) continue;
        if (alpha && *alpha != t.alpha()) {
            throw std::invalid_argument("minimize_sum: mismatched exponents");
        }
        alpha = t.alpha();
    }
    if (!alpha) {
        std::vector<double> even(terms.size(), 1.0 / static_cast<double>(terms.size()));
        return {TailBound::zero(), std::move(even)};
    }
    std::vector<double> weights;
    weights.reserve(terms.size());
    double acc = 0.0;
    for (const auto& t : terms) {
        const double w = t.is_zero() ? 0.0 : std::pow(t.K(), 1.0 / (1.0 + *alpha));
        weights.push_back(w);
        acc += w;
    }
    for (auto& w : weights) w /= acc;
    return {TailBound::power_law(std::pow(acc, 1.0 + *alpha), *alpha), std::move(weights)};
}

double tail_integral(const TailBound& eps, double z) {
    require_positive(z, "z");
    if (eps.is_zero()) return 0.0;
    const double x0 = cap_point(eps);
    if (z < x0) return std::log(x0 / z) + raw_integral(eps, x0);
    return raw_integral(eps, z);
}

double geometric_sum_bound_est1(const TailBound& eps, double gamma, double c, double H,
                                double sigma) {
    if (!(gamma > 1.0)) throw std::invalid_argument("est1: gamma must exceed 1");
    if (!(H > 0.0 && H < 1.0)) throw std::invalid_argument("est1: H must lie in (0,1)");
    require_positive(c, "c");
    require_positive(sigma, "sigma");
    const double z = std::pow(c, H) * std::pow(sigma, 1.0 - H) / std::pow(gamma, H * (1.0 - H));
    return tail_integral(eps, z) / (H * (1.0 - H) * std::log(gamma));
}

double geometric_sum_bound_est2(const TailBound& eps, double gamma, double tau, double c,
                                double sigma) {
    if (!(gamma > 1.0)) throw std::invalid_argument("est2: gamma must exceed 1");
    require_positive(tau, "tau");
    require_positive(c, "c");
    if (sigma < c * tau / (gamma - 1.0)) {
        throw PreconditionError("est2: sigma below c*tau/(gamma-1); bound not guaranteed");
    }
    const double z = sigma + c * tau;
    return (eps(z) * std::log((gamma - 1.0) * z / (c * tau)) + tail_integral(eps, z)) /
           std::log(gamma);
}

}  // namespace htnc
