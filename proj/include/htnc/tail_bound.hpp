#pragma once

// Violation-probability bounds and the algebra used to turn composed bounds
// into explicit constants.
//
// A TailBound stores a formula eps(sigma). Evaluation always reports
// min(1, eps(sigma)); the stored constants are never capped so that
// composition stays exact.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace htnc {

enum class TailKind { PowerLaw, PowerLawLog, Weibull };

// Coefficients of A * sigma^-beta * (a * log(sigma) + b). Below cap_below
// the bound is reported as 1.
struct LogShiftTerms {
    double a = 0.0;
    double b = 0.0;
    double cap_below = 0.0;
};

// Capped evaluator of an arbitrary nonincreasing tail, used for inf-forms
// that have no closed expression.
using TailFunction = std::function<double(double)>;

class TailBound {
public:
    // K * sigma^-alpha
    static TailBound power_law(double K, double alpha);
    // A * sigma^-beta * (a log sigma + b), reported as 1 below cap_below
    static TailBound power_law_log(double A, double beta, double a, double b,
                                   double cap_below = 0.0);
    // L * exp(-(sigma / c)^beta)
    static TailBound weibull(double L, double c, double beta);
    // Identically zero; the tail of a deterministic (lossless) element.
    static TailBound zero();

    TailKind kind() const { return kind_; }
    // Prefactor: K for power laws, A for the log form, L for Weibull.
    double K() const { return K_; }
    // Decay exponent: alpha, beta, or the Weibull shape.
    double alpha() const { return alpha_; }
    // Weibull scale; zero for the power-law kinds.
    double c() const { return c_; }
    const std::optional<LogShiftTerms>& log_terms() const { return log_; }
    bool is_zero() const { return K_ == 0.0; }

    // Uncapped formula value.
    double raw(double sigma) const;
    // min(1, formula); throws std::domain_error for sigma <= 0.
    double operator()(double sigma) const;

    TailFunction as_function() const;
    std::string describe() const;

private:
    TailBound() = default;

    TailKind kind_ = TailKind::PowerLaw;
    double K_ = 0.0;
    double alpha_ = 1.0;
    double c_ = 0.0;
    std::optional<LogShiftTerms> log_;
};

double evaluate(const TailBound& tb, double sigma);

// K s^-a <= K^(a'/a) s^-a' wherever K s^-a <= 1.
TailBound lower_power(const TailBound& tb, double alpha_prime);

// s^-beta log s <= 1/(e (beta - beta')) s^-beta', returned as a power law.
TailBound remove_log(double beta, double beta_prime);

// K (s - s0)^-a <= 2^[a-1]+ (K + s0^a) s^-a wherever the left side is <= 1.
TailBound remove_shift(const TailBound& tb, double sigma0);

struct SumMinimum {
    TailBound bound;
    // Optimal share of sigma assigned to each term; sums to one.
    std::vector<double> split;
};

// Exact min over s_1 + ... + s_n = s of sum_j K_j s_j^-alpha for a common
// alpha: (sum_j K_j^(1/(1+alpha)))^(1+alpha) s^-alpha.
SumMinimum minimize_sum(std::span<const TailBound> terms);

// Integral of eps(x)/x over [z, inf) for the capped tail. Gaussian tails
// (Weibull with shape 2) use the bound L c^2/(2 z^2) exp(-(z/c)^2).
double tail_integral(const TailBound& eps, double z);

// Bound on sum_k eps((sigma + c x_k) / x_k^H) over x_k = tau gamma^k, k in Z.
// The result does not depend on tau.
double geometric_sum_bound_est1(const TailBound& eps, double gamma, double c, double H,
                                double sigma);

// Bound on sum_{k>=1} eps(sigma + c y_k) with y_0 = 0, y_k = tau + gamma y_{k-1}.
// Requires sigma >= c tau / (gamma - 1).
double geometric_sum_bound_est2(const TailBound& eps, double gamma, double tau, double c,
                                double sigma);

inline double positive_part(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace htnc
