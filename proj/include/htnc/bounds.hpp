#pragma once

#include "htnc/envelopes.hpp"
#include "htnc/service.hpp"
#include "htnc/tail_bound.hpp"

#include <functional>
#include <optional>
#include <ostream>
#include <span>

namespace htnc {

struct BacklogBound {
    TailBound tail = TailBound::zero();
};

// P(B > sigma) at a link of rate C.
BacklogBound backlog_bound(const HtssEnvelope& env, double C);

// M (R w)^-beta_prime
struct ClosedDelayForm {
    double M = 0.0;
    double R = 0.0;
    double beta_prime = 0.0;

    double operator()(double w) const;
    // Exact inverse: (M / eps)^(1/beta') / R.
    double quantile(double eps) const;
};

// P(W > w) <= inf over sigma1 + sigma2 = R w of arrival(sigma1) + service(sigma2),
// where arrival is the tail of a sample-path envelope of rate below R and
// service the tail of a service curve of rate R.
class DelayBound {
public:
    DelayBound(double R, TailFunction arrival, TailFunction service,
               std::optional<ClosedDelayForm> closed = std::nullopt);

    double R() const { return R_; }
    // Two-term bound minimized over the split, capped at 1.
    double operator()(double w) const;
    // The minimizing sigma1 for the given delay.
    double best_split(double w) const;
    // Two-term bound at a fixed share sigma1 = share * R w.
    double at_share(double w, double share) const;
    const std::optional<ClosedDelayForm>& closed_form() const { return closed_; }
    // Closed form capped at 1, or the two-term value when no closed form exists.
    double closed(double w) const;

    // Optional named split rule, sigma1 = rule(w) * R w.
    void set_fallback_share(std::function<double(double)> rule) { fallback_ = std::move(rule); }
    bool has_fallback() const { return static_cast<bool>(fallback_); }
    double fallback(double w) const;

    TailFunction as_function() const;

private:
    double R_;
    TailFunction arrival_;
    TailFunction service_;
    std::optional<ClosedDelayForm> closed_;
    std::function<double(double)> fallback_;
};

// Delay at a node offering sc to a flow with envelope env.
DelayBound delay_bound(const HtssEnvelope& env, const HtServiceCurve& sc);

inline constexpr double kDelaySearchMin = 1e-9;
inline constexpr double kDelaySearchMax = 1e9;

// Smallest w in [1e-9, w_max] seconds with bound(w) <= eps (strictly < 1 for
// eps = 1), to 1e-4 relative. Throws std::range_error if none exists.
double delay_quantile(const TailFunction& bound, double eps, double w_max = kDelaySearchMax);
double delay_quantile(const DelayBound& db, double eps, double w_max = kDelaySearchMax);

// Lower bound on the eps-quantile of the delay of a Pareto source crossing N
// nodes without cross traffic. b_seconds is the transmission time of the
// minimum packet size; lambda_pps the packet rate.
double lower_bound_quantile_pareto(int N, double b_seconds, double alpha, double lambda_pps,
                                   double eps);

// CSV with columns w_seconds,prob_bound.
void write_bound_csv(std::ostream& os, const TailFunction& bound, std::span<const double> ws);

// n log-spaced points from lo to hi inclusive.
std::vector<double> log_space(double lo, double hi, std::size_t n);

}  // namespace htnc
