#include "doctest.h"
#include "oracles.hpp"

#include "htnc/bounds.hpp"
#include "htnc/errors.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace htnc;

namespace {

// Pareto 75 Mbps, b = 150 B, alpha = 1.6 on a 100 Mbps link with its packetizer.
struct Pareto75 {
    ParetoSource src = pareto_from_data_rate(75e6, 150, 1.6);
    HtssEnvelope env = envelope_from_pareto(src);
    HtServiceCurve sc = packetizer_curve(100e6, pareto_packetizer(150, 1.6, 0.75));
};

}  // namespace

TEST_SUITE("bounds") {

TEST_CASE("backlog bound") {
    HtssEnvelope e{1, 0.8, 1.6, 3};
    auto b = backlog_bound(e, 2);
    CHECK(b.tail.alpha() == doctest::Approx(0.32));
    CHECK(b.tail.alpha() < 1);
    HtssEnvelope e2 = e;
    e2.K = 6;
    CHECK(backlog_bound(e2, 2).tail.K() == doctest::Approx(2 * b.tail.K()));
    // same as the sample-path tail with mu = C - r
    auto sp = sample_path_envelope(e, 1.0);
    for (double s : {1.0, 1e3, 1e6}) CHECK(b.tail(s) == doctest::Approx(sp.tail(s)));
    CHECK_THROWS_AS(backlog_bound(e, 1), InstabilityError);
}

TEST_CASE("closed form with equal terms") {
    // K~ = L and equal exponents: M = 2^(1+beta) K~
    HtssEnvelope e{1, 0.5, 1.6, 1};
    const double kt = sample_path_envelope(e, 1).tail.K();
    HtServiceCurve sc{2, TailBound::power_law(kt, 0.8)};
    auto db = delay_bound(e, sc);
    REQUIRE(db.closed_form());
    CHECK(db.closed_form()->M == doctest::Approx(std::pow(2, 1.8) * kt));
    CHECK(db.closed_form()->beta_prime == doctest::Approx(0.8));
}

TEST_CASE("two-term bound never exceeds the closed form") {
    Pareto75 p;
    auto db = delay_bound(p.env, p.sc);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> lw(-4, 4);
    for (int i = 0; i < 50; ++i) {
        const double w = std::pow(10, lw(rng));
        CHECK(db(w) <= db.closed(w) * (1 + 1e-12));
        // and it is no worse than a dense grid over the split
        const double total = db.R() * w;
        const double ref = oracle::split_grid_min([&](double s) { return db.at_share(w, s / total) - 0.0; },
                                                  [](double) { return 0.0; }, total, 4000);
        CHECK(db(w) <= std::min(1.0, ref) * (1 + 1e-6));
    }
}

TEST_CASE("Pareto single node decays like w^-0.6") {
    Pareto75 p;
    auto db = delay_bound(p.env, p.sc);
    CHECK(db.closed_form()->beta_prime == doctest::Approx(0.6));
    const double w0 = delay_quantile(db, 0.5);
    const double w1 = w0 * 1e3;
    const double slope = std::log(db(w1) / db(w0)) / std::log(w1 / w0);
    CHECK(slope == doctest::Approx(-0.6).epsilon(0.02 / 0.6));
    // asymptotic slope over the last decade
    const double s2 = std::log(db(1e4) / db(1e3)) / std::log(10.0);
    CHECK(std::abs(s2 + 0.6) <= 0.03 * 0.6);
    CHECK_THROWS_AS(delay_bound(p.env, HtServiceCurve{70e6, p.sc.tail}), InstabilityError);
}

TEST_CASE("delay quantile inversion") {
    ClosedDelayForm f{5.0, 1e6, 0.6};
    TailFunction tf = [f](double w) { return f(w); };
    for (double eps : {0.3, 1e-2, 1e-4}) {
        CHECK(delay_quantile(tf, eps) == doctest::Approx(f.quantile(eps)).epsilon(1e-4));
    }
    // eps = 1: where the capped bound first drops below 1
    CHECK(delay_quantile(tf, 1.0) == doctest::Approx(f.quantile(1.0)).epsilon(1e-4));
    Pareto75 p;
    auto db = delay_bound(p.env, p.sc);
    const double a = delay_quantile(db, 1e-1), b = delay_quantile(db, 1e-2), c = delay_quantile(db, 1e-3);
    CHECK(a < b);
    CHECK(b < c);
    CHECK(db(a) <= 1e-1);
    CHECK(db(a * (1 - 1e-3)) > 1e-1);
    TailFunction never = [](double) { return 0.5; };
    CHECK_THROWS_AS(delay_quantile(never, 0.1), std::range_error);
    CHECK_THROWS_AS(delay_quantile(tf, 0.0), std::invalid_argument);
}

TEST_CASE("lower bound on the delay quantile") {
    const double alpha = 1.6;
    auto src = pareto_from_data_rate(75e6, 150, alpha);
    const double bs = 1200.0 / 100e6;
    const double w1 = lower_bound_quantile_pareto(1, bs, alpha, src.lambda_pps, 1e-2);
    const double w2 = lower_bound_quantile_pareto(2, bs, alpha, src.lambda_pps, 1e-2);
    CHECK(w2 / w1 == doctest::Approx(std::pow(2.0, 8.0 / 3.0)));
    const double ref = std::pow(bs, alpha / (alpha - 1)) /
                       std::pow((alpha - 1) / src.lambda_pps * -std::log(1 - 1e-2), 1 / (alpha - 1));
    CHECK(w1 == doctest::Approx(ref));
    CHECK(w1 == doctest::Approx(7.25e-3).epsilon(0.01));
    CHECK_THROWS_AS(lower_bound_quantile_pareto(0, bs, alpha, 1, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(lower_bound_quantile_pareto(1, bs, alpha, 1, 1.0), std::invalid_argument);
}

TEST_CASE("sandwich with the upper quantile at one node") {
    Pareto75 p;
    auto db = delay_bound(p.env, p.sc);
    for (double eps : {1e-1, 3e-2, 1e-2}) {
        CHECK(lower_bound_quantile_pareto(1, 1200 / 100e6, 1.6, p.src.lambda_pps, eps) < delay_quantile(db, eps));
    }
}

TEST_CASE("bound csv and log space") {
    auto ws = log_space(1e-3, 1e3, 7);
    REQUIRE(ws.size() == 7);
    CHECK(ws.front() == doctest::Approx(1e-3));
    CHECK(ws[3] == doctest::Approx(1.0));
    CHECK(ws.back() == doctest::Approx(1e3));
    std::ostringstream os;
    write_bound_csv(os, [](double w) { return std::min(1.0, 1 / w); }, ws);
    CHECK(os.str().rfind("w_seconds,prob_bound\n", 0) == 0);
    CHECK(os.str().find("1000,0.001") != std::string::npos);
}

}  // TEST_SUITE
