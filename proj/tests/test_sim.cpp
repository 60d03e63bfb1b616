#include "doctest.h"
#include "oracles.hpp"

#include "htnc/errors.hpp"
#include "htnc/sim.hpp"

#include <cmath>
#include <sstream>

using namespace htnc;
using namespace htnc::sim;

namespace {

TandemConfig replay_config(std::vector<double> times, std::vector<double> bits, double C, int N = 1) {
    TandemConfig cfg;
    cfg.N = N;
    cfg.C = C;
    cfg.replay = TraceSource{std::move(times), std::move(bits)};
    return cfg;
}

TandemConfig pareto_config(int N, std::uint64_t seed = 1) {
    TandemConfig cfg;
    cfg.N = N;
    cfg.C = 100e6;
    cfg.source = pareto_from_data_rate(75e6, 150, 1.6);
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_SUITE("sim") {

TEST_CASE("hand examples") {
    auto one = run_tandem(replay_config({0.0}, {8000}, 1e6), 1);
    CHECK(one.delay.samples[0] == doctest::Approx(8e-3));

    // two back-to-back packets, 8 ms transmission, 3 ms apart
    auto two = run_tandem(replay_config({0.0, 3e-3, 100.0}, {8000, 8000, 1}, 1e6), 3);
    CHECK(two.delay.samples[1] == doctest::Approx(2 * 8e-3 - 3e-3));

    // fixed sizes through three identical nodes: the first node shapes the
    // flow, later nodes add one transmission each
    auto three = run_tandem(replay_config({0.0, 1e-3, 100.0}, {8000, 8000, 1}, 1e6, 3), 3);
    CHECK(three.delay.samples[0] == doctest::Approx(24e-3));
    CHECK(three.delay.samples[1] == doctest::Approx(8e-3 - 1e-3 + 24e-3));
}

TEST_CASE("ccdf") {
    auto c = ccdf({1, 2, 3});
    CHECK(c.exceedance(2.5) == doctest::Approx(1.0 / 3));
    CHECK(c.exceedance(0.5) == 1.0);
    CHECK(c.exceedance(3) == 0.0);
    auto flat = ccdf({4, 4, 4});
    CHECK(flat.rows.size() == 1);
    CHECK(flat.rows[0].p == 0.0);
    CHECK_THROWS_AS(ccdf({}), std::invalid_argument);
    std::vector<double> many(1000);
    for (std::size_t i = 0; i < many.size(); ++i) many[i] = static_cast<double>(i);
    auto m = ccdf(many);
    CHECK(m.rows[899].reliable == true);
    CHECK(m.rows[900].reliable == false);
    CHECK(m.quantile(0.1) == 899);
    for (std::size_t i = 1; i < m.rows.size(); ++i) CHECK(m.rows[i].p <= m.rows[i - 1].p);
}

TEST_CASE("Lindley equivalence at one node") {
    auto cfg = pareto_config(1, 3);
    auto res = run_tandem(cfg, 10000);
    const double lambda = cfg.source.lambda_pps;
    // same seed, sizes drawn by inverting uniforms in (0,1)
    std::mt19937_64 rng(3);
    std::vector<double> arr(10000), svc(10000);
    for (std::size_t i = 0; i < arr.size(); ++i) {
        arr[i] = i / lambda;
        const double u = ((rng() >> 11) + 0.5) * 0x1.0p-53;
        svc[i] = cfg.source.b_bits() * std::pow(u, -1 / 1.6) / cfg.C;
    }
    auto ref = oracle::lindley_delays(arr, svc);
    for (std::size_t i = 0; i < arr.size(); ++i) {
        CHECK(std::abs(res.delay.samples[i] - ref[i]) <= 1e-9 * ref[i]);
    }
}

TEST_CASE("determinism, warmup and stability") {
    auto a = run_tandem(pareto_config(2, 7), 20000);
    auto b = run_tandem(pareto_config(2, 7), 20000);
    CHECK(a.delay.samples == b.delay.samples);
    auto c = run_tandem(pareto_config(2, 8), 20000);
    CHECK(a.delay.samples != c.delay.samples);

    auto w = pareto_config(1, 7);
    w.warmup_packets = 500;
    auto r = run_tandem(w, 2000);
    CHECK(r.delay.samples.size() == 1500);
    w.warmup_packets = 5000;
    CHECK_THROWS_AS(run_tandem(w, 2000), std::invalid_argument);
    CHECK(default_warmup(1000) == 10000);
    CHECK(default_warmup(10000000) == 100000);

    auto hot = pareto_config(1);
    hot.C = 70e6;
    CHECK_THROWS_AS(run_tandem(hot, 100), InstabilityError);
    auto cross = pareto_config(2);
    cross.cross = {std::nullopt, pareto_from_data_rate(30e6, 150, 1.6)};
    try {
        run_tandem(cross, 100);
        FAIL("expected instability");
    } catch (const InstabilityError& e) {
        CHECK(e.node() == 1);
    }
}

TEST_CASE("conservation and monotonicity in N") {
    auto cfg = pareto_config(1, 5);
    cfg.cross = {pareto_from_data_rate(10e6, 150, 1.6)};
    auto r = run_tandem(cfg, 50000);
    CHECK(r.nodes[0].departed_bits == doctest::Approx(r.nodes[0].arrived_bits));
    CHECK(r.nodes[0].utilization > 0.5);
    CHECK(r.nodes[0].utilization < 1.0);
    for (const auto& row : r.nodes[0].backlog.rows) CHECK(row.w >= 0.0);

    std::vector<double> prev;
    for (int N : {1, 2, 4}) {
        auto x = run_tandem(pareto_config(N, 9), 20000);
        if (!prev.empty())
            for (std::size_t i = 0; i < prev.size(); ++i) CHECK(x.delay.samples[i] >= prev[i] - 1e-12);
        prev = x.delay.samples;
    }
}

TEST_CASE("Pareto single node ccdf slope") {
    auto res = run_tandem(pareto_config(1, 11), 1000000);
    const auto& c = res.delay.ccdf;
    // fit over the reliable region between p = 1e-1 and p = 1e-4
    std::vector<double> lx, ly;
    for (const auto& row : c.rows) {
        if (row.reliable && row.p <= 1e-1 && row.p >= 1e-4) {
            lx.push_back(std::log(row.w));
            ly.push_back(std::log(row.p));
        }
    }
    REQUIRE(lx.size() > 10);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = lx.size();
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope >= -0.75);
    CHECK(slope <= -0.45);
    CHECK(res.delay.max_reliable_eps == doctest::Approx(1e-4));
}

TEST_CASE("ccdf csv") {
    auto c = ccdf({1, 2, 2, 3, 5, 8, 13, 21});
    std::ostringstream all;
    write_ccdf_csv(all, c);
    CHECK(all.str().rfind("w_s,prob,count,reliable_flag\n1,0.875,7,0\n", 0) == 0);
    std::ostringstream thin;
    std::vector<double> many(100000);
    for (std::size_t i = 0; i < many.size(); ++i) many[i] = static_cast<double>(i);
    write_ccdf_csv(thin, ccdf(many), 50);
    std::size_t lines = 0;
    for (char ch : thin.str()) lines += ch == '\n';
    CHECK(lines <= 51);
    CHECK(lines > 20);
}

}  // TEST_SUITE
