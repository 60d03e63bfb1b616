#include "doctest.h"

#include "../tools/cli.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "htnc");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Run r;
    r.code = htnc::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string temp_file(const std::string& name, const std::string& content) {
    const auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream os(p);
    os << content;
    return p.string();
}

const char* kPareto = R"({
    "through": {"pareto": {"rate_bps": 75e6, "b_bytes": 150, "alpha": 1.6}},
    "nodes": [{"C_bps": 100e6, "packetizer": {"alpha_p": 1.6, "b_bytes": 150}}]
})";

// Values in column col of the data rows following the given header line.
std::vector<double> column(const std::string& text, const std::string& header, int col) {
    std::istringstream is(text);
    std::string line;
    bool in = false;
    std::vector<double> out;
    while (std::getline(is, line)) {
        if (line == header) {
            in = true;
            continue;
        }
        if (!in) continue;
        if (line.empty() || line[0] == '#') break;
        std::istringstream ls(line);
        std::string cell;
        for (int i = 0; i <= col; ++i) std::getline(ls, cell, ',');
        out.push_back(cell.empty() ? -1.0 : std::stod(cell));
    }
    return out;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors") {
    CHECK(run({}).code == 2);
    CHECK(run({"envelope", "stable-tail", "--alpha", "1.6"}).code == 2);
    CHECK(run({"envelope", "pareto-gclt", "--alpha", "1.6", "--b-bytes", "150"}).code == 2);
    CHECK(run({"envelope", "pareto-gclt", "--alpha", "1.6", "--b-bytes", "150", "--rate-mbps", "75",
               "--lambda-pps", "10"})
              .code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("stable envelopes: quantile curves dominate tail curves") {
    const std::vector<std::string> common = {"--r-mbps", "75", "--alpha", "1.6", "--hurst", "0.8", "--b-mbps", "60",
                                             "--eps", "1e-1,1e-2,1e-3"};
    std::vector<std::string> a = {"envelope", "stable-tail"};
    a.insert(a.end(), common.begin(), common.end());
    std::vector<std::string> b = {"envelope", "stable-quantile", "--samples", "200000"};
    b.insert(b.end(), common.begin(), common.end());
    auto ra = run(a), rb = run(b);
    REQUIRE(ra.code == 0);
    REQUIRE(rb.code == 0);
    const std::string hdr = "t_ms,bits_eps_0.1,bits_eps_0.01,bits_eps_0.001";
    for (int col = 1; col <= 3; ++col) {
        auto ta = column(ra.out, hdr, col), tb = column(rb.out, hdr, col);
        REQUIRE(ta.size() == 41);
        REQUIRE(tb.size() == 41);
        for (std::size_t i = 0; i < ta.size(); ++i) CHECK(tb[i] >= ta[i]);
    }
    CHECK(ra.out.rfind("# htnc envelope stable-tail", 0) == 0);
}

TEST_CASE("pareto envelope and report") {
    const auto report = (std::filesystem::temp_directory_path() / "htnc_report.json").string();
    auto r = run({"envelope", "pareto-gclt", "--alpha", "1.6", "--b-bytes", "150", "--rate-mbps", "75", "--eps",
                  "1e-3", "--report", report});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("H=0.625") != std::string::npos);
    std::ifstream is(report);
    const auto j = nlohmann::json::parse(is);
    CHECK(j["mean_bytes"].get<double>() == doctest::Approx(400));
    CHECK(j["envelope"]["H"].get<double>() == doctest::Approx(0.625));
}

TEST_CASE("bound: nested in N with quantiles and lower bounds") {
    const auto topo = temp_file("htnc_pareto.json", kPareto);
    auto r = run({"bound", "--topology", topo, "--nodes", "1,2,4,8", "--eps", "0.1,0.01,1"});
    REQUIRE(r.code == 0);
    auto w = column(r.out, "N,eps,w_upper_s,w_lower_s", 2);
    auto lo = column(r.out, "N,eps,w_upper_s,w_lower_s", 3);
    REQUIRE(w.size() == 12);
    for (int n = 1; n < 4; ++n) CHECK(w[3 * n] > w[3 * (n - 1)]);
    CHECK(lo[0] > 0);
    CHECK(lo[0] < w[0]);
    CHECK(lo[2] == -1.0);  // no lower bound at eps = 1
    CHECK(r.out.find("N,w_s,prob_upper,prob_closed") != std::string::npos);
}

TEST_CASE("bound: instability exit code") {
    const auto topo = temp_file("htnc_hot.json", R"({
        "through": {"pareto": {"rate_bps": 75e6, "b_bytes": 150, "alpha": 1.6}},
        "nodes": [{"C_bps": 70e6}]
    })");
    auto r = run({"bound", "--topology", topo});
    CHECK(r.code == 3);
    CHECK(r.err.find("node 0") != std::string::npos);
    CHECK(run({"bound", "--topology", "/nonexistent.json"}).code == 4);
    const auto bad = temp_file("htnc_bad_topo.json", "{");
    CHECK(run({"bound", "--topology", bad}).code == 4);
}

TEST_CASE("simulate is deterministic") {
    const auto topo = temp_file("htnc_pareto.json", kPareto);
    auto a = run({"simulate", "--config", topo, "--packets", "20000", "--seed", "7"});
    auto b = run({"simulate", "--config", topo, "--packets", "20000", "--seed", "7"});
    auto c = run({"simulate", "--config", topo, "--packets", "20000", "--seed", "8"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out != c.out);
    CHECK(a.out.find("w_s,prob,count,reliable_flag") != std::string::npos);
    CHECK(run({"simulate", "--config", topo, "--packets", "100", "--warmup", "500"}).code == 3);
    CHECK(run({"simulate", "--config", topo, "--packets", "100", "--warmup", "soon"}).code == 2);
}

TEST_CASE("scale") {
    const auto topo = temp_file("htnc_pareto.json", kPareto);
    auto r = run({"scale", "--topology", topo, "--ns", "4,8,16", "--eps", "1e-3"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("# slope_upper=") != std::string::npos);
    CHECK(r.out.find("# slope_lower=2.666666") != std::string::npos);
    auto one = run({"scale", "--topology", topo, "--ns", "2"});
    REQUIRE(one.code == 0);
    CHECK(column(one.out, "N,w_upper_s,w_lower_s", 0).size() == 1);
    CHECK(one.out.find("slope") == std::string::npos);
}

TEST_CASE("trace tools") {
    const auto trace = (std::filesystem::temp_directory_path() / "htnc_trace.csv").string();
    auto g = run({"gen-trace", "--alpha", "1.6", "--b-bytes", "150", "--rate-mbps", "75", "--packets", "20000",
                  "--out", trace});
    REQUIRE(g.code == 0);
    auto f = run({"envelope", "trace-fit", "--trace", trace, "--r-mbps", "75", "--alpha", "1.6", "--hurst",
                  "0.625", "--windows-ms", "10,100"});
    REQUIRE(f.code == 0);
    CHECK(f.out.find(" K=") != std::string::npos);
    auto d = run({"envelope", "deterministic-trace", "--trace", trace, "--horizon-ms", "10", "--step-ms", "1"});
    REQUIRE(d.code == 0);
    CHECK(column(d.out, "t_ms,bits", 1).size() == 10);
    CHECK(run({"envelope", "trace-fit", "--trace", trace, "--ccdf", trace, "--r-mbps", "75", "--alpha", "1.6",
               "--hurst", "0.6"})
              .code == 2);
    auto fx = run({"envelope", "trace-fit", "--ccdf", HTNC_FIXTURE_DIR "/backbone_y_ccdf.csv", "--r-mbps", "465",
                   "--alpha", "1.98", "--hurst", "0.93"});
    REQUIRE(fx.code == 0);
    CHECK(fx.out.find(" K=122") != std::string::npos);
}

}  // TEST_SUITE
