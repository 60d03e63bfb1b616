#include "cli.hpp"

#include "htnc/bounds.hpp"
#include "htnc/envelopes.hpp"
#include "htnc/errors.hpp"
#include "htnc/io.hpp"
#include "htnc/network.hpp"
#include "htnc/sim.hpp"
#include "htnc/stable.hpp"
#include "htnc/traces.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace htnc::cli {

namespace {

using json = nlohmann::json;

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kDomain = 3;
constexpr int kIo = 4;

// Writes to a file when a path is given, to the fallback stream otherwise.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw IoError("cannot write " + path);
            os_ = file_.get();
        }
        os_->precision(10);
    }
    std::ostream& operator*() { return *os_; }
    void finish() {
        os_->flush();
        if (!*os_) throw IoError("write failed");
    }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* os_;
};

std::vector<double> default_t_ms() { return log_space(0.1, 1000.0, 41); }

void envelope_table(std::ostream& os, const std::function<double(double, double)>& G,
                    const std::vector<double>& eps, const std::vector<double>& t_ms) {
    os << "t_ms";
    for (double e : eps) os << ",bits_eps_" << e;
    os << '\n';
    for (double t : t_ms) {
        os << t;
        for (double e : eps) os << ',' << G(t / 1000.0, e);
        os << '\n';
    }
}

void write_report(const std::string& path, const json& report) {
    if (path.empty()) return;
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path);
    os << report.dump(2) << '\n';
    if (!os) throw IoError("write failed: " + path);
}

struct EnvelopeArgs {
    std::vector<double> eps{1e-1, 1e-2, 1e-3};
    std::vector<double> t_ms;
    std::string out;
    std::string report;
};

void add_envelope_common(CLI::App* sub, EnvelopeArgs& a) {
    sub->add_option("--eps", a.eps, "violation probabilities")->delimiter(',')->capture_default_str();
    sub->add_option("--t-ms", a.t_ms, "interval lengths in ms (default: 41 log-spaced from 0.1 to 1000)")
        ->delimiter(',');
    sub->add_option("--out", a.out, "CSV output file (default stdout)");
    sub->add_option("--report", a.report, "JSON report file");
}

void emit_htss(std::ostream& out, const std::string& header, const HtssEnvelope& env, EnvelopeArgs& a,
               json report) {
    for (double e : a.eps) {
        if (!(e > 0.0 && e < 1.0)) throw std::invalid_argument("eps values must lie in (0,1)");
    }
    if (a.t_ms.empty()) a.t_ms = default_t_ms();
    Sink sink(a.out, out);
    *sink << header << '\n';
    *sink << "# r_bps=" << env.r << " H=" << env.H << " alpha=" << env.alpha << " K=" << env.K << '\n';
    envelope_table(*sink, [&](double t, double e) { return env.G(t, env.sigma_at(e)); }, a.eps, a.t_ms);
    sink.finish();
    report["envelope"] = io::envelope_to_json(env);
    write_report(a.report, report);
}

std::string header_of(int argc, const char* const* argv) {
    std::string h = "# htnc";
    for (int i = 1; i < argc; ++i) h += std::string(" ") + argv[i];
    return h;
}

std::optional<stable::QuantileTable> load_cache(const std::string& path, double alpha,
                                                std::size_t samples, std::uint64_t seed) {
    if (path.empty() || !std::filesystem::exists(path)) return std::nullopt;
    auto qt = stable::QuantileTable::load_csv(path);
    if (std::abs(qt.alpha() - alpha) > 1e-12 || qt.sample_count() != samples || qt.seed() != seed) {
        return std::nullopt;
    }
    return qt;
}

std::vector<int> parse_ns(const std::vector<int>& ns) {
    for (int n : ns) {
        if (n < 1) throw std::invalid_argument("node counts must be at least 1");
    }
    return ns;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Delay and backlog bounds for heavy-tailed self-similar traffic", "htnc"};
    app.require_subcommand(1);
    const std::string header = header_of(argc, argv);

    std::function<void()> action;

    // envelope
    auto* env_cmd = app.add_subcommand("envelope", "htss envelopes and trace fits");
    env_cmd->require_subcommand(1);

    EnvelopeArgs st_args;
    double st_r = 0, st_alpha = 0, st_H = 0, st_b = 0;
    auto* st = env_cmd->add_subcommand("stable-tail", "alpha-stable process, tail-approximation constant");
    st->add_option("--r-mbps", st_r, "mean rate")->required();
    st->add_option("--alpha", st_alpha, "tail index in (1,2)")->required();
    st->add_option("--hurst", st_H, "Hurst parameter")->required();
    st->add_option("--b-mbps", st_b, "dispersion in Mbit/s^H")->required();
    add_envelope_common(st, st_args);
    st->callback([&] {
        action = [&] {
            const auto env = envelope_from_stable(st_r * 1e6, st_alpha, st_H, st_b * 1e6);
            emit_htss(out, header, env, st_args, {{"constructor", "stable-tail"}});
        };
    });

    EnvelopeArgs sq_args;
    double sq_r = 0, sq_alpha = 0, sq_H = 0, sq_b = 0;
    std::size_t sq_samples = 1000000;
    std::uint64_t sq_seed = 1;
    std::string sq_cache;
    auto* sq = env_cmd->add_subcommand("stable-quantile", "alpha-stable process, quantile-based constant");
    sq->add_option("--r-mbps", sq_r, "mean rate")->required();
    sq->add_option("--alpha", sq_alpha, "tail index in (1,2)")->required();
    sq->add_option("--hurst", sq_H, "Hurst parameter")->required();
    sq->add_option("--b-mbps", sq_b, "dispersion in Mbit/s^H")->required();
    sq->add_option("--samples", sq_samples, "Monte Carlo sample count")->capture_default_str();
    sq->add_option("--seed", sq_seed, "sampler seed")->capture_default_str();
    sq->add_option("--cache", sq_cache, "quantile table CSV cache");
    add_envelope_common(sq, sq_args);
    sq->callback([&] {
        action = [&] {
            auto qt = load_cache(sq_cache, sq_alpha, sq_samples, sq_seed);
            if (!qt) {
                qt = stable::quantile_table({sq_alpha}, stable::default_epsilons(), sq_samples, sq_seed);
                if (!sq_cache.empty()) qt->save_csv(sq_cache);
            }
            const auto env = envelope_from_stable_quantiles(sq_r * 1e6, sq_alpha, sq_H, sq_b * 1e6, *qt);
            const auto tail_env = envelope_from_stable(sq_r * 1e6, sq_alpha, sq_H, sq_b * 1e6);
            emit_htss(out, header, env, sq_args,
                      {{"constructor", "stable-quantile"},
                       {"samples", sq_samples},
                       {"seed", sq_seed},
                       {"K_tail_approximation", tail_env.K}});
        };
    });

    EnvelopeArgs pg_args;
    double pg_alpha = 0, pg_b = 0, pg_rate = 0, pg_lambda = 0;
    auto* pg = env_cmd->add_subcommand("pareto-gclt", "Pareto packet source, limit-theorem envelope");
    pg->add_option("--alpha", pg_alpha, "Pareto tail index in (1,2)")->required();
    pg->add_option("--b-bytes", pg_b, "minimum packet size")->required();
    auto* pg_rate_opt = pg->add_option("--rate-mbps", pg_rate, "mean data rate");
    auto* pg_lambda_opt = pg->add_option("--lambda-pps", pg_lambda, "packet rate");
    pg_rate_opt->excludes(pg_lambda_opt);
    add_envelope_common(pg, pg_args);
    pg->callback([&] {
        if (!*pg_rate_opt && !*pg_lambda_opt) throw CLI::RequiredError("--rate-mbps or --lambda-pps");
        action = [&] {
            const ParetoSource src = *pg_rate_opt ? pareto_from_data_rate(pg_rate * 1e6, pg_b, pg_alpha)
                                                  : ParetoSource{pg_lambda, pg_b, pg_alpha};
            const auto env = envelope_from_pareto(src);
            emit_htss(out, header, env, pg_args,
                      {{"constructor", "pareto-gclt"},
                       {"lambda_pps", src.lambda_pps},
                       {"mean_bytes", src.mean_bytes()}});
        };
    });

    EnvelopeArgs tf_args;
    std::string tf_trace, tf_ccdf, tf_ccdf_out;
    double tf_r = 0, tf_alpha = 0, tf_H = 0, tf_stride = 0;
    std::vector<double> tf_windows{10, 100, 1000};
    bool tf_deep = false;
    auto* tf = env_cmd->add_subcommand("trace-fit", "fit K for given alpha and H");
    auto* tf_trace_opt = tf->add_option("--trace", tf_trace, "packet trace CSV (timestamp_ns,size_bytes)");
    auto* tf_ccdf_opt = tf->add_option("--ccdf", tf_ccdf, "precomputed CCDF CSV (sigma,prob,window_ms)");
    tf_trace_opt->excludes(tf_ccdf_opt);
    tf->add_option("--r-mbps", tf_r, "envelope rate")->required();
    tf->add_option("--alpha", tf_alpha, "tail index")->required();
    tf->add_option("--hurst", tf_H, "Hurst parameter")->required();
    tf->add_option("--windows-ms", tf_windows, "window lengths")->delimiter(',')->capture_default_str();
    tf->add_option("--stride-ms", tf_stride, "window stride (default window/10)");
    tf->add_flag("--include-deep-tail", tf_deep, "keep CCDF points below 10/sample count");
    tf->add_option("--ccdf-out", tf_ccdf_out, "write the Y-statistic CCDFs");
    add_envelope_common(tf, tf_args);
    tf->callback([&] {
        if (!*tf_trace_opt && !*tf_ccdf_opt) throw CLI::RequiredError("--trace or --ccdf");
        action = [&] {
            EnvelopeFit fit;
            FitOptions opts{tf_deep};
            if (*tf_ccdf_opt) {
                std::ifstream is(tf_ccdf);
                if (!is) throw IoError("cannot read " + tf_ccdf);
                fit = fit_from_ccdfs(read_ccdf_csv(is), tf_r * 1e6, tf_alpha, tf_H, opts);
            } else {
                const PacketTrace trace = ingest(tf_trace);
                std::vector<double> windows;
                for (double w : tf_windows) windows.push_back(w / 1000.0);
                fit = fit_htss_K(trace, tf_r * 1e6, tf_alpha, tf_H, windows, tf_stride / 1000.0, opts);
            }
            if (!fit.warning.empty()) err << "warning: " << fit.warning << '\n';
            if (!tf_ccdf_out.empty()) {
                std::ofstream os(tf_ccdf_out);
                if (!os) throw IoError("cannot write " + tf_ccdf_out);
                write_ccdf_csv(os, fit.curves);
            }
            if (tf_args.t_ms.empty()) tf_args.t_ms = default_t_ms();
            Sink sink(tf_args.out, out);
            *sink << header << '\n';
            *sink << "# r_bps=" << fit.r << " H=" << fit.H << " alpha=" << fit.alpha << " K=" << fit.K
                  << " points_used=" << fit.points_used << '\n';
            if (fit.K > 0.0) {
                envelope_table(*sink, [&](double t, double e) { return fit.G(t, e); }, tf_args.eps,
                               tf_args.t_ms);
            }
            sink.finish();
            json windows_ms = json::array();
            for (double w : fit.windows) windows_ms.push_back(w * 1000.0);
            write_report(tf_args.report, {{"alpha", fit.alpha},
                                          {"H", fit.H},
                                          {"K", fit.K},
                                          {"r_bps", fit.r},
                                          {"windows", windows_ms},
                                          {"points_used", fit.points_used}});
        };
    });

    std::string dt_trace, dt_out;
    double dt_horizon = 0, dt_step = 0;
    auto* dt = env_cmd->add_subcommand("deterministic-trace", "deterministic envelope of a trace");
    dt->add_option("--trace", dt_trace, "packet trace CSV")->required();
    dt->add_option("--horizon-ms", dt_horizon, "largest interval length")->required();
    dt->add_option("--step-ms", dt_step, "grid step")->required();
    dt->add_option("--out", dt_out, "CSV output file (default stdout)");
    dt->callback([&] {
        action = [&] {
            const PacketTrace trace = ingest(dt_trace);
            const auto env = deterministic_envelope(trace, dt_horizon / 1000.0, dt_step / 1000.0);
            Sink sink(dt_out, out);
            *sink << header << '\n' << "t_ms,bits\n";
            for (const auto& p : env) *sink << p.t * 1000.0 << ',' << p.bits << '\n';
            sink.finish();
        };
    });

    // bound
    std::string bd_topo, bd_out, bd_q;
    std::vector<double> bd_eps{1e-1, 1e-2, 1e-3};
    std::vector<double> bd_w;
    std::vector<int> bd_ns;
    auto* bd = app.add_subcommand("bound", "end-to-end delay bounds for a topology");
    bd->add_option("--topology", bd_topo, "topology JSON")->required();
    bd->add_option("--eps", bd_eps, "quantile levels")->delimiter(',')->capture_default_str();
    bd->add_option("--w", bd_w, "delays in seconds (default: 41 log-spaced from 1e-4 to 1e2)")->delimiter(',');
    bd->add_option("--nodes", bd_ns, "replicate the first node N times, for each N")->delimiter(',');
    bd->add_option("--out", bd_out, "curve CSV (default stdout)");
    bd->add_option("--quantiles", bd_q, "quantile CSV (default: after the curve)");
    bd->callback([&] {
        action = [&] {
            const PathSpec base = io::path_from_json(io::read_json(bd_topo));
            if (bd_w.empty()) bd_w = log_space(1e-4, 1e2, 41);
            std::vector<PathSpec> paths;
            if (bd_ns.empty()) {
                paths.push_back(base);
            } else {
                for (int n : parse_ns(bd_ns)) paths.push_back(replicate(base, n));
            }
            Sink curve(bd_out, out);
            *curve << header << '\n';
            *curve << "N,w_s,prob_upper,prob_closed\n";
            std::ostringstream qs;
            qs.precision(10);
            qs << "N,eps,w_upper_s,w_lower_s\n";
            for (const auto& p : paths) {
                const auto e2e = end_to_end_delay(p);
                const auto N = p.nodes.size();
                *curve << "# N=" << N << ' ' << e2e.notes << '\n';
                for (double w : bd_w) {
                    *curve << N << ',' << w << ',' << e2e.delay(w) << ',' << e2e.delay.closed(w) << '\n';
                }
                const bool no_cross = std::none_of(p.nodes.begin(), p.nodes.end(),
                                                   [](const LinkSpec& l) { return l.cross.has_value(); });
                for (double e : bd_eps) {
                    qs << N << ',' << e << ',' << delay_quantile(e2e.delay, e) << ',';
                    if (p.source && no_cross && e < 1.0) {
                        qs << lower_bound_quantile_pareto(static_cast<int>(N), p.source->b_bits() / p.nodes.front().C,
                                                          p.source->alpha, p.source->lambda_pps, e);
                    }
                    qs << '\n';
                }
            }
            if (bd_q.empty()) {
                *curve << "# quantiles\n" << qs.str();
                curve.finish();
            } else {
                curve.finish();
                Sink q(bd_q, out);
                *q << header << '\n' << qs.str();
                q.finish();
            }
        };
    });

    // simulate
    std::string sm_cfg, sm_out, sm_warmup = "0";
    double sm_packets = 1e6;
    std::uint64_t sm_seed = 1;
    std::size_t sm_rows = 2000;
    auto* sm = app.add_subcommand("simulate", "tandem FIFO simulation");
    sm->add_option("--config", sm_cfg, "topology JSON with a Pareto through source")->required();
    sm->add_option("--packets", sm_packets, "through packets")->capture_default_str();
    sm->add_option("--seed", sm_seed, "seed")->capture_default_str();
    sm->add_option("--warmup", sm_warmup, "packets excluded from statistics, or 'auto'")->capture_default_str();
    sm->add_option("--max-rows", sm_rows, "CCDF rows written (0 = all)")->capture_default_str();
    sm->add_option("--out", sm_out, "CCDF CSV (default stdout)");
    sm->callback([&] {
        action = [&] {
            if (!(sm_packets >= 1.0) || sm_packets != std::floor(sm_packets)) {
                throw std::invalid_argument("--packets must be a positive integer");
            }
            const auto n = static_cast<std::size_t>(sm_packets);
            std::size_t warm = 0;
            if (sm_warmup == "auto") {
                warm = sim::default_warmup(n);
            } else {
                try {
                    warm = static_cast<std::size_t>(std::stoull(sm_warmup));
                } catch (const std::exception&) {
                    throw CLI::ValidationError("--warmup", "expected a count or 'auto'");
                }
            }
            const PathSpec p = io::path_from_json(io::read_json(sm_cfg));
            const auto res = sim::run_tandem(io::tandem_from_path(p, sm_seed, warm), n);
            Sink sink(sm_out, out);
            *sink << header << '\n';
            *sink << "# samples=" << res.delay.samples.size() << " max_reliable_eps=" << res.delay.max_reliable_eps
                  << '\n';
            sim::write_ccdf_csv(*sink, res.delay.ccdf, sm_rows);
            sink.finish();
        };
    });

    // scale
    std::string sc_topo, sc_out;
    std::vector<int> sc_ns{1, 2, 4, 8, 16, 32, 64};
    double sc_eps = 1e-3;
    auto* sc = app.add_subcommand("scale", "delay quantiles against path length");
    sc->add_option("--topology", sc_topo, "topology JSON; its first node is replicated")->required();
    sc->add_option("--ns", sc_ns, "node counts")->delimiter(',')->capture_default_str();
    sc->add_option("--eps", sc_eps, "quantile level")->capture_default_str();
    sc->add_option("--out", sc_out, "CSV output (default stdout)");
    sc->callback([&] {
        action = [&] {
            const PathSpec base = io::path_from_json(io::read_json(sc_topo));
            const auto ns = parse_ns(sc_ns);
            const ScalingStudy s = scaling_study(base, ns, sc_eps);
            Sink sink(sc_out, out);
            *sink << header << '\n' << "N,w_upper_s,w_lower_s\n";
            for (const auto& r : s.rows) {
                *sink << r.N << ',' << r.w_upper << ',';
                if (r.w_lower) *sink << *r.w_lower;
                *sink << '\n';
            }
            if (s.slope_upper) *sink << "# slope_upper=" << *s.slope_upper << '\n';
            if (s.slope_lower) *sink << "# slope_lower=" << *s.slope_lower << '\n';
            if (s.slope_normalized) {
                *sink << "# slope_normalized=" << *s.slope_normalized << " beta=" << *s.beta << '\n';
            }
            sink.finish();
        };
    });

    // gen-trace
    std::string gt_out;
    double gt_alpha = 0, gt_b = 0, gt_rate = 0, gt_lambda = 0, gt_packets = 0;
    std::uint64_t gt_seed = 1;
    auto* gt = app.add_subcommand("gen-trace", "synthetic Pareto packet trace");
    gt->add_option("--alpha", gt_alpha, "Pareto tail index")->required();
    gt->add_option("--b-bytes", gt_b, "minimum packet size")->required();
    auto* gt_rate_opt = gt->add_option("--rate-mbps", gt_rate, "mean data rate");
    auto* gt_lambda_opt = gt->add_option("--lambda-pps", gt_lambda, "packet rate");
    gt_rate_opt->excludes(gt_lambda_opt);
    gt->add_option("--packets", gt_packets, "packet count")->required();
    gt->add_option("--seed", gt_seed, "seed")->capture_default_str();
    gt->add_option("--out", gt_out, "trace CSV (default stdout)");
    gt->callback([&] {
        if (!*gt_rate_opt && !*gt_lambda_opt) throw CLI::RequiredError("--rate-mbps or --lambda-pps");
        action = [&] {
            if (!(gt_packets >= 1.0) || gt_packets != std::floor(gt_packets)) {
                throw std::invalid_argument("--packets must be a positive integer");
            }
            const ParetoSource src = *gt_rate_opt ? pareto_from_data_rate(gt_rate * 1e6, gt_b, gt_alpha)
                                                  : ParetoSource{gt_lambda, gt_b, gt_alpha};
            const auto trace = generate_pareto_trace(src.lambda_pps, src.b_bytes, src.alpha,
                                                     static_cast<std::size_t>(gt_packets), gt_seed);
            Sink sink(gt_out, out);
            trace.write_csv(*sink);
            sink.finish();
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (action) action();
        return kOk;
    } catch (const CLI::Error& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const InstabilityError& e) {
        err << "unstable: " << e.what() << '\n';
        return kDomain;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kIo;
    } catch (const nlohmann::json::exception& e) {
        err << "invalid input: " << e.what() << '\n';
        return kIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kDomain;
    }
}

}  // namespace htnc::cli
