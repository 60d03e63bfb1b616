#include "htnc/io.hpp"

#include "htnc/errors.hpp"

#include <fstream>
#include <stdexcept>

namespace htnc::io {

namespace {

double num(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw std::invalid_argument(std::string("missing numeric field '") + key + "'");
    }
    return j.at(key).get<double>();
}

ParetoSource pareto_from_json(const json& j) {
    const double b = num(j, "b_bytes");
    const double alpha = num(j, "alpha");
    const bool has_l = j.contains("lambda_pps");
    const bool has_r = j.contains("rate_bps");
    if (has_l == has_r) throw std::invalid_argument("pareto source: give exactly one of lambda_pps, rate_bps");
    if (has_r) return pareto_from_data_rate(num(j, "rate_bps"), b, alpha);
    return ParetoSource{num(j, "lambda_pps"), b, alpha};
}

json pareto_to_json(const ParetoSource& s) {
    return {{"lambda_pps", s.lambda_pps}, {"b_bytes", s.b_bytes}, {"alpha", s.alpha}};
}

}  // namespace

json envelope_to_json(const ArrivalEnvelope& env) {
    if (const auto* h = std::get_if<HtssEnvelope>(&env)) {
        json j{{"kind", "htss"}, {"r_bps", h->r}, {"H", h->H}, {"alpha", h->alpha}, {"K", h->K}};
        if (h->b > 0.0) j["b"] = h->b;
        return j;
    }
    const auto& g = std::get<GaussEnvelope>(env);
    return {{"kind", "gauss"}, {"r_bps", g.r}, {"H", g.H}, {"alpha", 2.0}, {"K", g.K}, {"b", g.b}};
}

ArrivalEnvelope envelope_from_json(const json& j) {
    const std::string kind = j.value("kind", std::string("htss"));
    if (kind == "htss") {
        HtssEnvelope e{num(j, "r_bps"), num(j, "H"), num(j, "alpha"), num(j, "K"), j.value("b", 0.0)};
        if (!(e.H > 0.0 && e.H < 1.0) || !(e.alpha > 1.0 && e.alpha <= 2.0) || !(e.K > 0.0) || e.r < 0.0) {
            throw std::invalid_argument("htss envelope: need r >= 0, 0 < H < 1, 1 < alpha <= 2, K > 0");
        }
        return e;
    }
    if (kind == "gauss") {
        GaussEnvelope g{num(j, "r_bps"), num(j, "H"), num(j, "b"), j.value("K", 0.5)};
        if (!(g.H > 0.0 && g.H < 1.0) || !(g.b > 0.0) || !(g.K > 0.0) || g.r < 0.0) {
            throw std::invalid_argument("gauss envelope: need r >= 0, 0 < H < 1, b > 0, K > 0");
        }
        return g;
    }
    throw std::invalid_argument("unknown envelope kind '" + kind + "'");
}

PathSpec path_from_json(const json& j) {
    PathSpec p;
    if (!j.contains("through")) throw std::invalid_argument("topology: missing 'through'");
    const json& th = j.at("through");
    if (th.contains("pareto")) {
        p.source = pareto_from_json(th.at("pareto"));
        p.through = envelope_from_pareto(*p.source);
    } else {
        p.through = envelope_from_json(th.contains("envelope") ? th.at("envelope") : th);
    }
    const double r0 = rate_of(p.through);

    if (!j.contains("nodes") || !j.at("nodes").is_array() || j.at("nodes").empty()) {
        throw std::invalid_argument("topology: 'nodes' must be a nonempty array");
    }
    for (const json& n : j.at("nodes")) {
        LinkSpec link;
        link.C = num(n, "C_bps");
        if (n.contains("cross")) link.cross = envelope_from_json(n.at("cross"));
        if (n.contains("packetizer")) {
            const json& pk = n.at("packetizer");
            const double rho = pk.contains("rho") ? num(pk, "rho") : r0 / link.C;
            link.packetizer = pareto_packetizer(num(pk, "b_bytes"), num(pk, "alpha_p"), rho);
        }
        p.nodes.push_back(link);
        p.cross_sources.push_back(n.contains("cross_source")
                                      ? std::optional<ParetoSource>(pareto_from_json(n.at("cross_source")))
                                      : std::nullopt);
    }

    if (j.contains("muPolicy")) {
        const json& m = j.at("muPolicy");
        if (m.contains("fraction") == m.contains("explicit")) {
            throw std::invalid_argument("muPolicy: give exactly one of fraction, explicit");
        }
        if (m.contains("fraction")) {
            p.mu.kind = MuPolicy::Kind::Fraction;
            p.mu.fraction = num(m, "fraction");
        } else {
            p.mu.kind = MuPolicy::Kind::Explicit;
            p.mu.values = m.at("explicit").get<std::vector<double>>();
        }
    }
    if (j.contains("gamma")) {
        const json& g = j.at("gamma");
        if (g.is_number()) {
            p.gamma = g.get<double>();
            if (!(*p.gamma > 1.0)) throw std::invalid_argument("gamma must exceed 1");
        } else if (!(g.is_string() && g.get<std::string>() == "auto")) {
            throw std::invalid_argument("gamma must be a number or \"auto\"");
        }
    }
    if (j.contains("repeat")) p = replicate(p, j.at("repeat").get<int>());
    return p;
}

json path_to_json(const PathSpec& p) {
    json nodes = json::array();
    for (std::size_t i = 0; i < p.nodes.size(); ++i) {
        const LinkSpec& l = p.nodes[i];
        json n{{"C_bps", l.C}};
        if (l.cross) n["cross"] = envelope_to_json(*l.cross);
        if (l.packetizer) {
            const auto& pk = *l.packetizer;
            // L_p = (8 b)^alpha_p
            n["packetizer"] = {{"alpha_p", pk.alpha_p},
                               {"b_bytes", std::pow(pk.L_p, 1.0 / pk.alpha_p) / 8.0},
                               {"rho", pk.rho}};
        }
        if (i < p.cross_sources.size() && p.cross_sources[i]) n["cross_source"] = pareto_to_json(*p.cross_sources[i]);
        nodes.push_back(n);
    }
    json j{{"nodes", nodes}};
    j["through"] = p.source ? json{{"pareto", pareto_to_json(*p.source)}} : envelope_to_json(p.through);
    if (p.mu.kind == MuPolicy::Kind::Fraction) j["muPolicy"] = {{"fraction", p.mu.fraction}};
    else j["muPolicy"] = {{"explicit", p.mu.values}};
    if (p.gamma) j["gamma"] = *p.gamma;
    else j["gamma"] = "auto";
    return j;
}

sim::TandemConfig tandem_from_path(const PathSpec& p, std::uint64_t seed, std::size_t warmup) {
    if (!p.source) throw std::invalid_argument("simulation needs a Pareto through source");
    sim::TandemConfig cfg;
    cfg.N = static_cast<int>(p.nodes.size());
    cfg.C = p.nodes.front().C;
    for (const auto& n : p.nodes) {
        if (n.C != cfg.C) throw std::invalid_argument("simulation needs equal capacities at every node");
    }
    cfg.source = *p.source;
    cfg.cross = p.cross_sources;
    if (std::none_of(cfg.cross.begin(), cfg.cross.end(), [](const auto& c) { return c.has_value(); })) {
        cfg.cross.clear();
    }
    cfg.warmup_packets = warmup;
    cfg.seed = seed;
    return cfg;
}

json read_json(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot read " + path.string());
    try {
        return json::parse(is);
    } catch (const json::exception& e) {
        throw IoError("invalid JSON in " + path.string() + ": " + e.what());
    }
}

}  // namespace htnc::io
