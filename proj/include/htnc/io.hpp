#pragma once

// JSON forms of envelopes, topologies and simulator configurations.

#include "htnc/envelopes.hpp"
#include "htnc/network.hpp"
#include "htnc/sim.hpp"

#include <filesystem>
#include <json.hpp>

namespace htnc::io {

using json = nlohmann::json;

// {kind: "htss"|"gauss", r_bps, H, alpha, K, b?}
json envelope_to_json(const ArrivalEnvelope& env);
ArrivalEnvelope envelope_from_json(const json& j);

// {nodes: [{C_bps, cross?, packetizer?: {alpha_p, b_bytes, rho?}, cross_source?}],
//  through: envelope | {pareto: {lambda_pps | rate_bps, b_bytes, alpha}},
//  muPolicy?: {fraction} | {explicit: [...]}, gamma?: number | "auto", repeat?: n}
PathSpec path_from_json(const json& j);
json path_to_json(const PathSpec& p);

// Simulator view of a path: every node must share the capacity of node 0
// and the through flow must be a Pareto source.
sim::TandemConfig tandem_from_path(const PathSpec& p, std::uint64_t seed, std::size_t warmup);

json read_json(const std::filesystem::path& path);

}  // namespace htnc::io
