#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "omchain/chain.hpp"
#include "omchain/particle_model.hpp"
#include "omchain/simulator.hpp"

namespace omchain {

using Json = nlohmann::ordered_json;

/// {"kind": "cycle"|"path"|"torus"|"complete"|"custom", "params": {...}}
///   cycle/path/complete: {"m": 4}; torus: {"width": 20, "height": 12};
///   custom: {"m": 3, "edges": [[0, 1], [1, 2]]}
Network parse_network(const Json& doc);

/// {"network": ..., "n": 5, "model": {"kind": "model2"}, "tendency": {"kind": "linear"}}
/// Carrying capacity: "model": {"kind": "carrying", "base": "model2", "L": 1, "K": 3}
/// with tendency kind step | linear | parabolic.
ModelSpec parse_model_spec(const Json& doc);

/// {"chain": {"states": ["a", "b"], "transitions": [{"from": "a", "to": "b",
///   "coef": 0.5, "order": 1}, ...], "diagonal_order": 0}}
/// States without an explicit self-loop receive the remaining row mass.
OMChain parse_explicit_chain(const Json& doc);

/// Either a particle model or a hand-written chain.
struct AnalysisTarget {
  std::optional<ModelSpec> model;
  std::optional<OMChain> chain;  // set for explicit chains only
};

AnalysisTarget parse_target(const Json& doc);

/// Optional "simulation" block: {"eps", "steps", "seed", "initial",
/// "snapshots", "window"}. Missing fields keep the values in `base`.
SimConfig parse_simulation(const Json& doc, SimConfig base);

std::vector<std::string> preset_names();
/// Throws ConfigError for unknown names.
Json preset(std::string_view name);

Json load_json_file(const std::string& path);

}  // namespace omchain
