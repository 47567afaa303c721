#include "omchain/config.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "omchain/error.hpp"

namespace omchain {

namespace {

[[noreturn]] void fail(const std::string& message) { throw Error(ErrorCode::ConfigError, message); }

const Json& field(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) fail(std::string("missing field '") + key + "'");
  return doc.at(key);
}

template <typename T>
T get(const Json& doc, const char* key) {
  try {
    return field(doc, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T get_or(const Json& doc, const char* key, T fallback) {
  return doc.is_object() && doc.contains(key) ? get<T>(doc, key) : fallback;
}

std::size_t positive_size(const Json& doc, const char* key) {
  const auto value = get<long long>(doc, key);
  if (value < 1) fail(std::string("field '") + key + "' must be positive");
  return static_cast<std::size_t>(value);
}

}  // namespace

Network parse_network(const Json& doc) {
  const auto kind = get<std::string>(doc, "kind");
  const Json params = doc.contains("params") ? doc.at("params") : Json::object();
  if (kind == "cycle") return make_cycle(positive_size(params, "m"));
  if (kind == "path") return make_path(positive_size(params, "m"));
  if (kind == "complete") return make_complete(positive_size(params, "m"));
  if (kind == "torus") return make_torus(positive_size(params, "width"), positive_size(params, "height"));
  if (kind == "custom") {
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (const auto& e : field(params, "edges")) {
      if (!e.is_array() || e.size() != 2) fail("custom edges must be [a, b] pairs");
      edges.emplace_back(e[0].get<Vertex>(), e[1].get<Vertex>());
    }
    return make_custom(positive_size(params, "m"), edges);
  }
  fail("unknown network kind '" + kind + "'");
}

ModelSpec parse_model_spec(const Json& doc) {
  Network network = parse_network(field(doc, "network"));
  const int n = get<int>(doc, "n");
  if (n < 0) fail("n must be non-negative");
  const Json& model = field(doc, "model");
  const auto kind = get<std::string>(model, "kind");
  const Json& tendency = field(doc, "tendency");
  TendencyShape shape;
  try {
    shape = parse_tendency_shape(get<std::string>(tendency, "kind"));
  } catch (const Error& e) {
    fail(e.what());
  }

  if (kind == "carrying") {
    const ModelKind base = parse_model_kind(get_or<std::string>(model, "base", "model2"));
    if (model.contains("thresholds")) {
      std::vector<Thresholds> per_vertex;
      for (const auto& t : model.at("thresholds")) {
        if (!t.is_array() || t.size() != 2) fail("thresholds must be [L, K] pairs");
        per_vertex.push_back({t[0].get<int>(), t[1].get<int>()});
      }
      return ModelSpec::carrying_capacity(base, shape, std::move(per_vertex), std::move(network), n);
    }
    return ModelSpec::carrying_capacity(base, shape, get<int>(model, "L"), get<int>(model, "K"),
                                        std::move(network), n);
  }
  ModelKind model_kind;
  try {
    model_kind = parse_model_kind(kind);
  } catch (const Error& e) {
    fail(e.what());
  }
  auto spec = ModelSpec::clustering(model_kind, shape, std::move(network), n);
  validate(spec);
  return spec;
}

OMChain parse_explicit_chain(const Json& doc) {
  const Json& chain = field(doc, "chain");
  const auto labels = get<std::vector<std::string>>(chain, "states");
  if (labels.empty()) fail("explicit chain needs at least one state");
  std::map<std::string, StateIndex> index;
  for (StateIndex x = 0; x < labels.size(); ++x) {
    if (!index.emplace(labels[x], x).second) fail("duplicate state label '" + labels[x] + "'");
  }
  auto lookup = [&](const Json& t, const char* key) {
    const auto name = get<std::string>(t, key);
    auto it = index.find(name);
    if (it == index.end()) fail("unknown state '" + name + "'");
    return it->second;
  };
  ChainBuilder builder(labels);
  std::vector<bool> has_loop(labels.size(), false);
  for (const auto& t : get_or<Json>(chain, "transitions", Json::array())) {
    const StateIndex from = lookup(t, "from");
    const StateIndex to = lookup(t, "to");
    const double coef = get<double>(t, "coef");
    if (!(coef > 0.0)) fail("transition coefficients must be positive");
    builder.add_power(from, to, coef, get<int>(t, "order"));
    if (from == to) has_loop[from] = true;
  }
  const int diagonal_order = get_or<int>(chain, "diagonal_order", 0);
  for (StateIndex x = 0; x < labels.size(); ++x) {
    if (!has_loop[x]) builder.add_remainder(x, diagonal_order);
  }
  return builder.build();
}

AnalysisTarget parse_target(const Json& doc) {
  AnalysisTarget target;
  if (doc.is_object() && doc.contains("chain")) {
    target.chain = parse_explicit_chain(doc);
  } else {
    target.model = parse_model_spec(doc);
  }
  return target;
}

SimConfig parse_simulation(const Json& doc, SimConfig base) {
  if (!doc.is_object() || !doc.contains("simulation")) return base;
  const Json& sim = doc.at("simulation");
  base.eps = get_or<double>(sim, "eps", base.eps);
  base.steps = get_or<std::uint64_t>(sim, "steps", base.steps);
  base.seed = get_or<std::uint64_t>(sim, "seed", base.seed);
  if (sim.contains("initial")) base.initial = parse_initial_pattern(get<std::string>(sim, "initial"));
  base.snapshot_times = get_or<std::vector<std::uint64_t>>(sim, "snapshots", base.snapshot_times);
  base.averaging_window = get_or<std::uint64_t>(sim, "window", base.averaging_window);
  base.stride = get_or<std::uint64_t>(sim, "stride", base.stride);
  return base;
}

std::vector<std::string> preset_names() { return {"fig1", "torus-fig2"}; }

Json preset(std::string_view name) {
  if (name == "fig1") {
    return Json::parse(R"({
      "network": {"kind": "cycle", "params": {"m": 4}},
      "n": 5,
      "model": {"kind": "model2"},
      "tendency": {"kind": "linear"}
    })");
  }
  if (name == "torus-fig2") {
    return Json::parse(R"({
      "network": {"kind": "torus", "params": {"width": 20, "height": 12}},
      "n": 120,
      "model": {"kind": "model2"},
      "tendency": {"kind": "quadratic"},
      "simulation": {
        "eps": 0.0005,
        "steps": 1000000,
        "seed": 1,
        "initial": "alternating",
        "snapshots": [1000, 40000, 80000, 300000],
        "window": 500000
      }
    })");
  }
  fail("unknown preset '" + std::string(name) + "'");
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail("config file '" + path + "': " + e.what());
  }
}

}  // namespace omchain
