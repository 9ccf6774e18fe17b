#include "yamabe/config.hpp"

#include "yamabe/errors.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace yamabe {

std::string to_string(SeedStrategy s) {
  switch (s) {
    case SeedStrategy::explicit_list: return "explicit";
    case SeedStrategy::random: return "random";
    case SeedStrategy::net: return "net";
  }
  return "explicit";
}

namespace {

SeedStrategy strategy_from_string(const std::string& s) {
  if (s == "explicit") return SeedStrategy::explicit_list;
  if (s == "random") return SeedStrategy::random;
  if (s == "net") return SeedStrategy::net;
  throw ConfigError("unknown seed strategy '" + s + "'");
}

// Accepts plain numbers and multiples of pi: "pi", "2pi", "2*pi", "pi/2".
double parse_length(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (ch != ' ' && ch != '*') s += ch;
  const auto pos = s.find("pi");
  if (pos == std::string::npos) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw ConfigError("not a number: '" + text + "'");
    }
    if (used != s.size()) throw ConfigError("not a number: '" + text + "'");
    return v;
  }
  double factor = 1.0;
  if (pos > 0) factor = parse_length(s.substr(0, pos));
  std::string rest = s.substr(pos + 2);
  double divisor = 1.0;
  if (!rest.empty()) {
    if (rest[0] != '/') throw ConfigError("not a number: '" + text + "'");
    divisor = parse_length(rest.substr(1));
  }
  return factor * std::numbers::pi / divisor;
}

double as_real(const YAML::Node& n, const std::string& where) {
  if (!n.IsScalar()) throw ConfigError(where + ": expected a number");
  return parse_length(n.as<std::string>());
}

std::vector<double> as_reals(const YAML::Node& n, const std::string& where) {
  if (!n.IsSequence()) throw ConfigError(where + ": expected a list");
  std::vector<double> out;
  for (const auto& e : n) out.push_back(as_real(e, where));
  return out;
}

template <class T>
T as_scalar(const YAML::Node& n, const std::string& where) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(where + ": wrong type");
  }
}

void check_keys(const YAML::Node& n, const std::string& section,
                const std::set<std::string>& allowed) {
  if (!n.IsMap()) throw ConfigError(section + ": expected a mapping");
  for (const auto& kv : n) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError(section + ": unknown key '" + key + "'");
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (schema_version != kSchemaVersion)
    throw VersionMismatch("config schema_version " + std::to_string(schema_version) +
                          ", expected " + std::to_string(kSchemaVersion));
  if (dimension < 1 || dimension > 3) throw ConfigError("manifold.dimension must be 1, 2 or 3");
  if (static_cast<int>(lengths.size()) != dimension ||
      static_cast<int>(grid.size()) != dimension)
    throw ConfigError("manifold.lengths and manifold.grid need one entry per dimension");
  for (double L : lengths)
    if (!(L > 0.0)) throw ConfigError("manifold.lengths must be positive");
  for (long N : grid)
    if (N < 8) throw ConfigError("manifold.grid needs at least 8 nodes per axis");
  if (fiber_dim < 1) throw ConfigError("params.m must be >= 1");
  if (eps.empty()) throw ConfigError("params.eps must list at least one value");
  if (!(tol.max_h_over_eps > 0.0)) throw ConfigError("tolerances.max_h_over_eps must be positive");
  for (double e : eps) {
    if (!(e > 0.0)) throw ConfigError("params.eps values must be positive");
    EpsParams probe(e, dimension, fiber_dim, scalar_curvature);  // coercivity
    for (int k = 0; k < dimension; ++k) {
      const double h = lengths[k] / static_cast<double>(grid[k]);
      if (h > tol.max_h_over_eps * e * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "grid spacing " << h << " on axis " << k << " exceeds " << tol.max_h_over_eps
           << " * eps for eps = " << e;
        throw ConfigError(os.str());
      }
    }
  }
  flow.validate();
  if (seeds.count < 0) throw ConfigError("seeds.count must be nonnegative");
  if (!(seeds.net_scale > 0.0)) throw ConfigError("seeds.net_scale must be positive");
  for (const auto& [x, y] : seeds.pairs)
    if (static_cast<int>(x.size()) != dimension || static_cast<int>(y.size()) != dimension)
      throw ConfigError("seeds.pairs entries need one coordinate per dimension");
  if (!seeds.positive_center.empty() &&
      static_cast<int>(seeds.positive_center.size()) != dimension)
    throw ConfigError("seeds.positive_center needs one coordinate per dimension");
  if (!(tol.eta > 0.5 && tol.eta < 1.0)) throw ConfigError("tolerances.eta must lie in (1/2, 1)");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
}

ExperimentConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("YAML parse error: ") + e.what());
  }
  check_keys(root, "config",
             {"schema_version", "manifold", "params", "flow", "seeds", "tolerances",
              "groundstate", "output", "jobs"});
  if (!root["schema_version"]) throw ConfigError("schema_version is mandatory");

  ExperimentConfig c;
  c.schema_version = as_scalar<int>(root["schema_version"], "schema_version");
  if (c.schema_version != kSchemaVersion)
    throw VersionMismatch("config schema_version " + std::to_string(c.schema_version) +
                          ", expected " + std::to_string(kSchemaVersion));

  const YAML::Node m = root["manifold"];
  if (!m) throw ConfigError("manifold section is mandatory");
  check_keys(m, "manifold", {"dimension", "lengths", "grid"});
  c.dimension = as_scalar<int>(m["dimension"], "manifold.dimension");
  c.lengths = as_reals(m["lengths"], "manifold.lengths");
  for (const auto& e : m["grid"]) c.grid.push_back(as_scalar<long>(e, "manifold.grid"));

  const YAML::Node p = root["params"];
  if (!p) throw ConfigError("params section is mandatory");
  check_keys(p, "params", {"m", "eps", "scalar_curvature"});
  c.fiber_dim = as_scalar<int>(p["m"], "params.m");
  c.eps = as_reals(p["eps"], "params.eps");
  if (p["scalar_curvature"]) c.scalar_curvature = as_real(p["scalar_curvature"], "params.scalar_curvature");

  if (const YAML::Node f = root["flow"]) {
    check_keys(f, "flow", {"step", "backtrack", "max_steps", "stop_delta", "solver_tol",
                           "record_every", "polish"});
    if (f["step"]) c.flow.step = as_real(f["step"], "flow.step");
    if (f["backtrack"]) c.flow.backtrack = as_real(f["backtrack"], "flow.backtrack");
    if (f["max_steps"]) c.flow.max_steps = as_scalar<int>(f["max_steps"], "flow.max_steps");
    if (f["stop_delta"]) c.flow.stop_delta = as_real(f["stop_delta"], "flow.stop_delta");
    if (f["solver_tol"]) c.flow.solver_tol = as_real(f["solver_tol"], "flow.solver_tol");
    if (f["record_every"]) c.flow.record_every = as_scalar<int>(f["record_every"], "flow.record_every");
    if (f["polish"]) c.polish = as_scalar<bool>(f["polish"], "flow.polish");
  }

  if (const YAML::Node s = root["seeds"]) {
    check_keys(s, "seeds", {"strategy", "pairs", "positive_center", "count", "random_seed",
                            "cutoff", "net_scale"});
    if (s["strategy"]) c.seeds.strategy = strategy_from_string(as_scalar<std::string>(s["strategy"], "seeds.strategy"));
    if (s["pairs"]) {
      if (!s["pairs"].IsSequence()) throw ConfigError("seeds.pairs: expected a list");
      for (const auto& pr : s["pairs"]) {
        if (!pr.IsSequence() || pr.size() != 2)
          throw ConfigError("seeds.pairs: each entry is [x, y]");
        c.seeds.pairs.emplace_back(as_reals(pr[0], "seeds.pairs"), as_reals(pr[1], "seeds.pairs"));
      }
    }
    if (s["positive_center"]) c.seeds.positive_center = as_reals(s["positive_center"], "seeds.positive_center");
    if (s["count"]) c.seeds.count = as_scalar<int>(s["count"], "seeds.count");
    if (s["random_seed"]) c.seeds.random_seed = as_scalar<std::uint64_t>(s["random_seed"], "seeds.random_seed");
    if (s["cutoff"]) {
      const std::string v = as_scalar<std::string>(s["cutoff"], "seeds.cutoff");
      c.seeds.cutoff = v == "auto" ? 0.0 : parse_length(v);
    }
    if (s["net_scale"]) c.seeds.net_scale = as_real(s["net_scale"], "seeds.net_scale");
  }

  if (const YAML::Node t = root["tolerances"]) {
    check_keys(t, "tolerances", {"max_h_over_eps", "cluster_energy", "cluster_shape",
                                 "concentration_radius", "eta", "pde_residual_factor",
                                 "nodal_set", "inequality_slack"});
    auto rd = [&](const char* key, double& dst) {
      if (t[key]) dst = as_real(t[key], std::string("tolerances.") + key);
    };
    rd("max_h_over_eps", c.tol.max_h_over_eps);
    rd("cluster_energy", c.tol.cluster_energy);
    rd("cluster_shape", c.tol.cluster_shape);
    rd("concentration_radius", c.tol.concentration_radius);
    rd("eta", c.tol.eta);
    rd("pde_residual_factor", c.tol.pde_residual_factor);
    rd("nodal_set", c.tol.nodal_set);
    rd("inequality_slack", c.tol.inequality_slack);
  }

  if (const YAML::Node g = root["groundstate"]) {
    check_keys(g, "groundstate", {"r_max", "samples", "tol"});
    if (g["r_max"]) c.shoot.r_max = as_real(g["r_max"], "groundstate.r_max");
    if (g["samples"]) c.shoot.samples = as_scalar<std::size_t>(g["samples"], "groundstate.samples");
    if (g["tol"]) c.shoot_tol = as_real(g["tol"], "groundstate.tol");
  }

  if (const YAML::Node o = root["output"]) {
    check_keys(o, "output", {"dir", "snapshots", "traces"});
    if (o["dir"]) c.output_dir = as_scalar<std::string>(o["dir"], "output.dir");
    if (o["snapshots"]) c.write_snapshots = as_scalar<bool>(o["snapshots"], "output.snapshots");
    if (o["traces"]) c.write_traces = as_scalar<bool>(o["traces"], "output.traces");
  }
  if (root["jobs"]) c.jobs = as_scalar<int>(root["jobs"], "jobs");

  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [x, y] : c.seeds.pairs) pairs.push_back({x, y});
  return {
      {"schema_version", c.schema_version},
      {"manifold", {{"dimension", c.dimension}, {"lengths", c.lengths}, {"grid", c.grid}}},
      {"params", {{"m", c.fiber_dim}, {"eps", c.eps}, {"scalar_curvature", c.scalar_curvature}}},
      {"flow",
       {{"step", c.flow.step}, {"backtrack", c.flow.backtrack}, {"max_steps", c.flow.max_steps},
        {"stop_delta", c.flow.stop_delta}, {"solver_tol", c.flow.solver_tol},
        {"record_every", c.flow.record_every}, {"polish", c.polish}}},
      {"seeds",
       {{"strategy", to_string(c.seeds.strategy)}, {"pairs", pairs},
        {"positive_center", c.seeds.positive_center}, {"count", c.seeds.count},
        {"random_seed", c.seeds.random_seed}, {"cutoff", c.seeds.cutoff},
        {"net_scale", c.seeds.net_scale}}},
      {"tolerances",
       {{"max_h_over_eps", c.tol.max_h_over_eps}, {"cluster_energy", c.tol.cluster_energy},
        {"cluster_shape", c.tol.cluster_shape},
        {"concentration_radius", c.tol.concentration_radius}, {"eta", c.tol.eta},
        {"pde_residual_factor", c.tol.pde_residual_factor}, {"nodal_set", c.tol.nodal_set},
        {"inequality_slack", c.tol.inequality_slack}}},
      {"groundstate",
       {{"r_max", c.shoot.r_max}, {"samples", c.shoot.samples}, {"tol", c.shoot_tol}}},
      {"output",
       {{"dir", c.output_dir}, {"snapshots", c.write_snapshots}, {"traces", c.write_traces}}},
      {"jobs", c.jobs},
  };
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  try {
    ExperimentConfig c;
    c.schema_version = j.at("schema_version").get<int>();
    const auto& m = j.at("manifold");
    c.dimension = m.at("dimension").get<int>();
    c.lengths = m.at("lengths").get<std::vector<double>>();
    c.grid = m.at("grid").get<std::vector<long>>();
    const auto& p = j.at("params");
    c.fiber_dim = p.at("m").get<int>();
    c.eps = p.at("eps").get<std::vector<double>>();
    c.scalar_curvature = p.at("scalar_curvature").get<double>();
    const auto& f = j.at("flow");
    c.flow.step = f.at("step").get<double>();
    c.flow.backtrack = f.at("backtrack").get<double>();
    c.flow.max_steps = f.at("max_steps").get<int>();
    c.flow.stop_delta = f.at("stop_delta").get<double>();
    c.flow.solver_tol = f.at("solver_tol").get<double>();
    c.flow.record_every = f.at("record_every").get<int>();
    c.polish = f.at("polish").get<bool>();
    const auto& s = j.at("seeds");
    c.seeds.strategy = strategy_from_string(s.at("strategy").get<std::string>());
    for (const auto& pr : s.at("pairs"))
      c.seeds.pairs.emplace_back(pr.at(0).get<std::vector<double>>(),
                                 pr.at(1).get<std::vector<double>>());
    c.seeds.positive_center = s.at("positive_center").get<std::vector<double>>();
    c.seeds.count = s.at("count").get<int>();
    c.seeds.random_seed = s.at("random_seed").get<std::uint64_t>();
    c.seeds.cutoff = s.at("cutoff").get<double>();
    c.seeds.net_scale = s.at("net_scale").get<double>();
    const auto& t = j.at("tolerances");
    c.tol.max_h_over_eps = t.at("max_h_over_eps").get<double>();
    c.tol.cluster_energy = t.at("cluster_energy").get<double>();
    c.tol.cluster_shape = t.at("cluster_shape").get<double>();
    c.tol.concentration_radius = t.at("concentration_radius").get<double>();
    c.tol.eta = t.at("eta").get<double>();
    c.tol.pde_residual_factor = t.at("pde_residual_factor").get<double>();
    c.tol.nodal_set = t.at("nodal_set").get<double>();
    c.tol.inequality_slack = t.at("inequality_slack").get<double>();
    const auto& g = j.at("groundstate");
    c.shoot.r_max = g.at("r_max").get<double>();
    c.shoot.samples = g.at("samples").get<std::size_t>();
    c.shoot_tol = g.at("tol").get<double>();
    const auto& o = j.at("output");
    c.output_dir = o.at("dir").get<std::string>();
    c.write_snapshots = o.at("snapshots").get<bool>();
    c.write_traces = o.at("traces").get<bool>();
    c.jobs = j.at("jobs").get<int>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptArchive(std::string("stored config unreadable: ") + e.what());
  }
}

}  // namespace yamabe
