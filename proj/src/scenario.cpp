#include "heatcover/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace heatcover {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument("scenario: " + msg); }

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok) fail("unknown key '" + key + "' in '" + where + "'");
  }
}

double num(const json& v, const std::string& name) {
  if (!v.is_number()) fail("'" + name + "' must be a number");
  return v.get<double>();
}

Vec2 point(const json& v, const std::string& name) {
  if (!v.is_array() || v.size() != 2) fail("'" + name + "' must be a [x, y] pair");
  return {num(v[0], name), num(v[1], name)};
}

Rect rect(const json& v, const std::string& name) {
  if (!v.is_array() || v.size() != 4) fail("'" + name + "' must be [x0, y0, x1, y1]");
  return {num(v[0], name), num(v[1], name), num(v[2], name), num(v[3], name)};
}

MissionConfig from_json(const json& root) {
  if (!root.is_object()) fail("top level must be an object");
  check_keys(root, "scenario", {"region", "workload", "agents", "field", "mission", "output"});
  MissionConfig cfg;

  if (!root.contains("region")) fail("missing required block 'region'");
  {
    const json& r = root["region"];
    check_keys(r, "region", {"outer", "holes", "spacing"});
    if (!r.contains("outer")) fail("missing required key 'region.outer'");
    cfg.region.outer = rect(r["outer"], "region.outer");
    if (r.contains("holes")) {
      if (!r["holes"].is_array()) fail("'region.holes' must be an array of rectangles");
      for (const json& h : r["holes"]) cfg.region.holes.push_back(rect(h, "region.holes[]"));
    }
    cfg.region.spacing = r.contains("spacing") ? num(r["spacing"], "region.spacing") : 0.1;
  }

  if (root.contains("workload")) {
    const json& w = root["workload"];
    if (!w.is_array()) fail("'workload' must be an array of mixture terms");
    for (const json& term : w) {
      check_keys(term, "workload[]", {"amplitude", "center", "width"});
      MixtureTerm t;
      if (!term.contains("amplitude") || !term.contains("center") || !term.contains("width"))
        fail("each workload term needs 'amplitude', 'center' and 'width'");
      t.amplitude = num(term["amplitude"], "workload[].amplitude");
      t.center = point(term["center"], "workload[].center");
      t.width = num(term["width"], "workload[].width");
      cfg.workload.push_back(t);
    }
  }

  if (!root.contains("agents")) fail("missing required block 'agents'");
  {
    const json& a = root["agents"];
    check_keys(a, "agents", {"positions", "speed", "kernel"});
    if (!a.contains("positions")) fail("missing required key 'agents.positions'");
    if (!a["positions"].is_array() || a["positions"].empty())
      fail("'agents.positions' must be a non-empty array of points");
    for (const json& p : a["positions"])
      cfg.initial_positions.push_back(point(p, "agents.positions[]"));
    cfg.agent_speed = a.contains("speed") ? num(a["speed"], "agents.speed") : 0.5;
    if (a.contains("kernel")) {
      const json& k = a["kernel"];
      check_keys(k, "agents.kernel", {"P", "lambda", "r"});
      if (k.contains("P")) cfg.kernel.P = num(k["P"], "agents.kernel.P");
      if (k.contains("lambda")) cfg.kernel.lambda = num(k["lambda"], "agents.kernel.lambda");
      if (k.contains("r")) cfg.kernel.r = num(k["r"], "agents.kernel.r");
    }
  }

  if (root.contains("field")) {
    const json& f = root["field"];
    check_keys(f, "field", {"alpha", "beta", "solver_tol", "solver_max_iter"});
    if (f.contains("alpha")) cfg.field.alpha = num(f["alpha"], "field.alpha");
    if (f.contains("beta")) cfg.field.beta = num(f["beta"], "field.beta");
    if (f.contains("solver_tol")) cfg.field.solver_tol = num(f["solver_tol"], "field.solver_tol");
    if (f.contains("solver_max_iter"))
      cfg.field.solver_max_iter = static_cast<int>(num(f["solver_max_iter"], "field.solver_max_iter"));
  }

  if (root.contains("mission")) {
    const json& m = root["mission"];
    check_keys(m, "mission",
               {"algorithm", "dt", "T_u", "k_max", "eps_M", "max_steps", "mesh_max_edge", "seed"});
    if (m.contains("algorithm")) {
      const std::string name = m["algorithm"].is_string() ? m["algorithm"].get<std::string>() : "";
      if (name == "algo1")
        cfg.algorithm = Algorithm::Algo1;
      else if (name == "algo3")
        cfg.algorithm = Algorithm::Algo3;
      else if (name == "centralized")
        cfg.algorithm = Algorithm::Centralized;
      else
        fail("'mission.algorithm' must be one of \"algo1\", \"algo3\", \"centralized\"");
    }
    if (m.contains("dt")) cfg.dt = num(m["dt"], "mission.dt");
    if (m.contains("T_u")) {
      if (m["T_u"].is_array()) {
        for (const json& v : m["T_u"])
          cfg.T_u_per_iteration.push_back(num(v, "mission.T_u[]"));
        if (cfg.T_u_per_iteration.empty()) fail("'mission.T_u' array must not be empty");
        cfg.T_u = cfg.T_u_per_iteration.front();
      } else {
        cfg.T_u = num(m["T_u"], "mission.T_u");
      }
    }
    if (m.contains("k_max")) cfg.k_max = static_cast<int>(num(m["k_max"], "mission.k_max"));
    if (m.contains("eps_M")) cfg.eps_M = num(m["eps_M"], "mission.eps_M");
    if (m.contains("max_steps")) cfg.max_steps = static_cast<long>(num(m["max_steps"], "mission.max_steps"));
    if (m.contains("mesh_max_edge")) cfg.mesh_max_edge = num(m["mesh_max_edge"], "mission.mesh_max_edge");
    if (m.contains("seed")) cfg.seed = static_cast<uint64_t>(num(m["seed"], "mission.seed"));
  }

  if (root.contains("output")) {
    const json& o = root["output"];
    check_keys(o, "output",
               {"directory", "trajectory", "workload_curve", "partition_raster", "field_snapshots",
                "summary", "sample_stride"});
    auto flag = [&](const char* key, bool dflt) {
      if (!o.contains(key)) return dflt;
      if (!o[key].is_boolean()) fail(std::string("'output.") + key + "' must be a boolean");
      return o[key].get<bool>();
    };
    if (o.contains("directory")) {
      if (!o["directory"].is_string()) fail("'output.directory' must be a string");
      cfg.output.directory = o["directory"].get<std::string>();
    }
    cfg.output.trajectory = flag("trajectory", true);
    cfg.output.workload_curve = flag("workload_curve", true);
    cfg.output.partition_raster = flag("partition_raster", false);
    cfg.output.field_snapshots = flag("field_snapshots", false);
    cfg.output.summary = flag("summary", true);
    if (o.contains("sample_stride"))
      cfg.output.sample_stride = static_cast<int>(num(o["sample_stride"], "output.sample_stride"));
  }

  validate_config(cfg);
  return cfg;
}

}  // namespace

void validate_config(const MissionConfig& cfg) {
  if (!(cfg.region.spacing > 0.0)) fail("region.spacing must be positive");
  if (!(cfg.region.outer.width() > 0.0) || !(cfg.region.outer.height() > 0.0))
    fail("region.outer must have positive width and height");
  for (const MixtureTerm& t : cfg.workload) {
    if (t.amplitude < 0.0) fail("workload amplitude must be nonnegative");
    if (!(t.width > 0.0)) fail("workload width must be positive");
  }
  if (cfg.initial_positions.empty()) fail("agents.positions must contain at least one point");
  if (!(cfg.agent_speed > 0.0)) fail("agents.speed must be positive");
  if (!(cfg.kernel.P > 0.0)) fail("agents.kernel.P must be positive");
  if (!(cfg.kernel.lambda > 0.0)) fail("agents.kernel.lambda must be positive");
  if (!(cfg.kernel.r > 0.0)) fail("agents.kernel.r must be positive");
  if (!(cfg.field.alpha > 0.0)) fail("field.alpha must be positive");
  if (!(cfg.field.beta > 0.0)) fail("field.beta must be positive");
  if (!(cfg.field.solver_tol > 0.0)) fail("field.solver_tol must be positive");
  if (cfg.field.solver_max_iter < 1) fail("field.solver_max_iter must be positive");
  if (!(cfg.dt > 0.0)) fail("mission.dt must be positive");
  if (cfg.T_u < 0.0) fail("mission.T_u must be nonnegative");
  for (double v : cfg.T_u_per_iteration)
    if (v < 0.0) fail("mission.T_u entries must be nonnegative");
  if (cfg.k_max < 1) fail("mission.k_max must be at least 1");
  if (cfg.eps_M < 0.0) fail("mission.eps_M must be nonnegative");
  if (cfg.max_steps < 1) fail("mission.max_steps must be positive");
  // Early H_max/r check: a mesh edge bound at or above r voids the
  // full-triangle coverage guarantee.
  if (!(cfg.mesh_edge() < cfg.kernel.r))
    fail("mission.mesh_max_edge must be smaller than agents.kernel.r");
  if (cfg.output.sample_stride < 1) fail("output.sample_stride must be at least 1");
}

MissionConfig parse_scenario_text(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("scenario: parse error in " + origin + ": " + e.what());
  }
  return from_json(root);
}

MissionConfig parse_scenario(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("scenario: cannot open file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_scenario_text(ss.str(), path);
}

std::string serialize_scenario(const MissionConfig& cfg) {
  json root;
  json region;
  region["outer"] = {cfg.region.outer.x0, cfg.region.outer.y0, cfg.region.outer.x1, cfg.region.outer.y1};
  json holes = json::array();
  for (const Rect& h : cfg.region.holes) holes.push_back({h.x0, h.y0, h.x1, h.y1});
  region["holes"] = std::move(holes);
  region["spacing"] = cfg.region.spacing;
  root["region"] = std::move(region);

  json mix = json::array();
  for (const MixtureTerm& t : cfg.workload)
    mix.push_back({{"amplitude", t.amplitude}, {"center", {t.center.x, t.center.y}}, {"width", t.width}});
  root["workload"] = std::move(mix);

  json agents;
  json pos = json::array();
  for (const Vec2& p : cfg.initial_positions) pos.push_back({p.x, p.y});
  agents["positions"] = std::move(pos);
  agents["speed"] = cfg.agent_speed;
  agents["kernel"] = {{"P", cfg.kernel.P}, {"lambda", cfg.kernel.lambda}, {"r", cfg.kernel.r}};
  root["agents"] = std::move(agents);

  root["field"] = {{"alpha", cfg.field.alpha},
                   {"beta", cfg.field.beta},
                   {"solver_tol", cfg.field.solver_tol},
                   {"solver_max_iter", cfg.field.solver_max_iter}};

  json mission;
  mission["algorithm"] = algorithm_name(cfg.algorithm);
  mission["dt"] = cfg.dt;
  if (cfg.T_u_per_iteration.empty())
    mission["T_u"] = cfg.T_u;
  else
    mission["T_u"] = cfg.T_u_per_iteration;
  mission["k_max"] = cfg.k_max;
  mission["eps_M"] = cfg.eps_M;
  mission["max_steps"] = cfg.max_steps;
  mission["mesh_max_edge"] = cfg.mesh_max_edge;
  mission["seed"] = cfg.seed;
  root["mission"] = std::move(mission);

  root["output"] = {{"directory", cfg.output.directory},
                    {"trajectory", cfg.output.trajectory},
                    {"workload_curve", cfg.output.workload_curve},
                    {"partition_raster", cfg.output.partition_raster},
                    {"field_snapshots", cfg.output.field_snapshots},
                    {"summary", cfg.output.summary},
                    {"sample_stride", cfg.output.sample_stride}};
  return root.dump(2) + "\n";
}

}  // namespace heatcover
