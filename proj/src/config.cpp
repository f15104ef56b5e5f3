#include "elastomon/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace elastomon {

using nlohmann::json;

RunConfig RunConfig::desk() {
  RunConfig cfg;
  const double dl = 2.3177e6 - 6.6211e5;
  const double dm = 2.3411e4 - 6.6892e3;
  cfg.inclusion.boxes = {
      InclusionBox{{0, 2, 3}, {2, 4, 5}, dl, dm},
      InclusionBox{{4, 2, 3}, {6, 4, 5}, dl, dm},
  };
  return cfg;
}

void RunConfig::validate() const {
  try {
    for (int a = 0; a < 3; ++a) {
      if (mesh.resolution[a] < 1 || mesh.pixels[a] < 1) throw ConfigError("mesh.resolution and mesh.pixels must be >= 1");
      if (mesh.resolution[a] % mesh.pixels[a] != 0) {
        throw ConfigError("mesh.resolution must be a multiple of mesh.pixels on every axis");
      }
      if (!(mesh.extents[a] > 0.0)) throw ConfigError("mesh.extents must be positive");
    }
    if (patches.per_face_grid < 1) throw ConfigError("patches.per_face_grid must be >= 1");
    for (int a = 0; a < 3; ++a) {
      if (a != face_axis(patches.dirichlet_face) && mesh.resolution[a] % patches.per_face_grid != 0) {
        throw ConfigError("mesh.resolution must be a multiple of patches.per_face_grid on the Neumann faces");
      }
    }
    if (!(material.lambda0 > 0.0) || !(material.mu0 > 0.0)) throw ConfigError("material.lambda0/mu0 must be positive");
    bounds.validate();
    if (!(noise.eta >= 0.0)) throw ConfigError("noise.eta must be non-negative");
    if (!(solver.fem_tol > 0.0) || solver.fem_tol > 1e-6) throw ConfigError("solver.fem_tol must lie in (0, 1e-6]");
    if (!(solver.qp_tol > 0.0)) throw ConfigError("solver.qp_tol must be positive");
    if (solver.max_iter < 1) throw ConfigError("solver.max_iter must be >= 1");
    if (!(onestep.omega >= 0.0) || !(onestep.sigma >= 0.0)) throw ConfigError("onestep weights must be non-negative");
    montest.validate();
    if (output.dir.empty()) throw ConfigError("output.dir must not be empty");

    for (const auto& box : inclusion.boxes) {
      for (int a = 0; a < 3; ++a) {
        if (box.lo[a] < 0 || box.hi[a] > mesh.pixels[a] || box.lo[a] >= box.hi[a]) {
          throw ConfigError("inclusion box lies outside the pixel grid or is empty");
        }
      }
      const double lam = material.lambda0 + box.gamma_lambda;
      const double mu = material.mu0 + box.gamma_mu;
      if (!(lam > 0.0) || !(mu > 0.0)) throw ConfigError("inclusion makes a Lame parameter non-positive");
      const bool inc = bounds.sign_case == SignCase::Increase;
      const double gl = inc ? box.gamma_lambda : -box.gamma_lambda;
      const double gm = inc ? box.gamma_mu : -box.gamma_mu;
      if (gl < bounds.c_lambda || gl > bounds.C_lambda || gm < bounds.c_mu || gm > bounds.C_mu) {
        throw ConfigError("inclusion contrast lies outside the configured bounds");
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

namespace {

void flatten(const json& j, const std::string& prefix, std::map<std::string, json>& out) {
  if (j.is_object() && prefix != "inclusions") {
    for (const auto& [key, value] : j.items()) {
      flatten(value, prefix.empty() ? key : prefix + "." + key, out);
    }
  } else {
    out[prefix] = j;
  }
}

GridSize grid_from(const json& v) {
  if (!v.is_array() || v.size() != 3) throw ConfigError("expected an array of three integers");
  return {v[0].get<int>(), v[1].get<int>(), v[2].get<int>()};
}

std::array<int, 3> triple_from(const json& v) {
  const GridSize g = grid_from(v);
  return {g.nx, g.ny, g.nz};
}

Vec3 vec_from(const json& v) {
  if (!v.is_array() || v.size() != 3) throw ConfigError("expected an array of three numbers");
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

InclusionGeometry inclusions_from(const json& v) {
  if (!v.is_array()) throw ConfigError("inclusions must be an array");
  InclusionGeometry g;
  for (const auto& item : v) {
    if (!item.is_object()) throw ConfigError("each inclusion must be an object");
    for (const auto& [key, _] : item.items()) {
      if (key != "lo" && key != "hi" && key != "gamma_lambda" && key != "gamma_mu") {
        throw ConfigError("unknown inclusion key '" + key + "'");
      }
    }
    InclusionBox box;
    box.lo = triple_from(item.at("lo"));
    box.hi = triple_from(item.at("hi"));
    box.gamma_lambda = item.at("gamma_lambda").get<double>();
    box.gamma_mu = item.at("gamma_mu").get<double>();
    g.boxes.push_back(box);
  }
  return g;
}

using Setter = std::function<void(RunConfig&, const json&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"mesh.resolution", [](RunConfig& c, const json& v) { c.mesh.resolution = grid_from(v); }},
      {"mesh.extents", [](RunConfig& c, const json& v) { c.mesh.extents = vec_from(v); }},
      {"mesh.pixels", [](RunConfig& c, const json& v) { c.mesh.pixels = grid_from(v); }},
      {"patches.per_face_grid", [](RunConfig& c, const json& v) { c.patches.per_face_grid = v.get<int>(); }},
      {"patches.dirichlet_face",
       [](RunConfig& c, const json& v) { c.patches.dirichlet_face = parse_face(v.get<std::string>()); }},
      {"material.lambda0", [](RunConfig& c, const json& v) { c.material.lambda0 = v.get<double>(); }},
      {"material.mu0", [](RunConfig& c, const json& v) { c.material.mu0 = v.get<double>(); }},
      {"inclusions", [](RunConfig& c, const json& v) { c.inclusion = inclusions_from(v); }},
      {"bounds.c_lambda", [](RunConfig& c, const json& v) { c.bounds.c_lambda = v.get<double>(); }},
      {"bounds.C_lambda", [](RunConfig& c, const json& v) { c.bounds.C_lambda = v.get<double>(); }},
      {"bounds.c_mu", [](RunConfig& c, const json& v) { c.bounds.c_mu = v.get<double>(); }},
      {"bounds.C_mu", [](RunConfig& c, const json& v) { c.bounds.C_mu = v.get<double>(); }},
      {"bounds.sign_case",
       [](RunConfig& c, const json& v) { c.bounds.sign_case = parse_sign_case(v.get<std::string>()); }},
      {"noise.eta", [](RunConfig& c, const json& v) { c.noise.eta = v.get<double>(); }},
      {"noise.seed", [](RunConfig& c, const json& v) { c.noise.seed = v.get<std::uint64_t>(); }},
      {"solver.fem_tol", [](RunConfig& c, const json& v) { c.solver.fem_tol = v.get<double>(); }},
      {"solver.qp_tol", [](RunConfig& c, const json& v) { c.solver.qp_tol = v.get<double>(); }},
      {"solver.max_iter", [](RunConfig& c, const json& v) { c.solver.max_iter = v.get<int>(); }},
      {"onestep.omega", [](RunConfig& c, const json& v) { c.onestep.omega = v.get<double>(); }},
      {"onestep.sigma", [](RunConfig& c, const json& v) { c.onestep.sigma = v.get<double>(); }},
      {"montest.alpha_lambda", [](RunConfig& c, const json& v) { c.montest.alpha_lambda = v.get<double>(); }},
      {"montest.alpha_mu", [](RunConfig& c, const json& v) { c.montest.alpha_mu = v.get<double>(); }},
      {"output.dir", [](RunConfig& c, const json& v) { c.output.dir = v.get<std::string>(); }},
      {"output.emit_vtk", [](RunConfig& c, const json& v) { c.output.emit_vtk = v.get<bool>(); }},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

void apply_override(RunConfig& cfg, const std::string& key, const json& value) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError("unknown configuration key '" + key + "'");
  try {
    it->second(cfg, value);
  } catch (const json::exception& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

RunConfig config_from_json(const json& j, const RunConfig& base) {
  if (!j.is_object()) throw ConfigError("configuration root must be an object");
  std::map<std::string, json> flat;
  flatten(j, "", flat);
  RunConfig cfg = base;
  for (const auto& [key, value] : flat) apply_override(cfg, key, value);
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path, const RunConfig& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse '" + path + "': " + e.what());
  }
  return config_from_json(j, base);
}

json config_to_json(const RunConfig& c) {
  json inclusions = json::array();
  for (const auto& b : c.inclusion.boxes) {
    inclusions.push_back({{"lo", b.lo}, {"hi", b.hi}, {"gamma_lambda", b.gamma_lambda}, {"gamma_mu", b.gamma_mu}});
  }
  const auto grid = [](const GridSize& g) { return json::array({g.nx, g.ny, g.nz}); };
  return json{
      {"mesh",
       {{"resolution", grid(c.mesh.resolution)},
        {"extents", {c.mesh.extents[0], c.mesh.extents[1], c.mesh.extents[2]}},
        {"pixels", grid(c.mesh.pixels)}}},
      {"patches",
       {{"per_face_grid", c.patches.per_face_grid}, {"dirichlet_face", std::string(face_name(c.patches.dirichlet_face))}}},
      {"material", {{"lambda0", c.material.lambda0}, {"mu0", c.material.mu0}}},
      {"inclusions", inclusions},
      {"bounds",
       {{"c_lambda", c.bounds.c_lambda},
        {"C_lambda", c.bounds.C_lambda},
        {"c_mu", c.bounds.c_mu},
        {"C_mu", c.bounds.C_mu},
        {"sign_case", std::string(sign_case_name(c.bounds.sign_case))}}},
      {"noise", {{"eta", c.noise.eta}, {"seed", c.noise.seed}}},
      {"solver", {{"fem_tol", c.solver.fem_tol}, {"qp_tol", c.solver.qp_tol}, {"max_iter", c.solver.max_iter}}},
      {"onestep", {{"omega", c.onestep.omega}, {"sigma", c.onestep.sigma}}},
      {"montest", {{"alpha_lambda", c.montest.alpha_lambda}, {"alpha_mu", c.montest.alpha_mu}}},
      {"output", {{"dir", c.output.dir}, {"emit_vtk", c.output.emit_vtk}}},
  };
}

}  // namespace elastomon
