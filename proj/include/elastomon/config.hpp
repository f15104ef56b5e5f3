#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "elastomon/data.hpp"
#include "elastomon/errors.hpp"
#include "elastomon/mesh.hpp"
#include "elastomon/monreg.hpp"
#include "elastomon/montest.hpp"
#include "elastomon/onestep.hpp"

namespace elastomon {

/// Malformed or inconsistent run configuration.
class ConfigError : public InvalidArgument {
public:
  using InvalidArgument::InvalidArgument;
};

struct RunConfig {
  struct Mesh {
    GridSize resolution{12, 12, 12};
    Vec3 extents = Vec3::Ones();
    GridSize pixels{6, 6, 6};
  } mesh;
  struct Patches {
    int per_face_grid = 2;
    Face dirichlet_face = Face::ZMinus;
  } patches;
  struct Material {
    double lambda0 = 6.6211e5;
    double mu0 = 6.6892e3;
  } material;
  InclusionGeometry inclusion;
  ContrastBounds bounds{1.2e6, 1.7e6, 1.2e4, 1.7e4, SignCase::Increase};
  struct Noise {
    double eta = 0.0;
    std::uint64_t seed = 20240229;
  } noise;
  struct Solver {
    double fem_tol = 1e-10;
    double qp_tol = 1e-10;
    int max_iter = 5000;
  } solver;
  OneStepConfig onestep{5e-15, 3e-11};
  TestWeights montest{4.6e5, 4.7e3};
  struct Output {
    std::string dir = "out";
    bool emit_vtk = false;
  } output;

  /// Desk configuration with two separated pixel-aligned inclusions carrying the
  /// tumour/tissue contrast.
  static RunConfig desk();

  /// Throws ConfigError when any downstream invariant is violated.
  void validate() const;
};

/// Every accepted key in dotted form.
const std::vector<std::string>& config_keys();

/// Accepts nested objects, dotted keys or a mix. Unknown keys are rejected.
/// Missing keys keep the values of `base`.
RunConfig config_from_json(const nlohmann::json& j, const RunConfig& base = RunConfig::desk());
RunConfig load_config(const std::string& path, const RunConfig& base = RunConfig::desk());

/// Sets one dotted key from a JSON value (used for command-line overrides).
void apply_override(RunConfig& cfg, const std::string& key, const nlohmann::json& value);

nlohmann::json config_to_json(const RunConfig& cfg);

}  // namespace elastomon
