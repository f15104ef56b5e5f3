#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "elastomon/config.hpp"
#include "elastomon/data.hpp"
#include "elastomon/fem.hpp"
#include "elastomon/mesh.hpp"
#include "elastomon/monreg.hpp"
#include "elastomon/montest.hpp"
#include "elastomon/onestep.hpp"
#include "elastomon/sensitivity.hpp"

namespace elastomon {

/// Geometry and ground truth of one run; immutable after construction.
struct Problem {
  RunConfig config;
  BoxMesh mesh;
  PixelPartition partition;
  PatchSet patches;
  std::vector<bool> truth;  // per pixel: inside D
  LameField background;
  LameField truth_field;

  [[nodiscard]] int pixel_count() const { return partition.pixel_count(); }
};

Problem build_problem(const RunConfig& config);

/// Forward data: NtD matrices of the background and of the true field plus
/// the noisy variant, and the background solutions reused for sensitivities.
struct ForwardData {
  Eigen::MatrixXd lambda0;
  Eigen::MatrixXd lambda;
  Eigen::MatrixXd lambda_delta;
  double delta = 0.0;
  double eta = 0.0;
  std::uint64_t seed = 0;
  LinearSolverKind solver = LinearSolverKind::SparseCholesky;
  double max_energy_mismatch = 0.0;
  double seconds = 0.0;
  std::vector<DisplacementField> reference;
};

ForwardData run_forward(const Problem& problem);

/// Replaces the noisy measurement of `data` with a fresh draw.
void renoise(ForwardData& data, double eta, std::uint64_t seed);

/// Background solutions only (used when forward data is read from disk).
std::vector<DisplacementField> reference_solutions(const Problem& problem);

struct MonRegRun {
  AmaxTau amax_tau;
  MonRegConstraints constraints;
  ReconstructionResult result;
};

/// Steps S^tau -> beta -> box-constrained solve for the given measurements.
MonRegRun run_monreg(const Problem& problem, const SensitivitySet& s, const Eigen::MatrixXd& lambda0,
                     const Eigen::MatrixXd& lambda_delta, double delta);

/// Pixels whose |contrast| exceeds a_max / 2 but lie outside D, plus pixels
/// of D that stay below it.
int count_misclassified(const Eigen::VectorXd& nu, double a_max, const std::vector<bool>& truth);
int count_misclassified(const std::vector<bool>& predicted, const std::vector<bool>& truth);

struct SweepRow {
  double eta = 0.0;
  double delta = 0.0;
  int monreg_misclassified = 0;
  int onestep_misclassified = 0;
  int montest_misclassified = 0;
  double monreg_deviation = 0.0;  // ||nu_delta - nu_exact||_inf
};

/// Runs every method at each noise level with the same seed.
std::vector<SweepRow> noise_sweep(const Problem& problem, const ForwardData& data, const SensitivitySet& s,
                                  const std::vector<double>& etas, std::uint64_t seed);

/// Runs `body` and prefixes numerical failures with a stage label.
template <class Body>
auto staged(const char* stage, Body&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const QpNotConverged&) {
    throw;
  } catch (const NumericalFailure& e) {
    throw NumericalFailure(std::string("[") + stage + "] " + e.what());
  }
}

}  // namespace elastomon
