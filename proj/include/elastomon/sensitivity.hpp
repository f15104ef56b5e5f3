#pragma once

#include <vector>

#include <Eigen/Core>

#include "elastomon/fem.hpp"
#include "elastomon/mesh.hpp"

namespace elastomon {

/// Per-pixel Gram matrices of the background solutions:
///   lambda[k](l, m) = int_{B_k} div u_l div u_m,
///   mu[k](l, m)     = int_{B_k} 2 eps(u_l) : eps(u_m).
/// These are the negated Fréchet-derivative blocks, so both are PSD. The
/// flattened forms put entry (l, m) of pixel k at row l * M + m, column k.
struct SensitivitySet {
  int patches = 0;
  int pixels = 0;
  std::vector<Eigen::MatrixXd> lambda;
  std::vector<Eigen::MatrixXd> mu;
  Eigen::MatrixXd lambda_flat;
  Eigen::MatrixXd mu_flat;
};

SensitivitySet compute_sensitivities(const BoxMesh& mesh, const PixelPartition& partition,
                                     const std::vector<DisplacementField>& reference_solutions);

/// S_k^tau = S_k^mu + tau S_k^lambda for every pixel; tau must be >= 0.
std::vector<Eigen::MatrixXd> combine_tau(const SensitivitySet& s, double tau);

/// Row-major flattening: entry (l, m) goes to index l * M + m.
Eigen::VectorXd flatten_measurements(const Eigen::MatrixXd& v);

}  // namespace elastomon
