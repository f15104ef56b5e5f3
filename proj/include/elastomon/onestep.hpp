#pragma once

#include <Eigen/Core>

#include "elastomon/sensitivity.hpp"

namespace elastomon {

/// Tikhonov weights of the one-step linearization; they enter the stacked
/// system unsquared, hence squared in the normal matrix.
struct OneStepConfig {
  double omega = 0.0;
  double sigma = 0.0;
};

struct OneStepResult {
  Eigen::VectorXd kappa;  // lambda contrast per pixel
  Eigen::VectorXd nu;     // mu contrast per pixel
};

/// Solves [SlᵀSl + w²I, SlᵀSm; SmᵀSl, SmᵀSm + s²I] (kappa; nu) = (Slᵀv; Smᵀv).
/// Throws NumericalFailure when the normal matrix is not positive definite.
OneStepResult onestep_solve(const Eigen::MatrixXd& s_lambda, const Eigen::MatrixXd& s_mu,
                            const Eigen::VectorXd& v, const OneStepConfig& cfg);

OneStepResult onestep_reconstruct(const SensitivitySet& s, const Eigen::MatrixXd& v_delta, const OneStepConfig& cfg);

/// Gradient of the Tikhonov objective at (kappa, nu), i.e. AᵀA x - Aᵀb.
Eigen::VectorXd onestep_gradient(const Eigen::MatrixXd& s_lambda, const Eigen::MatrixXd& s_mu,
                                 const Eigen::VectorXd& v, const OneStepConfig& cfg, const OneStepResult& x);

}  // namespace elastomon
