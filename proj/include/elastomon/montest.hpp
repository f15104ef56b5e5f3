#pragma once

#include <vector>

#include <Eigen/Core>

#include "elastomon/sensitivity.hpp"

namespace elastomon {

/// Linearization weights alpha^lambda, alpha^mu (Pa) of the monotonicity test.
struct TestWeights {
  double alpha_lambda = 0.0;
  double alpha_mu = 0.0;

  void validate() const;
  /// Largest weights covered by the exact-data guarantee for a known inclusion
  /// (lambda1, mu1) in background (lambda0, mu0): (l0/l1)(l1-l0), (m0/m1)(m1-m0).
  static TestWeights admissible_limit(double lambda0, double mu0, double lambda1, double mu1);
};

struct MonotonicityTestOutcome {
  bool inside = false;
  double min_eigenvalue = 0.0;  // of the test matrix
  double norm = 0.0;            // spectral norm of the test matrix
};

/// Pixel k is marked inside when
///   Lambda0 - alpha^lambda S_k^lambda - alpha^mu S_k^mu - Lambda^delta + delta I
/// is PSD up to -1e-12 times its spectral norm.
MonotonicityTestOutcome linearized_test_detail(int k, const TestWeights& weights, const Eigen::MatrixXd& lambda0,
                                               const Eigen::MatrixXd& lambda_delta, double delta,
                                               const SensitivitySet& s);

bool linearized_test(int k, const TestWeights& weights, const Eigen::MatrixXd& lambda0,
                     const Eigen::MatrixXd& lambda_delta, double delta, const SensitivitySet& s);

/// The test over every pixel.
std::vector<bool> run_montest(const TestWeights& weights, const Eigen::MatrixXd& lambda0,
                              const Eigen::MatrixXd& lambda_delta, double delta, const SensitivitySet& s);

}  // namespace elastomon
