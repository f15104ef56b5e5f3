#include "elastomon/montest.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "elastomon/errors.hpp"
#include "elastomon/linalg.hpp"

namespace elastomon {

void TestWeights::validate() const {
  if (!(alpha_lambda >= 0.0) || !(alpha_mu >= 0.0) || !std::isfinite(alpha_lambda) || !std::isfinite(alpha_mu)) {
    throw InvalidArgument("test weights must be finite and non-negative");
  }
  if (alpha_lambda + alpha_mu <= 0.0) throw InvalidArgument("at least one test weight must be positive");
}

TestWeights TestWeights::admissible_limit(double lambda0, double mu0, double lambda1, double mu1) {
  return {lambda0 / lambda1 * (lambda1 - lambda0), mu0 / mu1 * (mu1 - mu0)};
}

MonotonicityTestOutcome linearized_test_detail(int k, const TestWeights& weights, const Eigen::MatrixXd& lambda0,
                                               const Eigen::MatrixXd& lambda_delta, double delta,
                                               const SensitivitySet& s) {
  weights.validate();
  if (!(delta >= 0.0)) throw InvalidArgument("delta must be non-negative");
  if (k < 0 || k >= s.pixels) throw InvalidArgument("pixel index out of range");
  const Eigen::Index m = s.patches;
  if (lambda0.rows() != m || lambda0.cols() != m || lambda_delta.rows() != m || lambda_delta.cols() != m) {
    throw InvalidArgument("NtD matrices do not match the sensitivity set");
  }
  Eigen::MatrixXd test = lambda0 - lambda_delta - weights.alpha_lambda * s.lambda[k] - weights.alpha_mu * s.mu[k];
  test.diagonal().array() += delta;
  test = linalg::symmetrize(test);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(test, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalFailure("eigensolver failed in the monotonicity test");
  MonotonicityTestOutcome out;
  out.min_eigenvalue = es.eigenvalues().minCoeff();
  out.norm = es.eigenvalues().cwiseAbs().maxCoeff();
  out.inside = out.min_eigenvalue >= -1e-12 * out.norm;
  return out;
}

bool linearized_test(int k, const TestWeights& weights, const Eigen::MatrixXd& lambda0,
                     const Eigen::MatrixXd& lambda_delta, double delta, const SensitivitySet& s) {
  return linearized_test_detail(k, weights, lambda0, lambda_delta, delta, s).inside;
}

std::vector<bool> run_montest(const TestWeights& weights, const Eigen::MatrixXd& lambda0,
                              const Eigen::MatrixXd& lambda_delta, double delta, const SensitivitySet& s) {
  std::vector<bool> map(static_cast<std::size_t>(s.pixels));
  for (int k = 0; k < s.pixels; ++k) map[k] = linearized_test(k, weights, lambda0, lambda_delta, delta, s);
  return map;
}

}  // namespace elastomon
