#include "elastomon/onestep.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "elastomon/errors.hpp"

namespace elastomon {

namespace {

Eigen::MatrixXd stacked_columns(const Eigen::MatrixXd& s_lambda, const Eigen::MatrixXd& s_mu) {
  Eigen::MatrixXd s(s_lambda.rows(), s_lambda.cols() + s_mu.cols());
  s << s_lambda, s_mu;
  return s;
}

}  // namespace

OneStepResult onestep_solve(const Eigen::MatrixXd& s_lambda, const Eigen::MatrixXd& s_mu,
                            const Eigen::VectorXd& v, const OneStepConfig& cfg) {
  if (!(cfg.omega >= 0.0) || !(cfg.sigma >= 0.0)) throw InvalidArgument("omega and sigma must be non-negative");
  if (s_lambda.rows() != s_mu.rows() || s_lambda.cols() != s_mu.cols() || s_lambda.rows() != v.size()) {
    throw InvalidArgument("sensitivity layouts and data length are inconsistent");
  }
  const Eigen::Index p = s_lambda.cols();
  const Eigen::MatrixXd s = stacked_columns(s_lambda, s_mu);

  Eigen::MatrixXd normal = s.transpose() * s;
  normal.diagonal().head(p).array() += cfg.omega * cfg.omega;
  normal.diagonal().tail(p).array() += cfg.sigma * cfg.sigma;
  const Eigen::VectorXd rhs = s.transpose() * v;

  Eigen::LLT<Eigen::MatrixXd> llt(normal);
  if (llt.info() != Eigen::Success || llt.rcond() < 1e-15) {
    throw NumericalFailure("one-step normal matrix is singular; increase omega or sigma");
  }
  Eigen::VectorXd x = llt.solve(rhs);
  x += llt.solve(rhs - normal * x);

  OneStepResult out;
  out.kappa = x.head(p);
  out.nu = x.tail(p);
  return out;
}

OneStepResult onestep_reconstruct(const SensitivitySet& s, const Eigen::MatrixXd& v_delta, const OneStepConfig& cfg) {
  if (v_delta.rows() != s.patches || v_delta.cols() != s.patches) {
    throw InvalidArgument("data matrix does not match the number of patches");
  }
  return onestep_solve(s.lambda_flat, s.mu_flat, flatten_measurements(v_delta), cfg);
}

Eigen::VectorXd onestep_gradient(const Eigen::MatrixXd& s_lambda, const Eigen::MatrixXd& s_mu,
                                 const Eigen::VectorXd& v, const OneStepConfig& cfg, const OneStepResult& x) {
  const Eigen::VectorXd residual = s_lambda * x.kappa + s_mu * x.nu - v;
  Eigen::VectorXd g(2 * x.kappa.size());
  g.head(x.kappa.size()) = s_lambda.transpose() * residual + cfg.omega * cfg.omega * x.kappa;
  g.tail(x.nu.size()) = s_mu.transpose() * residual + cfg.sigma * cfg.sigma * x.nu;
  return g;
}

}  // namespace elastomon
