#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "elastomon/errors.hpp"

namespace elastomon {

/// Whether the inclusion is stiffer (lambda >= lambda0, mu >= mu0) or softer
/// than the background.
enum class SignCase { Increase, Decrease };

std::string_view sign_case_name(SignCase c);
SignCase parse_sign_case(std::string_view name);

/// Known bounds c <= gamma <= C on the Lamé contrasts (Pa).
struct ContrastBounds {
  double c_lambda = 0.0;
  double C_lambda = 0.0;
  double c_mu = 0.0;
  double C_mu = 0.0;
  SignCase sign_case = SignCase::Increase;

  void validate() const;
};

struct AmaxTau {
  double a_max = 0.0;
  double tau = 0.0;
};

/// Increase case: a_max = mu0 - mu0²/(mu0 + c_mu), tau = (lambda0 - lambda0²/(lambda0 + c_lambda)) / a_max.
/// Decrease case: a_max = c_mu, tau = c_lambda / c_mu.
AmaxTau compute_amax_tau(double lambda0, double mu0, const ContrastBounds& bounds);

/// Largest a >= 0 with L Lᵀ - a S ⪰ 0, i.e. 1 / lambda_max(L⁻¹ S L⁻ᵀ).
/// Returns +infinity when S vanishes.
double compute_beta(const Eigen::MatrixXd& s_tau, const Eigen::MatrixXd& cholesky_lower);

std::vector<double> compute_betas(const std::vector<Eigen::MatrixXd>& s_tau, const Eigen::MatrixXd& cholesky_lower);

struct MonRegConstraints {
  double a_max = 0.0;
  double tau = 0.0;
  double delta = 0.0;
  SignCase sign_case = SignCase::Increase;
  std::vector<double> beta;

  /// min(a_max, beta_k): the magnitude bound on pixel k.
  [[nodiscard]] double bound(std::size_t k) const;
};

struct QpOptions {
  double tol = 1e-10;
  int max_iter = 5000;
};

/// Minimizer of 0.5 xᵀHx - cᵀx over lower <= x <= upper for PSD H.
struct BoxQpResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double kkt_residual = 0.0;  // ||P(x - grad) - x||_inf
  bool converged = false;
};

/// Projected gradient steps alternating with projected Newton steps on the
/// free variables, both with Armijo backtracking along the projection arc.
BoxQpResult solve_box_qp(const Eigen::MatrixXd& hessian, const Eigen::VectorXd& linear,
                         const Eigen::VectorXd& lower, const Eigen::VectorXd& upper, const QpOptions& opts);

struct ReconstructionResult {
  Eigen::VectorXd nu;          // mu contrast per pixel (Pa)
  Eigen::VectorXd kappa;       // tau * nu
  Eigen::VectorXd lambda_map;  // lambda0 + kappa
  Eigen::VectorXd mu_map;      // mu0 + nu
  int iterations = 0;
  double objective = 0.0;      // ||sum_k nu_k S_k - V||_F
  double kkt_residual = 0.0;
};

/// Frobenius Gram matrix G(j, k) = <S_j, S_k>_F.
Eigen::MatrixXd frobenius_gram(const std::vector<Eigen::MatrixXd>& s_tau);

/// ||sum_k nu_k S_k - V||_F.
double residual_norm(const std::vector<Eigen::MatrixXd>& s_tau, const Eigen::MatrixXd& v, const Eigen::VectorXd& nu);

/// Non-convergence of the box-constrained solve; keeps the last iterate.
class QpNotConverged : public NumericalFailure {
public:
  QpNotConverged(const std::string& what, ReconstructionResult last)
      : NumericalFailure(what), last_(std::move(last)) {}
  [[nodiscard]] const ReconstructionResult& last_iterate() const { return last_; }

private:
  ReconstructionResult last_;
};

/// Minimizes ||sum_k nu_k S_k^tau - V||_F over the constraint box. Throws
/// QpNotConverged if the KKT residual does not reach opts.tol.
ReconstructionResult solve_box_constrained(const std::vector<Eigen::MatrixXd>& s_tau, const Eigen::MatrixXd& v_delta,
                                           const MonRegConstraints& constraints, double lambda0, double mu0,
                                           const QpOptions& opts = {});

}  // namespace elastomon
