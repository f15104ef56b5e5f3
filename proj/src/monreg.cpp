#include "elastomon/monreg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "elastomon/linalg.hpp"

namespace elastomon {

std::string_view sign_case_name(SignCase c) { return c == SignCase::Increase ? "increase" : "decrease"; }

SignCase parse_sign_case(std::string_view name) {
  if (name == "increase") return SignCase::Increase;
  if (name == "decrease") return SignCase::Decrease;
  throw InvalidArgument("sign case must be 'increase' or 'decrease'");
}

void ContrastBounds::validate() const {
  const double vals[] = {c_lambda, C_lambda, c_mu, C_mu};
  for (double v : vals) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("contrast bounds must be finite and non-negative");
  }
  if (c_lambda > C_lambda || c_mu > C_mu) throw InvalidArgument("lower contrast bounds exceed upper bounds");
  if (!(c_mu > 0.0)) throw InvalidArgument("c_mu must be positive");
  if (sign_case == SignCase::Increase && !(c_lambda > 0.0)) {
    throw InvalidArgument("c_lambda must be positive in the increase case");
  }
}

AmaxTau compute_amax_tau(double lambda0, double mu0, const ContrastBounds& bounds) {
  bounds.validate();
  if (!(lambda0 > 0.0) || !(mu0 > 0.0)) throw InvalidArgument("background Lame parameters must be positive");
  AmaxTau out;
  if (bounds.sign_case == SignCase::Increase) {
    out.a_max = mu0 - mu0 * mu0 / (mu0 + bounds.c_mu);
    if (!(out.a_max > 0.0)) throw InvalidArgument("a_max vanishes; c_mu is too small relative to mu0");
    out.tau = (lambda0 - lambda0 * lambda0 / (lambda0 + bounds.c_lambda)) / out.a_max;
  } else {
    out.a_max = bounds.c_mu;
    out.tau = bounds.c_lambda / bounds.c_mu;
  }
  return out;
}

double compute_beta(const Eigen::MatrixXd& s_tau, const Eigen::MatrixXd& cholesky_lower) {
  if (s_tau.rows() != s_tau.cols() || s_tau.rows() != cholesky_lower.rows() ||
      cholesky_lower.rows() != cholesky_lower.cols()) {
    throw InvalidArgument("sensitivity and Cholesky factor sizes differ");
  }
  const auto lower = cholesky_lower.triangularView<Eigen::Lower>();
  if ((cholesky_lower.diagonal().array() == 0.0).any()) throw InvalidArgument("Cholesky factor is singular");
  const Eigen::MatrixXd half = lower.solve(s_tau);                                // L⁻¹ S
  const Eigen::MatrixXd congruent = lower.solve(Eigen::MatrixXd(half.transpose()));  // L⁻¹ S L⁻ᵀ
  const double theta_max = linalg::max_eigenvalue(congruent);
  if (!std::isfinite(theta_max)) throw NumericalFailure("non-finite eigenvalue while computing beta");
  if (theta_max <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / theta_max;
}

std::vector<double> compute_betas(const std::vector<Eigen::MatrixXd>& s_tau, const Eigen::MatrixXd& cholesky_lower) {
  std::vector<double> beta(s_tau.size());
  for (std::size_t k = 0; k < s_tau.size(); ++k) beta[k] = compute_beta(s_tau[k], cholesky_lower);
  return beta;
}

double MonRegConstraints::bound(std::size_t k) const { return std::min(a_max, beta.at(k)); }

namespace {

struct QuadraticBox {
  const Eigen::MatrixXd& h;
  const Eigen::VectorXd& c;
  const Eigen::VectorXd& lo;
  const Eigen::VectorXd& hi;

  [[nodiscard]] Eigen::VectorXd project(const Eigen::VectorXd& x) const { return x.cwiseMax(lo).cwiseMin(hi); }
  [[nodiscard]] Eigen::VectorXd gradient(const Eigen::VectorXd& x) const { return h * x - c; }

  /// Backtracking along t -> P(x + t d) with the Armijo condition; the change
  /// in objective is evaluated from the step to avoid cancellation.
  bool arc_search(Eigen::VectorXd& x, const Eigen::VectorXd& g, const Eigen::VectorXd& d, double t) const {
    for (int tries = 0; tries < 60; ++tries, t *= 0.5) {
      const Eigen::VectorXd step = project(x + t * d) - x;
      const double slope = g.dot(step);
      if (!(slope < 0.0)) continue;
      const double change = slope + 0.5 * step.dot(h * step);
      if (change <= 1e-4 * slope) {
        x += step;
        x = project(x);
        return true;
      }
    }
    return false;
  }
};

}  // namespace

BoxQpResult solve_box_qp(const Eigen::MatrixXd& hessian, const Eigen::VectorXd& linear,
                         const Eigen::VectorXd& lower, const Eigen::VectorXd& upper, const QpOptions& opts) {
  const Eigen::Index n = linear.size();
  if (hessian.rows() != n || hessian.cols() != n || lower.size() != n || upper.size() != n) {
    throw InvalidArgument("QP dimensions are inconsistent");
  }
  if ((lower.array() > upper.array()).any()) throw InvalidArgument("QP box is empty");
  if (!(opts.tol > 0.0) || opts.max_iter < 1) throw InvalidArgument("QP tolerance and iteration cap must be positive");

  const QuadraticBox qp{hessian, linear, lower, upper};
  const double lipschitz = n == 0 ? 0.0 : std::max(linalg::max_eigenvalue(hessian), 0.0);
  const double ridge = 1e-14 * std::max(lipschitz, std::numeric_limits<double>::min());

  BoxQpResult out;
  out.x = qp.project(Eigen::VectorXd::Zero(n));
  for (out.iterations = 0; out.iterations < opts.max_iter; ++out.iterations) {
    Eigen::VectorXd g = qp.gradient(out.x);
    out.kkt_residual = n == 0 ? 0.0 : (qp.project(out.x - g) - out.x).lpNorm<Eigen::Infinity>();
    if (out.kkt_residual <= opts.tol) {
      out.converged = true;
      break;
    }

    // Cauchy-like gradient step: exact line minimizer along the free part of -g.
    Eigen::VectorXd d = -g;
    for (Eigen::Index i = 0; i < n; ++i) {
      if ((out.x[i] <= lower[i] && d[i] < 0.0) || (out.x[i] >= upper[i] && d[i] > 0.0)) d[i] = 0.0;
    }
    const double curvature = d.dot(hessian * d);
    const double t0 = curvature > 0.0 ? d.squaredNorm() / curvature : (lipschitz > 0.0 ? 1.0 / lipschitz : 1.0);
    const bool moved_gradient = qp.arc_search(out.x, g, -g, t0);

    // Newton step restricted to the variables strictly inside the box.
    g = qp.gradient(out.x);
    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (out.x[i] > lower[i] && out.x[i] < upper[i]) free.push_back(i);
    }
    bool moved_newton = false;
    if (!free.empty()) {
      const auto nf = static_cast<Eigen::Index>(free.size());
      Eigen::MatrixXd hff(nf, nf);
      Eigen::VectorXd gf(nf);
      for (Eigen::Index a = 0; a < nf; ++a) {
        gf[a] = g[free[a]];
        for (Eigen::Index b = 0; b < nf; ++b) hff(a, b) = hessian(free[a], free[b]);
      }
      hff.diagonal().array() += ridge;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(hff);
      if (ldlt.info() == Eigen::Success) {
        const Eigen::VectorXd df = -ldlt.solve(gf);
        Eigen::VectorXd dn = Eigen::VectorXd::Zero(n);
        for (Eigen::Index a = 0; a < nf; ++a) dn[free[a]] = df[a];
        if (dn.allFinite()) moved_newton = qp.arc_search(out.x, g, dn, 1.0);
      }
    }
    if (!moved_gradient && !moved_newton) {
      // Stalled at roundoff level; report the final KKT residual.
      g = qp.gradient(out.x);
      out.kkt_residual = (qp.project(out.x - g) - out.x).lpNorm<Eigen::Infinity>();
      out.converged = out.kkt_residual <= opts.tol;
      break;
    }
  }
  return out;
}

Eigen::MatrixXd frobenius_gram(const std::vector<Eigen::MatrixXd>& s_tau) {
  if (s_tau.empty()) return {};
  const Eigen::Index m2 = s_tau.front().size();
  Eigen::MatrixXd flat(m2, static_cast<Eigen::Index>(s_tau.size()));
  for (std::size_t k = 0; k < s_tau.size(); ++k) {
    if (s_tau[k].size() != m2) throw InvalidArgument("sensitivity matrices differ in size");
    flat.col(static_cast<Eigen::Index>(k)) = Eigen::Map<const Eigen::VectorXd>(s_tau[k].data(), m2);
  }
  return flat.transpose() * flat;
}

double residual_norm(const std::vector<Eigen::MatrixXd>& s_tau, const Eigen::MatrixXd& v, const Eigen::VectorXd& nu) {
  Eigen::MatrixXd r = -v;
  for (std::size_t k = 0; k < s_tau.size(); ++k) r += nu[static_cast<Eigen::Index>(k)] * s_tau[k];
  return r.norm();
}

ReconstructionResult solve_box_constrained(const std::vector<Eigen::MatrixXd>& s_tau, const Eigen::MatrixXd& v_delta,
                                           const MonRegConstraints& constraints, double lambda0, double mu0,
                                           const QpOptions& opts) {
  const auto p = static_cast<Eigen::Index>(s_tau.size());
  if (static_cast<Eigen::Index>(constraints.beta.size()) != p) throw InvalidArgument("one beta per pixel is required");
  if (!(constraints.a_max > 0.0) || !(constraints.tau >= 0.0)) throw InvalidArgument("invalid a_max or tau");
  for (const auto& s : s_tau) {
    if (s.rows() != v_delta.rows() || s.cols() != v_delta.cols()) {
      throw InvalidArgument("sensitivity and data matrices differ in size");
    }
  }

  // The decrease case is the increase case for -nu against -V.
  const double sign = constraints.sign_case == SignCase::Increase ? 1.0 : -1.0;
  const Eigen::MatrixXd target = sign * linalg::symmetrize(v_delta);

  const Eigen::MatrixXd gram = frobenius_gram(s_tau);
  Eigen::VectorXd cross(p);
  for (Eigen::Index k = 0; k < p; ++k) cross[k] = (s_tau[k].array() * target.array()).sum();

  // Work in y = |nu| / a_max with the objective scaled to O(1).
  const double a = constraints.a_max;
  double scale = target.squaredNorm();
  if (!(scale > 0.0)) scale = a * a * (p > 0 ? gram.diagonal().maxCoeff() : 0.0);
  if (!(scale > 0.0)) scale = 1.0;
  const Eigen::MatrixXd hessian = (2.0 * a * a / scale) * gram;
  const Eigen::VectorXd linear = (2.0 * a / scale) * cross;
  Eigen::VectorXd upper(p);
  for (Eigen::Index k = 0; k < p; ++k) upper[k] = std::min(1.0, constraints.beta[k] / a);

  const BoxQpResult qp = solve_box_qp(hessian, linear, Eigen::VectorXd::Zero(p), upper, opts);

  ReconstructionResult out;
  out.nu.resize(p);
  for (Eigen::Index k = 0; k < p; ++k) {
    out.nu[k] = sign * std::clamp(a * qp.x[k], 0.0, constraints.bound(static_cast<std::size_t>(k)));
  }
  out.kappa = constraints.tau * out.nu;
  out.lambda_map = (lambda0 + out.kappa.array()).matrix();
  out.mu_map = (mu0 + out.nu.array()).matrix();
  out.iterations = qp.iterations;
  out.kkt_residual = qp.kkt_residual;
  out.objective = residual_norm(s_tau, linalg::symmetrize(v_delta), out.nu);
  if (!qp.converged) {
    std::ostringstream msg;
    msg << "box-constrained solve stopped after " << qp.iterations << " iterations with KKT residual "
        << qp.kkt_residual << " (tolerance " << opts.tol << ")";
    throw QpNotConverged(msg.str(), std::move(out));
  }
  return out;
}

}  // namespace elastomon
