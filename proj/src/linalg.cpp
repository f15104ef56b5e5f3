#include "elastomon/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "elastomon/errors.hpp"

namespace elastomon::linalg {

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("matrix must be square");
  return 0.5 * (a + a.transpose());
}

double asymmetry(const Eigen::MatrixXd& a) {
  const double n = a.norm();
  return n == 0.0 ? 0.0 : (a - a.transpose()).norm() / n;
}

namespace {

Eigen::VectorXd eigenvalues(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(a), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalFailure("symmetric eigensolver did not converge");
  return es.eigenvalues();
}

}  // namespace

double min_eigenvalue(const Eigen::MatrixXd& a) { return eigenvalues(a).minCoeff(); }

double max_eigenvalue(const Eigen::MatrixXd& a) { return eigenvalues(a).maxCoeff(); }

double spectral_norm(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0.0;
  // Eigenvalues of the smaller Gram matrix are cheaper than a full SVD.
  const Eigen::MatrixXd gram = a.rows() >= a.cols() ? Eigen::MatrixXd(a.transpose() * a)
                                                    : Eigen::MatrixXd(a * a.transpose());
  return std::sqrt(std::max(0.0, max_eigenvalue(gram)));
}

bool cholesky_succeeds(const Eigen::MatrixXd& a) {
  Eigen::LLT<Eigen::MatrixXd> llt(symmetrize(a));
  return llt.info() == Eigen::Success;
}

Eigen::MatrixXd abs_symmetric(const Eigen::MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrize(a));
  if (es.info() != Eigen::Success) throw NumericalFailure("symmetric eigensolver did not converge");
  const Eigen::MatrixXd& q = es.eigenvectors();
  return q * es.eigenvalues().cwiseAbs().asDiagonal() * q.transpose();
}

}  // namespace elastomon::linalg
