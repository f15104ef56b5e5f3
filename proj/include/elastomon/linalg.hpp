#pragma once

#include <Eigen/Core>

namespace elastomon::linalg {

/// (A + A^T) / 2.
Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& a);

/// ||A - A^T||_F / ||A||_F, or 0 for the zero matrix.
double asymmetry(const Eigen::MatrixXd& a);

/// Extreme eigenvalues of the symmetric part of A.
double min_eigenvalue(const Eigen::MatrixXd& a);
double max_eigenvalue(const Eigen::MatrixXd& a);

/// Largest singular value.
double spectral_norm(const Eigen::MatrixXd& a);

/// True when an LLT factorization of the symmetric part succeeds.
bool cholesky_succeeds(const Eigen::MatrixXd& a);

/// Matrix absolute value sqrt(A^T A) of a symmetric matrix via its eigendecomposition.
Eigen::MatrixXd abs_symmetric(const Eigen::MatrixXd& a);

}  // namespace elastomon::linalg
