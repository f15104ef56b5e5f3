#include "elastomon/sensitivity.hpp"

#include <cmath>

#include "elastomon/errors.hpp"

namespace elastomon {

SensitivitySet compute_sensitivities(const BoxMesh& mesh, const PixelPartition& partition,
                                     const std::vector<DisplacementField>& reference_solutions) {
  const int m = static_cast<int>(reference_solutions.size());
  if (m == 0) throw InvalidArgument("no reference solutions supplied");
  for (const auto& u : reference_solutions) {
    if (u.nodal.rows() != static_cast<Eigen::Index>(mesh.node_count())) {
      throw InvalidArgument("reference solution does not match the mesh");
    }
  }
  if (partition.element_to_pixel.size() != mesh.tet_count()) {
    throw InvalidArgument("pixel partition does not match the mesh");
  }

  const ElementGeometry geo = compute_geometry(mesh);
  SensitivitySet s;
  s.patches = m;
  s.pixels = partition.pixel_count();
  s.lambda.assign(s.pixels, Eigen::MatrixXd::Zero(m, m));
  s.mu.assign(s.pixels, Eigen::MatrixXd::Zero(m, m));

  Eigen::VectorXd div(m);
  Eigen::Matrix<double, Eigen::Dynamic, 9> strain(m, 9);
  for (std::size_t t = 0; t < mesh.tet_count(); ++t) {
    for (int l = 0; l < m; ++l) {
      const Eigen::Matrix3d g = displacement_gradient(mesh, geo, reference_solutions[l], t);
      const Eigen::Matrix3d eps = 0.5 * (g + g.transpose());
      div[l] = g.trace();
      strain.row(l) = Eigen::Map<const Eigen::Matrix<double, 1, 9>>(eps.data());
    }
    const int k = partition.element_to_pixel[t];
    const double vol = geo.volume[t];
    s.lambda[k].noalias() += vol * div * div.transpose();
    s.mu[k].noalias() += (2.0 * vol) * strain * strain.transpose();
  }

  s.lambda_flat.resize(static_cast<Eigen::Index>(m) * m, s.pixels);
  s.mu_flat.resize(static_cast<Eigen::Index>(m) * m, s.pixels);
  for (int k = 0; k < s.pixels; ++k) {
    s.lambda_flat.col(k) = flatten_measurements(s.lambda[k]);
    s.mu_flat.col(k) = flatten_measurements(s.mu[k]);
  }
  return s;
}

std::vector<Eigen::MatrixXd> combine_tau(const SensitivitySet& s, double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw InvalidArgument("tau must be finite and non-negative");
  std::vector<Eigen::MatrixXd> out;
  out.reserve(s.pixels);
  for (int k = 0; k < s.pixels; ++k) out.push_back(s.mu[k] + tau * s.lambda[k]);
  return out;
}

Eigen::VectorXd flatten_measurements(const Eigen::MatrixXd& v) {
  Eigen::VectorXd out(v.size());
  for (Eigen::Index l = 0; l < v.rows(); ++l) {
    for (Eigen::Index m = 0; m < v.cols(); ++m) out[l * v.cols() + m] = v(l, m);
  }
  return out;
}

}  // namespace elastomon
