#include "elastomon/data.hpp"

#include <cmath>
#include <queue>
#include <random>

#include <Eigen/Dense>

#include "elastomon/errors.hpp"
#include "elastomon/linalg.hpp"

namespace elastomon {

std::vector<bool> inclusion_mask(const InclusionGeometry& inclusion, const PixelPartition& partition) {
  const GridSize& res = partition.pixel_resolution;
  std::vector<bool> mask(static_cast<std::size_t>(partition.pixel_count()), false);
  for (const auto& box : inclusion.boxes) {
    for (int a = 0; a < 3; ++a) {
      if (box.lo[a] < 0 || box.hi[a] > res[a] || box.lo[a] >= box.hi[a]) {
        throw InvalidArgument("inclusion box is empty or lies outside the pixel grid");
      }
    }
    for (int iz = box.lo[2]; iz < box.hi[2]; ++iz) {
      for (int iy = box.lo[1]; iy < box.hi[1]; ++iy) {
        for (int ix = box.lo[0]; ix < box.hi[0]; ++ix) {
          const int k = partition.pixel_index(ix, iy, iz);
          if (mask[k]) throw InvalidArgument("inclusion boxes overlap");
          mask[k] = true;
        }
      }
    }
  }
  return mask;
}

bool complement_connected(const std::vector<bool>& mask, const GridSize& res) {
  const int n = static_cast<int>(mask.size());
  int start = -1, outside = 0;
  for (int k = 0; k < n; ++k) {
    if (!mask[k]) {
      ++outside;
      if (start < 0) start = k;
    }
  }
  if (outside == 0) return true;

  auto index = [&](int x, int y, int z) { return x + res.nx * (y + res.ny * z); };
  std::vector<bool> seen(mask.size(), false);
  std::queue<int> frontier;
  frontier.push(start);
  seen[start] = true;
  int reached = 0;
  while (!frontier.empty()) {
    const int k = frontier.front();
    frontier.pop();
    ++reached;
    const int x = k % res.nx, y = (k / res.nx) % res.ny, z = k / (res.nx * res.ny);
    const std::array<std::array<int, 3>, 6> nbrs = {
        {{x - 1, y, z}, {x + 1, y, z}, {x, y - 1, z}, {x, y + 1, z}, {x, y, z - 1}, {x, y, z + 1}}};
    for (const auto& c : nbrs) {
      if (c[0] < 0 || c[1] < 0 || c[2] < 0 || c[0] >= res.nx || c[1] >= res.ny || c[2] >= res.nz) continue;
      const int j = index(c[0], c[1], c[2]);
      if (mask[j] || seen[j]) continue;
      seen[j] = true;
      frontier.push(j);
    }
  }
  return reached == outside;
}

LameField synthesize_field(double lambda0, double mu0, const InclusionGeometry& inclusion,
                           const PixelPartition& partition) {
  if (!(lambda0 > 0.0) || !(mu0 > 0.0)) throw InvalidArgument("background Lame parameters must be positive");
  const auto mask = inclusion_mask(inclusion, partition);
  if (!complement_connected(mask, partition.pixel_resolution)) {
    throw InvalidArgument("the complement of the inclusion must be connected");
  }
  LameField field = LameField::homogeneous(partition.element_to_pixel.size(), lambda0, mu0);
  for (const auto& box : inclusion.boxes) {
    for (int iz = box.lo[2]; iz < box.hi[2]; ++iz) {
      for (int iy = box.lo[1]; iy < box.hi[1]; ++iy) {
        for (int ix = box.lo[0]; ix < box.hi[0]; ++ix) {
          for (int e : partition.pixel_elements[partition.pixel_index(ix, iy, iz)]) {
            field.lambda[e] = lambda0 + box.gamma_lambda;
            field.mu[e] = mu0 + box.gamma_mu;
          }
        }
      }
    }
  }
  field.validate(field.size());
  return field;
}

DifferenceData difference_data(const Eigen::MatrixXd& lambda0, const Eigen::MatrixXd& lambda) {
  if (lambda0.rows() != lambda0.cols() || lambda.rows() != lambda.cols() || lambda0.rows() != lambda.rows()) {
    throw InvalidArgument("NtD matrices must be square and of equal size");
  }
  if (linalg::asymmetry(lambda0) > 1e-10 || linalg::asymmetry(lambda) > 1e-10) {
    throw InvalidArgument("NtD matrices must be symmetric");
  }
  return DifferenceData{lambda0 - lambda, 0.0};
}

DifferenceData difference_data(const Eigen::MatrixXd& lambda0, const Eigen::MatrixXd& lambda_delta, double delta) {
  if (!(delta >= 0.0)) throw InvalidArgument("delta must be non-negative");
  if (delta == 0.0) return difference_data(lambda0, lambda_delta);
  if (lambda0.rows() != lambda0.cols() || lambda_delta.rows() != lambda_delta.cols() ||
      lambda0.rows() != lambda_delta.rows()) {
    throw InvalidArgument("NtD matrices must be square and of equal size");
  }
  if (linalg::asymmetry(lambda0) > 1e-10) throw InvalidArgument("background NtD matrix must be symmetric");
  return DifferenceData{lambda0 - lambda_delta, delta};
}

Eigen::MatrixXd uniform_noise_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd e(rows, cols);
  // Row-major fill with an explicit 53-bit mapping; std::uniform_real_distribution
  // is not portable across standard libraries.
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      e(i, j) = 2.0 * unit - 1.0;
    }
  }
  return e;
}

NoisyMeasurement add_noise(const Eigen::MatrixXd& lambda, double eta, std::uint64_t seed) {
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw InvalidArgument("noise level must be non-negative");
  NoisyMeasurement out{lambda, 0.0};
  if (eta == 0.0) return out;
  out.delta = eta * lambda.norm();
  const Eigen::MatrixXd e = uniform_noise_matrix(lambda.rows(), lambda.cols(), seed);
  out.values = lambda + (out.delta / e.norm()) * e;
  return out;
}

AbsoluteData symmetrized_abs(const Eigen::MatrixXd& v, double delta) {
  if (!(delta >= 0.0)) throw InvalidArgument("delta must be non-negative");
  AbsoluteData out;
  out.symmetric = linalg::symmetrize(v);
  out.absolute = linalg::abs_symmetric(out.symmetric);
  Eigen::MatrixXd shifted = out.absolute;
  shifted.diagonal().array() += delta;
  Eigen::LLT<Eigen::MatrixXd> llt(shifted);
  if (llt.info() != Eigen::Success) {
    throw NumericalFailure("delta I + |V| is not positive definite; the data is singular, pass a small positive delta");
  }
  out.cholesky = llt.matrixL();
  return out;
}

}  // namespace elastomon
