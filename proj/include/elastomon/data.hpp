#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "elastomon/fem.hpp"
#include "elastomon/mesh.hpp"

namespace elastomon {

/// Axis-aligned block of pixels [lo, hi) with its Lamé contrast (Pa).
struct InclusionBox {
  std::array<int, 3> lo{0, 0, 0};
  std::array<int, 3> hi{0, 0, 0};
  double gamma_lambda = 0.0;
  double gamma_mu = 0.0;
};

struct InclusionGeometry {
  std::vector<InclusionBox> boxes;
};

/// Per-pixel membership of D. Throws InvalidArgument for boxes outside the
/// pixel grid, empty boxes or overlapping boxes.
std::vector<bool> inclusion_mask(const InclusionGeometry& inclusion, const PixelPartition& partition);

/// True when the complement of the pixel set is face-connected (or empty).
bool complement_connected(const std::vector<bool>& mask, const GridSize& pixel_resolution);

/// Background plus contrast on D, element by element.
LameField synthesize_field(double lambda0, double mu0, const InclusionGeometry& inclusion,
                           const PixelPartition& partition);

/// V = Lambda0 - Lambda together with the noise magnitude it carries.
struct DifferenceData {
  Eigen::MatrixXd values;
  double delta = 0.0;
};

/// Inputs must be square, of equal size and symmetric to 1e-10 relative.
DifferenceData difference_data(const Eigen::MatrixXd& lambda0, const Eigen::MatrixXd& lambda);

/// V^delta = Lambda0 - Lambda^delta. Only Lambda0 has to be symmetric; the
/// noisy measurement generally is not.
DifferenceData difference_data(const Eigen::MatrixXd& lambda0, const Eigen::MatrixXd& lambda_delta, double delta);

struct NoisyMeasurement {
  Eigen::MatrixXd values;
  double delta = 0.0;
};

/// Lambda + delta * E / ||E||_F, E uniform on [-1, 1] entrywise from a
/// seeded mt19937_64, delta = eta * ||Lambda||_F.
NoisyMeasurement add_noise(const Eigen::MatrixXd& lambda, double eta, std::uint64_t seed);

/// Uniform [-1, 1] matrix drawn exactly as add_noise does.
Eigen::MatrixXd uniform_noise_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed);

struct AbsoluteData {
  Eigen::MatrixXd symmetric;  // (V + V^T) / 2
  Eigen::MatrixXd absolute;   // |sym(V)|
  Eigen::MatrixXd cholesky;   // lower factor of delta I + |sym(V)|
};

/// Throws NumericalFailure if delta I + |V| is not positive definite; use a
/// small positive delta for exactly singular data.
AbsoluteData symmetrized_abs(const Eigen::MatrixXd& v, double delta);

}  // namespace elastomon
