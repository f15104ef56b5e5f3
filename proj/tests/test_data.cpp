#include <doctest.h>

#include <random>

#include <Eigen/Dense>

#include "elastomon/data.hpp"
#include "elastomon/errors.hpp"
#include "elastomon/linalg.hpp"

using namespace elastomon;

namespace {

PixelPartition partition_4() {
  static const BoxMesh mesh = build_box_mesh(Vec3::Zero(), Vec3::Ones(), {4, 4, 4});
  return build_pixel_partition(mesh, {4, 4, 4});
}

Eigen::MatrixXd random_symmetric(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = nd(rng);
  return 0.5 * (a + a.transpose());
}

}  // namespace

TEST_CASE("reference inclusion contrast") {
  // Inclusion totals minus background.
  CHECK(2.3177e6 - 6.6211e5 == doctest::Approx(1.65559e6).epsilon(1e-12));
  CHECK(2.3411e4 - 6.6892e3 == doctest::Approx(1.67218e4).epsilon(1e-12));
}

TEST_CASE("synthesize_field assigns the contrast on D only") {
  const auto part = partition_4();
  InclusionGeometry inc{{InclusionBox{{1, 1, 1}, {3, 2, 3}, 1.65559e6, 1.67218e4}}};
  const auto f = synthesize_field(6.6211e5, 6.6892e3, inc, part);
  const auto mask = inclusion_mask(inc, part);
  int inside = 0;
  for (std::size_t t = 0; t < f.size(); ++t) {
    const bool in = mask[static_cast<std::size_t>(part.element_to_pixel[t])];
    inside += in ? 1 : 0;
    CHECK(f.lambda[t] == doctest::Approx(in ? 2.3177e6 : 6.6211e5));
    CHECK(f.mu[t] == doctest::Approx(in ? 2.3411e4 : 6.6892e3));
  }
  CHECK(inside == 4 * 6);

  const auto empty = synthesize_field(1.0, 2.0, {}, part);
  for (std::size_t t = 0; t < empty.size(); ++t) CHECK((empty.lambda[t] == 1.0 && empty.mu[t] == 2.0));
}

TEST_CASE("inclusion validation") {
  const auto part = partition_4();
  CHECK_THROWS_AS(inclusion_mask({{InclusionBox{{0, 0, 0}, {5, 1, 1}, 1, 1}}}, part), InvalidArgument);
  CHECK_THROWS_AS(inclusion_mask({{InclusionBox{{1, 1, 1}, {1, 2, 2}, 1, 1}}}, part), InvalidArgument);
  CHECK_THROWS_AS(inclusion_mask({{InclusionBox{{0, 0, 0}, {2, 2, 2}, 1, 1}, InclusionBox{{1, 1, 1}, {3, 3, 3}, 1, 1}}},
                                 part),
                  InvalidArgument);
  // The six face neighbours of pixel (1,1,1) cut it off from the rest.
  InclusionGeometry shell;
  for (int a = 0; a < 3; ++a) {
    for (int side : {0, 2}) {
      InclusionBox b{{1, 1, 1}, {2, 2, 2}, 1, 1};
      b.lo[a] = side;
      b.hi[a] = side + 1;
      shell.boxes.push_back(b);
    }
  }
  CHECK_FALSE(complement_connected(inclusion_mask(shell, part), part.pixel_resolution));
  CHECK_THROWS_AS(synthesize_field(1.0, 1.0, shell, part), InvalidArgument);
}

TEST_CASE("difference data") {
  const Eigen::MatrixXd a = random_symmetric(5, 1);
  CHECK(difference_data(a, a).values.norm() == 0.0);
  Eigen::MatrixXd skew = a;
  skew(0, 1) += 1.0;
  CHECK_THROWS_AS(difference_data(a, skew), InvalidArgument);
  CHECK_THROWS_AS(difference_data(a, Eigen::MatrixXd::Zero(4, 4)), InvalidArgument);
  CHECK(difference_data(a, skew, 0.1).values(0, 1) == doctest::Approx(-1.0));
}

TEST_CASE("noise: exact norm, determinism, eta = 0") {
  const Eigen::MatrixXd lam = random_symmetric(20, 3);
  for (double eta : {0.001, 0.01, 0.1}) {
    const auto n = add_noise(lam, eta, 42);
    CHECK(n.delta == doctest::Approx(eta * lam.norm()).epsilon(1e-15));
    CHECK((n.values - lam).norm() == doctest::Approx(n.delta).epsilon(1e-14));
    CHECK(add_noise(lam, eta, 42).values == n.values);
    CHECK(add_noise(lam, eta, 43).values != n.values);
  }
  const auto none = add_noise(lam, 0.0, 42);
  CHECK(none.delta == 0.0);
  CHECK(none.values == lam);
  CHECK_THROWS_AS(add_noise(lam, -0.1, 1), InvalidArgument);
  const Eigen::MatrixXd e = uniform_noise_matrix(30, 30, 5);
  CHECK(e.maxCoeff() <= 1.0);
  CHECK(e.minCoeff() >= -1.0);
  CHECK(std::abs(e.mean()) < 0.1);
}

TEST_CASE("symmetrized_abs examples") {
  Eigen::MatrixXd v = Eigen::Vector2d(-1.0, 2.0).asDiagonal();
  const auto r = symmetrized_abs(v, 0.0);
  CHECK((r.absolute - Eigen::MatrixXd(Eigen::Vector2d(1.0, 2.0).asDiagonal())).norm() < 1e-15);
  CHECK((r.cholesky - Eigen::MatrixXd(Eigen::Vector2d(1.0, std::sqrt(2.0)).asDiagonal())).norm() < 1e-15);

  const auto z = symmetrized_abs(Eigen::MatrixXd::Zero(3, 3), 1.0);
  CHECK((z.cholesky - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-15);
  CHECK_THROWS_AS(symmetrized_abs(Eigen::MatrixXd::Zero(3, 3), 0.0), NumericalFailure);
}

TEST_CASE("symmetrized_abs on random matrices") {
  for (unsigned seed = 0; seed < 10; ++seed) {
    Eigen::MatrixXd v = random_symmetric(5, seed);
    v(0, 3) += 0.3;  // asymmetric input, symmetrized internally
    const double delta = 0.05;
    const auto r = symmetrized_abs(v, delta);
    const Eigen::MatrixXd target = delta * Eigen::MatrixXd::Identity(5, 5) + r.absolute;
    CHECK((r.cholesky * r.cholesky.transpose() - target).norm() < 1e-12 * target.norm());
    CHECK(linalg::min_eigenvalue(r.absolute - r.symmetric) >= -1e-12 * r.absolute.norm());
    // Oracle: |A| = sqrt(A^T A) via the eigendecomposition of A^2.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r.symmetric * r.symmetric);
    const Eigen::MatrixXd sq = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                               es.eigenvectors().transpose();
    CHECK((sq - r.absolute).norm() < 1e-10 * sq.norm());
  }
}
