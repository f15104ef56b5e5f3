#include <doctest.h>

#include <random>

#include <Eigen/Dense>

#include "elastomon/errors.hpp"
#include "elastomon/onestep.hpp"

using namespace elastomon;

namespace {

Eigen::MatrixXd random_matrix(int r, int c, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd a(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) a(i, j) = nd(rng);
  return a;
}

}  // namespace

TEST_CASE("zero data gives zero contrast") {
  const auto sl = random_matrix(4, 2, 1), sm = random_matrix(4, 2, 2);
  const auto r = onestep_solve(sl, sm, Eigen::VectorXd::Zero(4), {0.1, 0.1});
  CHECK(r.kappa.norm() == 0.0);
  CHECK(r.nu.norm() == 0.0);
}

TEST_CASE("p = 2, M = 2 toy instance matches a QR solve of the stacked system") {
  Eigen::MatrixXd sl(4, 2), sm(4, 2);
  sl << 1.0, 0.2, 0.2, 0.5, 0.2, 0.5, 0.3, 1.1;
  sm << 2.0, 0.1, 0.1, 0.7, 0.1, 0.7, 0.4, 1.5;
  const Eigen::Vector4d v(0.3, -0.1, -0.1, 0.8);
  const OneStepConfig cfg{0.3, 0.05};
  // Stacked A = [Sl Sm; w I 0; 0 s I], b = (v; 0; 0).
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(8, 4);
  a.block(0, 0, 4, 2) = sl;
  a.block(0, 2, 4, 2) = sm;
  a.block(4, 0, 2, 2) = cfg.omega * Eigen::Matrix2d::Identity();
  a.block(6, 2, 2, 2) = cfg.sigma * Eigen::Matrix2d::Identity();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(8);
  b.head(4) = v;
  const Eigen::VectorXd oracle = a.colPivHouseholderQr().solve(b);
  const auto r = onestep_solve(sl, sm, v, cfg);
  CHECK((r.kappa - oracle.head(2)).norm() < 1e-10 * oracle.norm());
  CHECK((r.nu - oracle.tail(2)).norm() < 1e-10 * oracle.norm());
}

TEST_CASE("first-order optimality and shrinkage") {
  const auto sl = random_matrix(25, 6, 3), sm = random_matrix(25, 6, 4);
  const Eigen::VectorXd v = random_matrix(25, 1, 5);
  double prev = std::numeric_limits<double>::infinity();
  for (double scale : {1e-2, 1e-1, 1.0, 10.0}) {
    const OneStepConfig cfg{0.5 * scale, 0.3 * scale};
    const auto r = onestep_solve(sl, sm, v, cfg);
    const Eigen::VectorXd g = onestep_gradient(sl, sm, v, cfg, r);
    Eigen::VectorXd atb(12);
    atb << sl.transpose() * v, sm.transpose() * v;
    CHECK(g.norm() <= 1e-8 * atb.norm());
    const double n = std::sqrt(r.kappa.squaredNorm() + r.nu.squaredNorm());
    CHECK(n < prev);
    prev = n;
  }
}

TEST_CASE("singular normal matrix is reported") {
  Eigen::MatrixXd sl = Eigen::MatrixXd::Zero(4, 2);
  sl(0, 0) = 1.0;
  CHECK_THROWS_AS(onestep_solve(sl, sl, Eigen::VectorXd::Ones(4), {0.0, 0.0}), NumericalFailure);
  CHECK_THROWS_AS(onestep_solve(sl, sl, Eigen::VectorXd::Ones(4), {-1.0, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(onestep_solve(sl, sl, Eigen::VectorXd::Ones(3), {1.0, 1.0}), InvalidArgument);
}
