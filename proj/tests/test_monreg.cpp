#include <doctest.h>

#include <limits>
#include <random>

#include <Eigen/Dense>

#include "elastomon/data.hpp"
#include "elastomon/linalg.hpp"
#include "elastomon/monreg.hpp"

using namespace elastomon;

namespace {

const ContrastBounds kTable2{1.2e6, 1.7e6, 1.2e4, 1.7e4, SignCase::Increase};

Eigen::MatrixXd random_spd(int n, std::mt19937& rng, double shift = 0.1) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = nd(rng);
  return a * a.transpose() + shift * Eigen::MatrixXd::Identity(n, n);
}

// Largest a with T - a S PSD by bisection on attempted Cholesky.
double beta_bisection(const Eigen::MatrixXd& t, const Eigen::MatrixXd& s) {
  double lo = 0.0, hi = 1.0;
  while (linalg::cholesky_succeeds(t - hi * s)) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (linalg::cholesky_succeeds(t - mid * s) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double objective(const std::vector<Eigen::MatrixXd>& s, const Eigen::MatrixXd& v, const Eigen::VectorXd& nu) {
  return residual_norm(s, v, nu);
}

}  // namespace

TEST_CASE("a_max and tau for the reference material and bounds") {
  const auto r = compute_amax_tau(6.6211e5, 6.6892e3, kTable2);
  // Exact rational evaluation of the increase-case formulas.
  CHECK(r.a_max == doctest::Approx(4295.015302955718).epsilon(1e-13));
  CHECK(r.tau == doctest::Approx(99.3439320164462).epsilon(1e-13));
  CHECK(r.a_max == doctest::Approx(4.295e3).epsilon(1e-3));
  CHECK(r.tau == doctest::Approx(99.35).epsilon(1e-3));

  ContrastBounds dec = kTable2;
  dec.sign_case = SignCase::Decrease;
  const auto d = compute_amax_tau(6.6211e5, 6.6892e3, dec);
  CHECK(d.a_max == 1.2e4);
  CHECK(d.tau == 100.0);
}

TEST_CASE("a_max and tau satisfy the defining inequalities for admissible contrasts") {
  const double l0 = 6.6211e5, m0 = 6.6892e3;
  const auto r = compute_amax_tau(l0, m0, kTable2);
  for (double gm : {1.2e4, 1.45e4, 1.7e4}) {
    for (double gl : {1.2e6, 1.45e6, 1.7e6}) {
      // Increase case: a_max <= mu0 - mu0^2/(mu0 + gamma_mu), tau a_max <= lambda0 - lambda0^2/(lambda0 + gamma_lambda).
      CHECK(r.a_max <= m0 - m0 * m0 / (m0 + gm) * (1.0 - 1e-15));
      CHECK(r.tau * r.a_max <= (l0 - l0 * l0 / (l0 + gl)) * (1.0 + 1e-14));
    }
  }
}

TEST_CASE("a_max limit and invalid bounds") {
  ContrastBounds b = kTable2;
  b.c_mu = 1e-9;
  CHECK(compute_amax_tau(6.6211e5, 6.6892e3, b).a_max < 1e-8);
  b = kTable2;
  b.c_mu = 0.0;
  CHECK_THROWS_AS(compute_amax_tau(1.0, 1.0, b), InvalidArgument);
  b = kTable2;
  b.C_lambda = 1.0;
  CHECK_THROWS_AS(compute_amax_tau(1.0, 1.0, b), InvalidArgument);
  CHECK_THROWS_AS(parse_sign_case("up"), InvalidArgument);
}

TEST_CASE("beta examples") {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  CHECK(compute_beta(id, id) == doctest::Approx(1.0));
  CHECK(compute_beta(Eigen::Vector2d(2.0, 1.0).asDiagonal().toDenseMatrix(), id) == doctest::Approx(0.5));
  CHECK(compute_beta(Eigen::MatrixXd::Zero(2, 2), id) == std::numeric_limits<double>::infinity());
}

TEST_CASE("beta matches the bisection and Cholesky oracle") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 6;
    const Eigen::MatrixXd s = random_spd(n, rng);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd v(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) v(i, j) = nd(rng);
    const double delta = 0.01 * (trial + 1);
    const auto abs = symmetrized_abs(v, delta);
    const Eigen::MatrixXd t = delta * Eigen::MatrixXd::Identity(n, n) + abs.absolute;
    const double beta = compute_beta(s, abs.cholesky);
    CHECK(beta == doctest::Approx(beta_bisection(t, s)).epsilon(1e-8));
  }
}

TEST_CASE("beta grows with delta") {
  std::mt19937 rng(5);
  const Eigen::MatrixXd v = random_spd(5, rng, 0.0);
  const Eigen::MatrixXd s = random_spd(5, rng);
  double prev = 0.0;
  for (double delta : {1e-6, 1e-3, 1e-1, 1.0, 10.0}) {
    const double b = compute_beta(s, symmetrized_abs(v, delta).cholesky);
    CHECK(b >= prev * (1.0 - 1e-12));
    prev = b;
  }
}

TEST_CASE("box QP: unconstrained interior optimum and active bounds") {
  Eigen::Matrix2d h;
  h << 2, 0.5, 0.5, 1;
  const Eigen::Vector2d c(1.0, 0.5);
  const auto free = solve_box_qp(h, c, Eigen::Vector2d(-10, -10), Eigen::Vector2d(10, 10), {});
  CHECK(free.converged);
  CHECK((free.x - h.ldlt().solve(c)).norm() < 1e-12);

  const auto boxed = solve_box_qp(h, Eigen::Vector2d(10.0, -10.0), Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1), {});
  CHECK(boxed.converged);
  CHECK((boxed.x - Eigen::Vector2d(1.0, 0.0)).norm() < 1e-12);
  CHECK(boxed.kkt_residual <= 1e-10);
}

TEST_CASE("box QP on a singular Hessian") {
  // Rank one Hessian: every point on a segment is optimal; the solver must
  // still stop with a small KKT residual.
  Eigen::Matrix3d h = Eigen::Vector3d(1, 1, 0).asDiagonal();
  h(0, 1) = h(1, 0) = 1.0;
  const auto r = solve_box_qp(h, Eigen::Vector3d(1, 1, 0), Eigen::Vector3d::Zero(), Eigen::Vector3d::Ones(), {});
  CHECK(r.converged);
  CHECK(r.x[0] + r.x[1] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("p = 2 toy problem matches grid search") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const int m = 2;
    std::vector<Eigen::MatrixXd> s{random_spd(m, rng), random_spd(m, rng)};
    const Eigen::MatrixXd v = random_spd(m, rng, 0.0) * 0.7;
    MonRegConstraints c;
    c.a_max = 0.8;
    c.tau = 1.0;
    const auto abs = symmetrized_abs(v, 0.05);
    c.delta = 0.05;
    c.beta = compute_betas(s, abs.cholesky);
    const auto r = solve_box_constrained(s, v, c, 1.0, 1.0);

    double best = std::numeric_limits<double>::infinity();
    const double step = 1e-3 * c.a_max;
    for (double x = 0.0; x <= c.bound(0) + 1e-15; x += step) {
      for (double y = 0.0; y <= c.bound(1) + 1e-15; y += step) {
        best = std::min(best, objective(s, v, Eigen::Vector2d(x, y)));
      }
    }
    // Include the box corners the grid may step past.
    best = std::min(best, objective(s, v, Eigen::Vector2d(c.bound(0), c.bound(1))));
    CHECK(r.objective <= best * (1.0 + 1e-6));
    CHECK(r.objective >= objective(s, v, r.nu) * (1.0 - 1e-14));
  }
}

TEST_CASE("box-constrained solve: zero data, feasibility, mirrored case") {
  std::mt19937 rng(9);
  const int m = 4, p = 6;
  std::vector<Eigen::MatrixXd> s;
  for (int k = 0; k < p; ++k) s.push_back(random_spd(m, rng));
  MonRegConstraints c;
  c.a_max = 2.0;
  c.tau = 3.0;
  c.beta = {0.5, 1.0, 5.0, 0.1, 3.0, 2.0};

  const auto zero = solve_box_constrained(s, Eigen::MatrixXd::Zero(m, m), c, 10.0, 1.0);
  CHECK(zero.nu.norm() == 0.0);

  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(m, m);
  for (int k = 0; k < p; ++k) v += 10.0 * s[static_cast<std::size_t>(k)];
  const auto inc = solve_box_constrained(s, v, c, 10.0, 1.0);
  for (int k = 0; k < p; ++k) {
    CHECK(inc.nu[k] >= 0.0);
    CHECK(inc.nu[k] <= c.bound(static_cast<std::size_t>(k)));
    CHECK(inc.kappa[k] == c.tau * inc.nu[k]);
    CHECK(inc.mu_map[k] == 1.0 + inc.nu[k]);
    CHECK(inc.lambda_map[k] == 10.0 + inc.kappa[k]);
    // Data far beyond the box: every pixel saturates.
    CHECK(inc.nu[k] == c.bound(static_cast<std::size_t>(k)));
  }

  c.sign_case = SignCase::Decrease;
  const auto dec = solve_box_constrained(s, -v, c, 10.0, 1.0);
  CHECK((dec.nu + inc.nu).norm() == 0.0);
}

TEST_CASE("Gram matrix is PSD") {
  std::mt19937 rng(1);
  std::vector<Eigen::MatrixXd> s;
  for (int k = 0; k < 12; ++k) s.push_back(random_spd(3, rng));  // p > M(M+1)/2: singular
  const Eigen::MatrixXd g = frobenius_gram(s);
  CHECK(linalg::min_eigenvalue(g) >= -1e-10 * g.trace());
  CHECK(g(2, 5) == doctest::Approx((s[2].array() * s[5].array()).sum()));
}
