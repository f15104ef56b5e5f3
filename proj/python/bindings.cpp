#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "elastomon/config.hpp"
#include "elastomon/pipeline.hpp"

namespace py = pybind11;
using namespace py::literals;
using namespace elastomon;

namespace {

RunConfig config_from(const std::string& text) {
  if (text.empty()) return RunConfig::desk();
  return config_from_json(nlohmann::json::parse(text));
}

// Everything a Python caller needs from one synthesized experiment.
struct Session {
  Problem problem;
  ForwardData data;
  SensitivitySet sens;

  explicit Session(const std::string& config_json)
      : problem(build_problem(config_from(config_json))),
        data(run_forward(problem)),
        sens(compute_sensitivities(problem.mesh, problem.partition, data.reference)) {}

  py::dict monreg(double eta, std::uint64_t seed) const {
    const auto noisy = add_noise(data.lambda, eta, seed);
    const auto run = run_monreg(problem, sens, data.lambda0, noisy.values, noisy.delta);
    return py::dict("nu"_a = run.result.nu, "kappa"_a = run.result.kappa, "beta"_a = run.constraints.beta,
                    "a_max"_a = run.amax_tau.a_max, "tau"_a = run.amax_tau.tau, "delta"_a = noisy.delta,
                    "iterations"_a = run.result.iterations, "kkt_residual"_a = run.result.kkt_residual,
                    "misclassified"_a = count_misclassified(run.result.nu, run.amax_tau.a_max, problem.truth));
  }

  py::dict onestep(double eta, std::uint64_t seed, double omega, double sigma) const {
    const auto noisy = add_noise(data.lambda, eta, seed);
    const auto os = onestep_reconstruct(sens, data.lambda0 - noisy.values, {omega, sigma});
    return py::dict("nu"_a = os.nu, "kappa"_a = os.kappa, "delta"_a = noisy.delta);
  }

  std::vector<bool> montest(double eta, std::uint64_t seed, double alpha_lambda, double alpha_mu) const {
    const auto noisy = add_noise(data.lambda, eta, seed);
    return run_montest({alpha_lambda, alpha_mu}, data.lambda0, noisy.values, noisy.delta, sens);
  }
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Elasticity NtD inclusion reconstruction (C++ core)";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_ArithmeticError);

  m.def("desk_config", [] { return config_to_json(RunConfig::desk()).dump(); },
        "Desk configuration as a JSON string.");

  m.def("compute_amax_tau",
        [](double lambda0, double mu0, double c_lambda, double C_lambda, double c_mu, double C_mu,
           const std::string& sign_case) {
          const auto r =
              compute_amax_tau(lambda0, mu0, {c_lambda, C_lambda, c_mu, C_mu, parse_sign_case(sign_case)});
          return py::make_tuple(r.a_max, r.tau);
        },
        "lambda0"_a, "mu0"_a, "c_lambda"_a, "C_lambda"_a, "c_mu"_a, "C_mu"_a, "sign_case"_a = "increase");

  m.def("symmetrized_abs",
        [](const Eigen::MatrixXd& v, double delta) {
          const auto a = symmetrized_abs(v, delta);
          return py::make_tuple(a.absolute, a.cholesky);
        },
        "v"_a, "delta"_a, "Returns (|sym V|, L) with L L^T = delta I + |sym V|.");

  m.def("compute_beta", &compute_beta, "s_tau"_a, "cholesky_lower"_a);

  m.def("add_noise",
        [](const Eigen::MatrixXd& lambda, double eta, std::uint64_t seed) {
          const auto n = add_noise(lambda, eta, seed);
          return py::make_tuple(n.values, n.delta);
        },
        "lambda_"_a, "eta"_a, "seed"_a);

  m.def("solve_box_qp",
        [](const Eigen::MatrixXd& h, const Eigen::VectorXd& c, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
           double tol, int max_iter) {
          const auto r = solve_box_qp(h, c, lo, hi, {tol, max_iter});
          return py::dict("x"_a = r.x, "iterations"_a = r.iterations, "kkt_residual"_a = r.kkt_residual,
                          "converged"_a = r.converged);
        },
        "hessian"_a, "linear"_a, "lower"_a, "upper"_a, "tol"_a = 1e-10, "max_iter"_a = 5000,
        "Minimizes 0.5 x^T H x - c^T x over lower <= x <= upper.");

  m.def("onestep_solve",
        [](const Eigen::MatrixXd& s_lambda, const Eigen::MatrixXd& s_mu, const Eigen::VectorXd& v, double omega,
           double sigma) {
          const auto r = onestep_solve(s_lambda, s_mu, v, {omega, sigma});
          return py::make_tuple(r.kappa, r.nu);
        },
        "s_lambda"_a, "s_mu"_a, "v"_a, "omega"_a, "sigma"_a);

  py::class_<Session>(m, "Session")
      .def(py::init<const std::string&>(), "config_json"_a = "")
      .def_property_readonly("lambda0", [](const Session& s) { return s.data.lambda0; })
      .def_property_readonly("lambda_", [](const Session& s) { return s.data.lambda; })
      .def_property_readonly("truth", [](const Session& s) { return s.problem.truth; })
      .def_property_readonly("pixel_count", [](const Session& s) { return s.problem.pixel_count(); })
      .def_property_readonly("patch_count", [](const Session& s) { return s.problem.patches.size(); })
      .def_property_readonly("s_lambda", [](const Session& s) { return s.sens.lambda_flat; })
      .def_property_readonly("s_mu", [](const Session& s) { return s.sens.mu_flat; })
      .def("monreg", &Session::monreg, "eta"_a = 0.0, "seed"_a = 20240229)
      .def("onestep", &Session::onestep, "eta"_a = 0.0, "seed"_a = 20240229, "omega"_a = 5e-15, "sigma"_a = 3e-11)
      .def("montest", &Session::montest, "eta"_a = 0.0, "seed"_a = 20240229, "alpha_lambda"_a = 4.6e5,
           "alpha_mu"_a = 4.7e3);
}
