#include "elastomon/pipeline.hpp"

#include <chrono>
#include <cmath>

#include "elastomon/linalg.hpp"

namespace elastomon {

Problem build_problem(const RunConfig& config) {
  config.validate();
  Problem p;
  p.config = config;
  p.mesh = build_box_mesh(Vec3::Zero(), config.mesh.extents, config.mesh.resolution);
  p.partition = build_pixel_partition(p.mesh, config.mesh.pixels);
  p.patches = build_patch_set(p.mesh, config.patches.per_face_grid, config.patches.dirichlet_face);
  p.truth = inclusion_mask(config.inclusion, p.partition);
  p.background = LameField::homogeneous(p.mesh.tet_count(), config.material.lambda0, config.material.mu0);
  p.truth_field = synthesize_field(config.material.lambda0, config.material.mu0, config.inclusion, p.partition);
  return p;
}

ForwardData run_forward(const Problem& problem) {
  const auto start = std::chrono::steady_clock::now();
  const double tol = problem.config.solver.fem_tol;
  ForwardData out;
  auto background = staged("forward/background", [&] {
    return compute_forward(problem.mesh, problem.background, problem.patches, tol);
  });
  auto truth = staged("forward/inclusion", [&] {
    return compute_forward(problem.mesh, problem.truth_field, problem.patches, tol);
  });
  out.lambda0 = std::move(background.ntd);
  out.lambda = std::move(truth.ntd);
  out.reference = std::move(background.displacements);
  out.solver = background.solver == LinearSolverKind::SparseCholesky ? truth.solver : background.solver;
  out.max_energy_mismatch = std::max(background.max_energy_mismatch, truth.max_energy_mismatch);
  renoise(out, problem.config.noise.eta, problem.config.noise.seed);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

void renoise(ForwardData& data, double eta, std::uint64_t seed) {
  auto noisy = add_noise(data.lambda, eta, seed);
  data.lambda_delta = std::move(noisy.values);
  data.delta = noisy.delta;
  data.eta = eta;
  data.seed = seed;
}

std::vector<DisplacementField> reference_solutions(const Problem& problem) {
  return staged("forward/background", [&] {
    return compute_forward(problem.mesh, problem.background, problem.patches, problem.config.solver.fem_tol)
        .displacements;
  });
}

MonRegRun run_monreg(const Problem& problem, const SensitivitySet& s, const Eigen::MatrixXd& lambda0,
                     const Eigen::MatrixXd& lambda_delta, double delta) {
  const RunConfig& cfg = problem.config;
  MonRegRun run;
  run.amax_tau = compute_amax_tau(cfg.material.lambda0, cfg.material.mu0, cfg.bounds);
  const auto s_tau = combine_tau(s, run.amax_tau.tau);
  const DifferenceData v = difference_data(lambda0, lambda_delta, delta);
  const AbsoluteData abs = staged("monreg/abs", [&] { return symmetrized_abs(v.values, delta); });

  run.constraints.a_max = run.amax_tau.a_max;
  run.constraints.tau = run.amax_tau.tau;
  run.constraints.delta = delta;
  run.constraints.sign_case = cfg.bounds.sign_case;
  run.constraints.beta = staged("monreg/beta", [&] { return compute_betas(s_tau, abs.cholesky); });

  QpOptions opts;
  opts.tol = cfg.solver.qp_tol;
  opts.max_iter = cfg.solver.max_iter;
  run.result = staged("monreg/qp", [&] {
    return solve_box_constrained(s_tau, v.values, run.constraints, cfg.material.lambda0, cfg.material.mu0, opts);
  });
  return run;
}

int count_misclassified(const Eigen::VectorXd& nu, double a_max, const std::vector<bool>& truth) {
  std::vector<bool> predicted(truth.size());
  for (std::size_t k = 0; k < truth.size(); ++k) {
    predicted[k] = std::abs(nu[static_cast<Eigen::Index>(k)]) > 0.5 * a_max;
  }
  return count_misclassified(predicted, truth);
}

int count_misclassified(const std::vector<bool>& predicted, const std::vector<bool>& truth) {
  int miss = 0;
  for (std::size_t k = 0; k < truth.size(); ++k) miss += predicted[k] != truth[k] ? 1 : 0;
  return miss;
}

std::vector<SweepRow> noise_sweep(const Problem& problem, const ForwardData& data, const SensitivitySet& s,
                                  const std::vector<double>& etas, std::uint64_t seed) {
  const RunConfig& cfg = problem.config;
  const MonRegRun exact = run_monreg(problem, s, data.lambda0, data.lambda, 0.0);
  std::vector<SweepRow> rows;
  for (double eta : etas) {
    const NoisyMeasurement noisy = add_noise(data.lambda, eta, seed);
    SweepRow row;
    row.eta = eta;
    row.delta = noisy.delta;

    const MonRegRun mr = run_monreg(problem, s, data.lambda0, noisy.values, noisy.delta);
    row.monreg_misclassified = count_misclassified(mr.result.nu, mr.amax_tau.a_max, problem.truth);
    row.monreg_deviation = (mr.result.nu - exact.result.nu).lpNorm<Eigen::Infinity>();

    const OneStepResult os =
        staged("onestep", [&] { return onestep_reconstruct(s, data.lambda0 - noisy.values, cfg.onestep); });
    row.onestep_misclassified = count_misclassified(os.nu, mr.amax_tau.a_max, problem.truth);

    const auto map = run_montest(cfg.montest, data.lambda0, noisy.values, noisy.delta, s);
    row.montest_misclassified = count_misclassified(map, problem.truth);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace elastomon
