// elastomon command-line tool: forward data synthesis, reconstructions and
// the noise sweep.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "elastomon/config.hpp"
#include "elastomon/io.hpp"
#include "elastomon/pipeline.hpp"

namespace fs = std::filesystem;
using elastomon::RunConfig;
using nlohmann::json;

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<double> eta;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> omega;
  std::optional<double> sigma;
  std::optional<std::string> bounds;
  std::optional<std::string> sign_case;
  std::optional<double> alpha_lambda;
  std::optional<double> alpha_mu;
  bool vtk = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "JSON run configuration (defaults to the desk phantom)");
  cmd->add_option("--set", o.sets, "Override a dotted key, e.g. --set mesh.resolution=[6,6,6]");
  cmd->add_option("--eta", o.eta, "Relative noise level");
  cmd->add_option("--seed", o.seed, "Noise seed");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--omega", o.omega, "One-step weight for kappa");
  cmd->add_option("--sigma", o.sigma, "One-step weight for nu");
  cmd->add_option("--bounds", o.bounds, "c_lambda,C_lambda,c_mu,C_mu");
  cmd->add_option("--sign-case", o.sign_case, "increase or decrease");
  cmd->add_option("--alpha-lambda", o.alpha_lambda, "Monotonicity test weight for lambda");
  cmd->add_option("--alpha-mu", o.alpha_mu, "Monotonicity test weight for mu");
  cmd->add_flag("--vtk", o.vtk, "Also write VTK files");
}

json parse_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception&) {
    return json(text);
  }
}

RunConfig resolve_config(const CommonOptions& o) {
  RunConfig cfg = o.config_path.empty() ? RunConfig::desk() : elastomon::load_config(o.config_path);
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw elastomon::ConfigError("--set expects key=value, got '" + s + "'");
    elastomon::apply_override(cfg, s.substr(0, eq), parse_value(s.substr(eq + 1)));
  }
  if (o.eta) cfg.noise.eta = *o.eta;
  if (o.seed) cfg.noise.seed = *o.seed;
  if (o.out) cfg.output.dir = *o.out;
  if (o.omega) cfg.onestep.omega = *o.omega;
  if (o.sigma) cfg.onestep.sigma = *o.sigma;
  if (o.alpha_lambda) cfg.montest.alpha_lambda = *o.alpha_lambda;
  if (o.alpha_mu) cfg.montest.alpha_mu = *o.alpha_mu;
  if (o.sign_case) cfg.bounds.sign_case = elastomon::parse_sign_case(*o.sign_case);
  if (o.bounds) {
    std::vector<double> v;
    std::stringstream ss(*o.bounds);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        v.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw elastomon::ConfigError("--bounds: '" + item + "' is not a number");
      }
    }
    if (v.size() != 4) throw elastomon::ConfigError("--bounds expects four comma-separated values");
    cfg.bounds.c_lambda = v[0];
    cfg.bounds.C_lambda = v[1];
    cfg.bounds.c_mu = v[2];
    cfg.bounds.C_mu = v[3];
  }
  if (o.vtk) cfg.output.emit_vtk = true;
  cfg.validate();
  return cfg;
}

fs::path prepare_dir(const RunConfig& cfg) {
  const fs::path dir(cfg.output.dir);
  fs::create_directories(dir);
  std::ofstream(dir / "config.json") << elastomon::config_to_json(cfg).dump(2) << '\n';
  return dir;
}

json base_metadata(const elastomon::Problem& p) {
  return json{{"mesh_hash", elastomon::io::mesh_hash(p.mesh)},
              {"tets", p.mesh.tet_count()},
              {"nodes", p.mesh.node_count()},
              {"patches", p.patches.size()},
              {"pixels", p.pixel_count()}};
}

void write_json(const fs::path& path, const json& j) { std::ofstream(path) << j.dump(2) << '\n'; }

std::vector<double> per_element(const elastomon::Problem& p, const Eigen::VectorXd& per_pixel) {
  std::vector<double> out(p.mesh.tet_count());
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = per_pixel[p.partition.element_to_pixel[t]];
  return out;
}

std::vector<double> truth_per_element(const elastomon::Problem& p) {
  std::vector<double> out(p.mesh.tet_count());
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = p.truth[p.partition.element_to_pixel[t]] ? 1.0 : 0.0;
  return out;
}

int cmd_forward(const CommonOptions& o) {
  const RunConfig cfg = resolve_config(o);
  const auto problem = elastomon::build_problem(cfg);
  const auto data = elastomon::run_forward(problem);
  const fs::path dir = prepare_dir(cfg);

  elastomon::io::write_matrix_csv((dir / "Lambda0.csv").string(), data.lambda0);
  elastomon::io::write_matrix_csv((dir / "Lambda.csv").string(), data.lambda);
  elastomon::io::write_matrix_csv((dir / "Lambda_delta.csv").string(), data.lambda_delta);
  elastomon::io::write_scalar((dir / "delta.txt").string(), data.delta);

  json meta = base_metadata(problem);
  meta["seed"] = data.seed;
  meta["eta"] = data.eta;
  meta["delta"] = data.delta;
  meta["solver"] = std::string(elastomon::solver_name(data.solver));
  meta["max_energy_mismatch"] = data.max_energy_mismatch;
  meta["seconds"] = data.seconds;
  write_json(dir / "metadata.json", meta);
  if (cfg.output.emit_vtk) {
    elastomon::io::write_vtk((dir / "mesh.vtk").string(), problem.mesh,
                             {{"inside_truth", truth_per_element(problem)},
                              {"lambda", problem.truth_field.lambda},
                              {"mu", problem.truth_field.mu}});
  }
  std::printf("forward: M=%d, delta=%.6e, solver=%s, %.2fs -> %s\n", problem.patches.size(), data.delta,
              std::string(elastomon::solver_name(data.solver)).c_str(), data.seconds, dir.string().c_str());
  return 0;
}

struct Measurements {
  Eigen::MatrixXd lambda0;
  Eigen::MatrixXd lambda_delta;
  double delta = 0.0;
  std::string source;
};

// Uses Lambda0.csv / Lambda_delta.csv from the output directory when both are
// present, otherwise synthesizes them.
Measurements load_or_synthesize(const elastomon::Problem& problem, std::optional<double> delta_flag) {
  const fs::path dir(problem.config.output.dir);
  Measurements m;
  if (fs::exists(dir / "Lambda0.csv") && fs::exists(dir / "Lambda_delta.csv")) {
    m.lambda0 = elastomon::io::read_matrix_csv((dir / "Lambda0.csv").string());
    m.lambda_delta = elastomon::io::read_matrix_csv((dir / "Lambda_delta.csv").string());
    if (m.lambda0.rows() != problem.patches.size() || m.lambda_delta.rows() != problem.patches.size()) {
      throw elastomon::ConfigError("measurement files in '" + dir.string() + "' do not match the configured patch count");
    }
    if (delta_flag) {
      m.delta = *delta_flag;
    } else if (fs::exists(dir / "delta.txt")) {
      m.delta = elastomon::io::read_scalar((dir / "delta.txt").string());
    } else {
      throw elastomon::ConfigError("noise level unknown for data in '" + dir.string() + "'; pass --delta");
    }
    m.source = "files";
    return m;
  }
  const auto data = elastomon::run_forward(problem);
  m.lambda0 = data.lambda0;
  m.lambda_delta = data.lambda_delta;
  m.delta = delta_flag ? *delta_flag : data.delta;
  m.source = "synthesized";
  return m;
}

int cmd_reconstruct(const CommonOptions& o, const std::string& method, std::optional<double> delta_flag) {
  const RunConfig cfg = resolve_config(o);
  if (delta_flag && !(*delta_flag >= 0.0)) throw elastomon::ConfigError("--delta must be non-negative");
  const auto problem = elastomon::build_problem(cfg);
  const Measurements meas = load_or_synthesize(problem, delta_flag);
  const auto start = std::chrono::steady_clock::now();
  const auto reference = elastomon::reference_solutions(problem);
  const auto sens = elastomon::staged("sensitivity", [&] {
    return elastomon::compute_sensitivities(problem.mesh, problem.partition, reference);
  });
  const fs::path dir = prepare_dir(cfg);

  const int p = problem.pixel_count();
  Eigen::VectorXd nu = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd kappa = Eigen::VectorXd::Zero(p);
  json meta = base_metadata(problem);
  meta["method"] = method;
  meta["delta"] = meas.delta;
  meta["data"] = meas.source;
  const double a_max =
      elastomon::compute_amax_tau(cfg.material.lambda0, cfg.material.mu0, cfg.bounds).a_max;

  if (method == "monreg") {
    const auto run = elastomon::run_monreg(problem, sens, meas.lambda0, meas.lambda_delta, meas.delta);
    nu = run.result.nu;
    kappa = run.result.kappa;
    elastomon::io::write_constraints_csv((dir / "constraints.csv").string(), run.constraints);
    meta["a_max"] = run.amax_tau.a_max;
    meta["tau"] = run.amax_tau.tau;
    meta["iterations"] = run.result.iterations;
    meta["objective"] = run.result.objective;
    meta["kkt_residual"] = run.result.kkt_residual;
  } else if (method == "onestep") {
    const auto v = elastomon::difference_data(meas.lambda0, meas.lambda_delta, meas.delta);
    const auto os = elastomon::staged("onestep", [&] { return elastomon::onestep_reconstruct(sens, v.values, cfg.onestep); });
    nu = os.nu;
    kappa = os.kappa;
    meta["omega"] = cfg.onestep.omega;
    meta["sigma"] = cfg.onestep.sigma;
  } else {
    std::ofstream out(dir / "montest.csv", std::ios::binary);
    out << "k,inside,min_eigenvalue\n";
    for (int k = 0; k < p; ++k) {
      const auto t = elastomon::linearized_test_detail(k, cfg.montest, meas.lambda0, meas.lambda_delta, meas.delta, sens);
      // Indicator scaled by the test weights so the voxel map carries contrasts.
      nu[k] = t.inside ? cfg.montest.alpha_mu : 0.0;
      kappa[k] = t.inside ? cfg.montest.alpha_lambda : 0.0;
      out << k << ',' << (t.inside ? 1 : 0) << ',' << elastomon::io::format_double(t.min_eigenvalue) << '\n';
    }
    meta["alpha_lambda"] = cfg.montest.alpha_lambda;
    meta["alpha_mu"] = cfg.montest.alpha_mu;
  }

  std::vector<elastomon::io::VoxelRow> rows(static_cast<std::size_t>(p));
  for (int k = 0; k < p; ++k) {
    auto& r = rows[static_cast<std::size_t>(k)];
    r.pixel = k;
    r.index = problem.partition.pixel_coords(k);
    r.nu = nu[k];
    r.kappa = kappa[k];
    r.lambda = cfg.material.lambda0 + kappa[k];
    r.mu = cfg.material.mu0 + nu[k];
    r.inside_truth = problem.truth[static_cast<std::size_t>(k)];
  }
  elastomon::io::write_voxels_csv((dir / "voxels.csv").string(), rows);

  const int miss = method == "montest"
                       ? [&] {
                           std::vector<bool> pred(static_cast<std::size_t>(p));
                           for (int k = 0; k < p; ++k) pred[static_cast<std::size_t>(k)] = nu[k] != 0.0 || kappa[k] != 0.0;
                           return elastomon::count_misclassified(pred, problem.truth);
                         }()
                       : elastomon::count_misclassified(nu, a_max, problem.truth);
  meta["misclassified"] = miss;
  meta["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_json(dir / "reconstruction.json", meta);
  if (cfg.output.emit_vtk) {
    elastomon::io::write_vtk((dir / ("reconstruction_" + method + ".vtk")).string(), problem.mesh,
                             {{"nu", per_element(problem, nu)},
                              {"kappa", per_element(problem, kappa)},
                              {"inside_truth", truth_per_element(problem)}});
  }
  std::printf("reconstruct %s: %d of %d pixels misclassified -> %s\n", method.c_str(), miss, p, dir.string().c_str());
  return 0;
}

int cmd_noise_sweep(const CommonOptions& o) {
  const RunConfig cfg = resolve_config(o);
  const auto problem = elastomon::build_problem(cfg);
  const auto data = elastomon::run_forward(problem);
  const auto sens = elastomon::staged("sensitivity", [&] {
    return elastomon::compute_sensitivities(problem.mesh, problem.partition, data.reference);
  });
  const std::vector<double> etas{0.1, 0.01, 0.001, 0.0};
  const auto rows = elastomon::noise_sweep(problem, data, sens, etas, cfg.noise.seed);
  const fs::path dir = prepare_dir(cfg);

  std::ofstream csv(dir / "noise_sweep.csv", std::ios::binary);
  csv << "eta,delta,monreg_misclassified,onestep_misclassified,montest_misclassified,monreg_deviation\n";
  std::printf("%8s %14s %8s %8s %8s %14s\n", "eta", "delta", "monreg", "onestep", "montest", "|nu-nu0|_inf");
  for (const auto& r : rows) {
    csv << elastomon::io::format_double(r.eta) << ',' << elastomon::io::format_double(r.delta) << ','
        << r.monreg_misclassified << ',' << r.onestep_misclassified << ',' << r.montest_misclassified << ','
        << elastomon::io::format_double(r.monreg_deviation) << '\n';
    std::printf("%8g %14.6e %8d %8d %8d %14.6e\n", r.eta, r.delta, r.monreg_misclassified, r.onestep_misclassified,
                r.montest_misclassified, r.monreg_deviation);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Elasticity NtD inclusion reconstruction"};
  app.require_subcommand(1);

  CommonOptions forward_opts;
  auto* forward = app.add_subcommand("forward", "Synthesize Lambda0, Lambda and the noisy Lambda^delta");
  add_common(forward, forward_opts);

  CommonOptions rec_opts;
  std::string method;
  std::optional<double> delta;
  auto* rec = app.add_subcommand("reconstruct", "Reconstruct the inclusion from stored or synthesized data");
  add_common(rec, rec_opts);
  rec->add_option("--method", method, "onestep, monreg or montest")
      ->required()
      ->check(CLI::IsMember({"onestep", "monreg", "montest"}));
  rec->add_option("--delta", delta, "Noise magnitude of the stored data");

  CommonOptions sweep_opts;
  auto* experiment = app.add_subcommand("experiment", "Scripted experiments");
  experiment->require_subcommand(1);
  auto* sweep = experiment->add_subcommand("noise-sweep", "All methods at eta in {0.1, 0.01, 0.001, 0}");
  add_common(sweep, sweep_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*forward) return cmd_forward(forward_opts);
    if (*rec) return cmd_reconstruct(rec_opts, method, delta);
    if (*sweep) return cmd_noise_sweep(sweep_opts);
  } catch (const elastomon::QpNotConverged& e) {
    std::cerr << "error: " << e.what() << " (last KKT residual " << e.last_iterate().kkt_residual << ")\n";
    return kExitNumerical;
  } catch (const elastomon::NumericalFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const elastomon::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return 0;
}
