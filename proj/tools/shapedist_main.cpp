// shapedist command-line driver: dataset synthesis, distance matrices,
// MDS, and the model-space curve / random-shape experiments.
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shapedist/experiment.hpp"
#include "shapedist/io.hpp"
#include "shapedist/pipeline.hpp"

namespace {

using namespace shapedist;

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(
             clock::now().time_since_epoch())
      .count();
}

const char* error_kind(const std::exception& e) {
  if (dynamic_cast<const DomainEscapeError*>(&e)) return "domain_escape";
  if (dynamic_cast<const DomainError*>(&e)) return "domain";
  if (dynamic_cast<const IllConditionedError*>(&e)) return "ill_conditioned";
  if (dynamic_cast<const MetricError*>(&e)) return "metric";
  if (dynamic_cast<const CapabilityError*>(&e)) return "capability";
  if (dynamic_cast<const DependenceError*>(&e)) return "dependence";
  if (dynamic_cast<const ConvergenceError*>(&e)) return "convergence";
  if (dynamic_cast<const SizeError*>(&e)) return "size";
  if (dynamic_cast<const IoError*>(&e)) return "io";
  if (dynamic_cast<const Error*>(&e)) return "error";
  return "internal";
}

// --template accepts "trapezoid", "mean" (Karcher mean of the dataset), or
// a dataset file whose first configuration is the template.
LandmarkConfig resolve_template(const std::string& spec, const Dataset* ds,
                                const ManifoldChart* chart,
                                const GeodesicSolverConfig& solver) {
  if (spec == "trapezoid") return trapezoid_template();
  if (spec == "mean") {
    if (ds == nullptr || chart == nullptr)
      throw Error("--template mean requires an input dataset");
    return karcher_mean(*ds, *chart, solver);
  }
  Dataset tds = read_dataset(spec);
  return tds.configs.front();
}

struct SolverFlags {
  int steps = 100;
  double bvp_tol = 1e-9;
  GeodesicSolverConfig config() const {
    GeodesicSolverConfig cfg;
    cfg.steps = steps;
    cfg.bvp_tol = bvp_tol;
    return cfg;
  }
  void attach(CLI::App* cmd) {
    cmd->add_option("--steps", steps, "RK4 steps per unit time");
    cmd->add_option("--bvp-tol", bvp_tol, "shooting endpoint tolerance");
  }
};

int cmd_synth(const std::string& template_spec, int n, double sigma,
              double noise_scale, std::uint64_t seed,
              const SolverFlags& solver, const std::string& out) {
  ExperimentConfig cfg;
  cfg.template_config = resolve_template(template_spec, nullptr, nullptr,
                                         solver.config());
  cfg.template_name = template_spec;
  cfg.n = n;
  cfg.sigma = sigma;
  cfg.noise_scale = noise_scale;
  cfg.seed = seed;
  cfg.solver = solver.config();
  const Dataset ds = synthesize_dataset(cfg);
  write_dataset(out, ds);
  std::cout << "synth: wrote " << ds.n() << " configurations (d=" << ds.d
            << ", m=" << ds.m << ") to " << out << "\n";
  return 0;
}

int cmd_distmat(const std::string& input, const std::string& template_spec,
                const std::string& method_str, const SolverFlags& solver,
                const std::string& out) {
  const DistanceMethod method = method_from_name(method_str);
  const Dataset ds = read_dataset(input);
  ds.validate();
  const ManifoldChart chart =
      landmark_chart(GaussianKernel{ds.sigma}, ds.d, ds.m);
  const GeodesicSolverConfig cfg = solver.config();

  const double t0 = now_ms();
  const std::uint64_t bvp0 = bvp_solve_count();
  DistanceMatrix dm;
  int register_failures = 0;
  if (method == DistanceMethod::Exact) {
    dm = exact_distance_matrix(ds, chart, cfg);
  } else {
    const LandmarkConfig tmpl =
        resolve_template(template_spec, &ds, &chart, cfg);
    const Registration reg = register_dataset(ds, tmpl, chart, cfg);
    for (auto c : reg.converged) register_failures += c == 0;
    dm = approx_distance_matrix(reg, chart, method);
  }
  const double wall = now_ms() - t0;
  write_distance_matrix_csv(out, dm);

  std::cout << "distmat: method=" << method_name(method) << " n=" << dm.n
            << " wall_ms=" << format_double(wall)
            << " bvp_count=" << (bvp_solve_count() - bvp0)
            << " register_nonconverged=" << register_failures
            << " nonconverged_pairs=" << dm.count_nonconverged() << "\n";
  std::cout << "distmat: wrote " << out << "\n";
  return 0;
}

int cmd_mds(const std::string& input, int dim, const std::string& out) {
  const DistanceMatrix dm = read_distance_matrix_csv(input);
  const Embedding e = classical_mds(dm, dim);
  write_embedding_csv(out, e);
  std::cout << "mds: n=" << e.n << " dim=" << e.dim << " eigenvalues=";
  for (int j = 0; j < e.dim; ++j)
    std::cout << (j ? ";" : "") << format_double(e.eigenvalues[j]);
  std::cout << " clamped=" << e.clamped << "\n";
  if (e.clamped > 0)
    std::cerr << "mds: warning: " << e.clamped
              << " negative eigenvalue(s) among the top " << e.dim
              << " clamped to zero\n";
  std::cout << "mds: wrote " << out << "\n";
  return 0;
}

int cmd_fig1(const std::vector<double>& ks, double phi, double t_max,
             int t_steps, const std::string& out) {
  const Fig1Curves curves = fig1_curves(ks, phi, t_max, t_steps);
  write_fig1_csv(out, curves);
  std::cout << "fig1: wrote " << curves.ts.size() << " samples x "
            << ks.size() << " curvatures to " << out << "\n";
  return 0;
}

int cmd_experiment(const std::string& template_spec, int n, double sigma,
                   double noise_scale, std::uint64_t seed,
                   const std::vector<std::string>& method_names,
                   const SolverFlags& solver, const std::string& out_dir) {
  ExperimentConfig cfg;
  cfg.template_config = resolve_template(template_spec, nullptr, nullptr,
                                         solver.config());
  cfg.template_name = template_spec;
  cfg.n = n;
  cfg.sigma = sigma;
  cfg.noise_scale = noise_scale;
  cfg.seed = seed;
  cfg.solver = solver.config();
  cfg.methods.clear();
  for (const std::string& s : method_names)
    cfg.methods.push_back(method_from_name(s));

  const double t0 = now_ms();
  const ExperimentResult res = run_experiment(cfg);
  const double wall = now_ms() - t0;
  write_experiment_files(out_dir, cfg, res);

  std::cout << "experiment: n=" << n << " wall_ms=" << format_double(wall)
            << " bvp_register=" << res.registration.bvp_solves;
  if (res.has_exact) std::cout << " bvp_exact=" << res.exact.bvp_count;
  std::cout << "\n";
  if (res.has_exact) {
    for (const MethodReport& rep : res.approx)
      std::cout << "experiment: " << method_name(rep.method)
                << " mean_abs=" << format_double(rep.stats.mean_abs)
                << " procrustes=" << format_double(rep.procrustes_vs_exact)
                << "\n";
  }
  std::cout << "experiment: wrote " << out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "shapedist: pairwise geodesic distance approximation on landmark "
      "shape spaces"};
  app.require_subcommand(1);

  // synth
  std::string synth_template = "trapezoid", synth_out = "dataset.txt";
  int synth_n = 20;
  double synth_sigma = 0.5, synth_noise = 0.5;
  std::uint64_t synth_seed = 1;
  SolverFlags synth_solver;
  CLI::App* synth = app.add_subcommand("synth", "synthesize a random dataset");
  synth->add_option("--template", synth_template,
                    "trapezoid or a template dataset file");
  synth->add_option("--n", synth_n, "number of configurations")
      ->check(CLI::PositiveNumber);
  synth->add_option("--sigma", synth_sigma, "Gaussian kernel width");
  synth->add_option("--noise-scale", synth_noise,
                    "c in tangent covariance c*G_template");
  synth->add_option("--seed", synth_seed, "random seed");
  synth->add_option("--out", synth_out, "output dataset file");
  synth_solver.attach(synth);

  // distmat
  std::string dm_input, dm_template = "mean", dm_method = "cc",
              dm_out = "distmat.csv";
  SolverFlags dm_solver;
  CLI::App* distmat =
      app.add_subcommand("distmat", "compute a pairwise distance matrix");
  distmat->add_option("--input", dm_input, "dataset file")->required();
  distmat->add_option("--template", dm_template,
                      "trapezoid, mean, or a template dataset file");
  distmat->add_option("--method", dm_method, "exact|first|taylor2|cc");
  distmat->add_option("--out", dm_out, "output CSV");
  dm_solver.attach(distmat);

  // mds
  std::string mds_input, mds_out = "embedding.csv";
  int mds_dim = 2;
  CLI::App* mds = app.add_subcommand("mds", "classical MDS of a matrix CSV");
  mds->add_option("--input", mds_input, "distance matrix CSV")->required();
  mds->add_option("--dim", mds_dim, "embedding dimension")
      ->check(CLI::PositiveNumber);
  mds->add_option("--out", mds_out, "output embedding CSV");

  // fig1
  std::vector<double> fig1_ks = {-1.0, -0.5, 0.0, 0.5, 1.0};
  double fig1_phi = std::numbers::pi / 6.0;
  double fig1_tmax = std::numbers::pi;
  int fig1_steps = 128;
  std::string fig1_out = "fig1.csv";
  CLI::App* fig1 = app.add_subcommand(
      "fig1", "model-space approximation curves over scaled tangents");
  fig1->add_option("--k", fig1_ks, "curvature values");
  fig1->add_option("--phi", fig1_phi, "angle between the tangents");
  fig1->add_option("--t-max", fig1_tmax, "right edge of the scale grid");
  fig1->add_option("--t-steps", fig1_steps, "grid intervals")
      ->check(CLI::PositiveNumber);
  fig1->add_option("--out", fig1_out, "output CSV");

  // experiment
  std::string exp_template = "trapezoid", exp_out = "experiment";
  int exp_n = 20;
  double exp_sigma = 0.5, exp_noise = 0.5;
  std::uint64_t exp_seed = 1;
  std::vector<std::string> exp_methods = {"exact", "first", "cc"};
  SolverFlags exp_solver;
  CLI::App* experiment = app.add_subcommand(
      "experiment", "full random-shape experiment with report");
  experiment->add_option("--template", exp_template,
                         "trapezoid or a template dataset file");
  experiment->add_option("--n", exp_n, "number of configurations")
      ->check(CLI::PositiveNumber);
  experiment->add_option("--sigma", exp_sigma, "Gaussian kernel width");
  experiment->add_option("--noise-scale", exp_noise,
                         "c in tangent covariance c*G_template");
  experiment->add_option("--seed", exp_seed, "random seed");
  experiment->add_option("--methods", exp_methods,
                         "distance methods (exact first taylor2 cc)");
  experiment->add_option("--out", exp_out, "output directory");
  exp_solver.attach(experiment);

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed())
      return cmd_synth(synth_template, synth_n, synth_sigma, synth_noise,
                       synth_seed, synth_solver, synth_out);
    if (distmat->parsed())
      return cmd_distmat(dm_input, dm_template, dm_method, dm_solver, dm_out);
    if (mds->parsed()) return cmd_mds(mds_input, mds_dim, mds_out);
    if (fig1->parsed())
      return cmd_fig1(fig1_ks, fig1_phi, fig1_tmax, fig1_steps, fig1_out);
    if (experiment->parsed())
      return cmd_experiment(exp_template, exp_n, exp_sigma, exp_noise,
                            exp_seed, exp_methods, exp_solver, exp_out);
  } catch (const std::exception& e) {
    std::cerr << "error kind=" << error_kind(e) << " msg=\"" << e.what()
              << "\"\n";
    return 1;
  }
  return 0;
}
