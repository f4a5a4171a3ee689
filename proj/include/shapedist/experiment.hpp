// Reproducible synthetic-shape experiments: dataset synthesis around a
// template, distance matrices by several methods, error statistics,
// curvature histogram, MDS embeddings and Procrustes comparison.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shapedist/analysis.hpp"
#include "shapedist/landmark.hpp"
#include "shapedist/pipeline.hpp"

namespace shapedist {

struct ExperimentConfig {
  LandmarkConfig template_config = trapezoid_template();
  std::string template_name = "trapezoid";
  int n = 20;
  double noise_scale = 0.5;  // c in N(0, c * G_template)
  double sigma = 0.5;        // Gaussian kernel width
  std::uint64_t seed = 1u;
  std::vector<DistanceMethod> methods = {
      DistanceMethod::Exact, DistanceMethod::First, DistanceMethod::CC};
  GeodesicSolverConfig solver;
  int histogram_bins = 30;

  void validate() const;
};

// Draws v_i ~ N(0, noise_scale * G_template) in template coordinates
// (Cholesky factor times standard normal draws from the seeded generator)
// and sets q_i = exp(template, v_i). Samples whose geodesic leaves the
// chart are redrawn, up to 10 attempts each.
Dataset synthesize_dataset(const ExperimentConfig& cfg);

struct MethodReport {
  DistanceMethod method = DistanceMethod::First;
  DistanceMatrix matrix;
  ErrorStats stats;  // vs exact, when exact was computed
  Embedding embedding;
  double procrustes_vs_exact = 0.0;
};

struct ExperimentResult {
  Dataset dataset;
  Registration registration;
  bool has_exact = false;
  DistanceMatrix exact;
  Embedding exact_embedding;
  CurvatureHistogram curvature;
  std::vector<MethodReport> approx;  // non-exact methods, config order
  int mds_dim = 2;                   // min(2, n - 1)

  const MethodReport& report_for(DistanceMethod m) const;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Writes dataset, matrices, histograms, embeddings and report.txt into
// `dir` (created if absent). Everything written is a pure function of the
// config, so identical seeds give identical bytes.
void write_experiment_files(const std::string& dir,
                            const ExperimentConfig& cfg,
                            const ExperimentResult& result);

// Model-space curve families: cc and signed-taylor2 distances between
// exp(t u) and exp(t v) for unit u, v at angle phi, per curvature in ks.
struct Fig1Curves {
  std::vector<double> ks;
  std::vector<double> ts;
  std::vector<std::vector<double>> cc;              // [k index][t index]
  std::vector<std::vector<double>> taylor2_signed;  // sign(x) sqrt(|x|)
};

Fig1Curves fig1_curves(const std::vector<double>& ks, double phi,
                       double t_max, int t_steps);

void write_fig1_csv(const std::string& path, const Fig1Curves& curves);

}  // namespace shapedist
