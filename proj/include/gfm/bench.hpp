#pragma once

// Synthetic graph benchmarks: random graph models, Laplacian-based precision
// matrices, elliptical sampling, ROC/AUC scoring and Monte-Carlo sweeps.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gfm/pipeline.hpp"

namespace gfm {

using Rng = std::mt19937_64;

enum class GraphKind {
  kBarabasiAlbert,
  kErdosRenyi,
  kWattsStrogatz,
  kRandomGeometric
};

std::string_view to_string(GraphKind kind);
/// ba | er | ws | rgg, or the long aliases barabasi | erdos | watts | geometric.
GraphKind parse_graph_kind(std::string_view name);

struct GraphModel {
  GraphKind kind = GraphKind::kErdosRenyi;
  double er_probability = 0.1;
  int ws_neighbors = 5;  // ring lattice joins ws_neighbors/2 on each side
  double ws_rewire = 0.1;
  double rgg_radius = 0.2;
  int ba_attach = 2;
  double weight_low = 2.0;
  double weight_high = 5.0;

  static GraphModel of(GraphKind kind) {
    GraphModel g;
    g.kind = kind;
    return g;
  }
};

/// Weighted symmetric adjacency with zero diagonal. Weights ~ U(low, high).
Matrix sample_graph(const GraphModel& model, Index p, Rng& rng);

/// D − A + κI.
SpdMatrix<double> graph_to_precision(const Matrix& adjacency, double kappa);

/// n draws of Chol(Σ)·z (Gaussian) or Chol(Σ)·z/√(q/ν), q ~ χ²(ν)
/// (Student-t with scatter Σ).
Data sample_elliptical(const SpdMatrix<double>& sigma,
                       const DensityGenerator& g, Index n, Rng& rng);

BoolMatrix support_of(const Matrix& weighted_adjacency);

struct RocResult {
  std::vector<double> fpr;
  std::vector<double> tpr;
  double auc = 0;
};

/// ROC of the scores |cond_corr_ij| (upper triangle) against the true
/// support, swept over every distinct score; AUC by the trapezoid rule.
RocResult roc_auc(const Matrix& cond_corr, const BoolMatrix& truth);

/// Curve value on a grid; at a vertical segment the upper endpoint is used.
std::vector<double> interpolate_roc(const RocResult& roc,
                                    std::span<const double> fpr_grid);

/// Newman modularity of a partition (community label per node).
double modularity(const BoolMatrix& adjacency, std::span<const int> partition);

struct BenchConfig {
  Index p = 50;
  Index n = 250;
  int trials = 50;
  std::optional<double> nu_data = 3.5;  // unset: Gaussian data
  double kappa = 0.1;
  std::uint64_t seed = 0;
  int threads = 0;  // 0: hardware concurrency capped by GFM_THREADS
};

struct NamedModel {
  std::string label;
  ModelConfig config;
};

struct ModelReport {
  std::string label;
  std::vector<double> aucs;  // per trial; NaN marks a failed trial
  std::vector<double> mean_tpr;
  double mean_auc = 0;
  double stderr_auc = 0;
  int failures = 0;
};

struct BenchReport {
  std::vector<double> fpr_grid;
  std::vector<ModelReport> models;
};

inline constexpr int kRocGridPoints = 200;

std::vector<double> roc_grid();

/// Per-figure λ (and k) presets for the four graph models.
std::vector<NamedModel> preset_models(GraphKind graph, double nu = 5.0);

NamedModel preset_model(GraphKind graph, ModelKind model, double nu = 5.0);

/// Child generator for one trial, split deterministically from the seed.
Rng trial_rng(std::uint64_t seed, int trial);

int worker_count(int requested, int tasks);

BenchReport run_benchmark(const GraphModel& graph, const BenchConfig& bench,
                          const std::vector<NamedModel>& models);

struct SensitivityRow {
  std::string label;
  double lambda = 0;
  int rank = 0;
  double mean_auc = 0;
  double stderr_auc = 0;
  int failures = 0;
};

/// Re-runs the benchmark once per λ (ranks empty) or once per rank (factor
/// models only), other settings taken from `models`.
std::vector<SensitivityRow> run_sensitivity(
    const GraphModel& graph, const BenchConfig& bench,
    const std::vector<NamedModel>& models, std::span<const double> lambdas,
    std::span<const int> ranks);

}  // namespace gfm
