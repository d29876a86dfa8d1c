#pragma once

// End-to-end graph learning: initialization, model dispatch, precision and
// conditional-correlation extraction, adjacency thresholding.

#include <optional>
#include <string_view>

#include "gfm/factor_manifold.hpp"
#include "gfm/objective.hpp"
#include "gfm/optimizer.hpp"

namespace gfm {

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;
using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;
using Data = DataSet<double>;

/// GGM/EGM: full SPD covariance. GGFM/EGFM: rank-k plus diagonal.
enum class ModelKind { kGGM, kGGFM, kEGM, kEGFM };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);
bool is_factor_model(ModelKind kind);
bool is_elliptical_model(ModelKind kind);

struct ModelConfig {
  ModelKind model = ModelKind::kGGM;
  DensityGenerator generator = DensityGenerator::gaussian();
  int rank = 0;  // factor models only
  PenaltyConfig penalty{};
  CGConfig solver{};
  double tol = 1e-2;

  /// Gaussian generator for GGM/GGFM, Student-t(nu) for EGM/EGFM.
  static ModelConfig make(ModelKind model, double lambda, int rank = 0,
                          double nu = 5.0);

  /// Throws InvalidArgument on an inconsistent configuration for data of
  /// dimension p.
  void validate(Index p) const;
};

struct LearnResult {
  Matrix sigma;
  Matrix theta;
  Matrix cond_corr;
  BoolMatrix adjacency;
  OptTrace trace;
  std::optional<FactorPoint<double>> factors;

  int edge_count() const;
};

/// Sample covariance, with a ridge δI (δ = 1e-8·tr/p) when its spectrum is
/// numerically degenerate.
SpdMatrix<double> init_full(const Data& x);

/// (leading k eigenvectors of the sample covariance, I_k, I_p).
FactorPoint<double> init_factor(const Data& x, int k);

LearnResult learn(const Data& x, const ModelConfig& cfg);

/// Factor-model learn from an explicit starting point.
LearnResult learn_from(const Data& x, const ModelConfig& cfg,
                       const FactorPoint<double>& start);

/// −Θ_qℓ/√(Θ_qqΘ_ℓℓ) off the diagonal, 0 on it.
Matrix conditional_correlation(const Matrix& theta);

/// |cond_corr_ij| ≥ tol for i ≠ j.
BoolMatrix threshold_adjacency(const Matrix& cond_corr, double tol);

}  // namespace gfm
