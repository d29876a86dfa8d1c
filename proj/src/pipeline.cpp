#include "gfm/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gfm/spd_manifold.hpp"

namespace gfm {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kGGM: return "ggm";
    case ModelKind::kGGFM: return "ggfm";
    case ModelKind::kEGM: return "egm";
    case ModelKind::kEGFM: return "egfm";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  for (ModelKind k : {ModelKind::kGGM, ModelKind::kGGFM, ModelKind::kEGM,
                      ModelKind::kEGFM}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::kUsage, "unknown model '" + std::string(name) + "'");
}

bool is_factor_model(ModelKind kind) {
  return kind == ModelKind::kGGFM || kind == ModelKind::kEGFM;
}

bool is_elliptical_model(ModelKind kind) {
  return kind == ModelKind::kEGM || kind == ModelKind::kEGFM;
}

ModelConfig ModelConfig::make(ModelKind model, double lambda, int rank,
                              double nu) {
  ModelConfig cfg;
  cfg.model = model;
  cfg.generator = is_elliptical_model(model) ? DensityGenerator::student_t(nu)
                                             : DensityGenerator::gaussian();
  cfg.rank = is_factor_model(model) ? rank : 0;
  cfg.penalty.lambda = lambda;
  return cfg;
}

void ModelConfig::validate(Index p) const {
  penalty.validate();
  solver.validate();
  if (!(tol > 0)) throw Error(ErrorCode::kInvalidArgument, "tol must be > 0");
  if (is_elliptical_model(model) == generator.is_gaussian()) {
    throw Error(ErrorCode::kInvalidArgument,
                "generator does not match the model kind");
  }
  if (!generator.is_gaussian() && !(generator.nu > 2)) {
    throw Error(ErrorCode::kInvalidArgument, "Student-t requires nu > 2");
  }
  if (is_factor_model(model) && (rank < 1 || rank >= p)) {
    throw Error(ErrorCode::kInvalidArgument, "factor models need 1 <= rank < p");
  }
}

int LearnResult::edge_count() const {
  return int(adjacency.cast<int>().sum() / 2);
}

SpdMatrix<double> init_full(const Data& x) {
  Matrix s = x.scatter();
  const double trace = s.trace();
  if (!(trace > 0)) {
    throw Error(ErrorCode::kDegenerateData, "sample covariance has zero trace");
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  if (ev(0) < 1e-8 * ev(ev.size() - 1)) {
    s.diagonal().array() += 1e-8 * trace / double(x.p());
  }
  return SpdMatrix<double>(s);
}

FactorPoint<double> init_factor(const Data& x, int k) {
  if (k < 1 || k >= x.p()) {
    throw Error(ErrorCode::kInvalidArgument, "init_factor needs 1 <= k < p");
  }
  return FactorPoint<double>(leading_eigvecs(x.scatter(), k),
                             Matrix::Identity(k, k), Vector::Ones(x.p()));
}

Matrix conditional_correlation(const Matrix& theta) {
  const Index p = theta.rows();
  Matrix out = Matrix::Zero(p, p);
  const Vector d = theta.diagonal().cwiseSqrt();
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < j; ++i) {
      const double c = std::clamp(-theta(i, j) / (d(i) * d(j)), -1.0, 1.0);
      out(i, j) = c;
      out(j, i) = c;
    }
  }
  return out;
}

BoolMatrix threshold_adjacency(const Matrix& cond_corr, double tol) {
  if (!(tol > 0)) throw Error(ErrorCode::kInvalidArgument, "tol must be > 0");
  const Index p = cond_corr.rows();
  BoolMatrix a = BoolMatrix::Constant(p, p, false);
  for (Index j = 0; j < p; ++j) {
    for (Index i = 0; i < j; ++i) {
      const bool on = std::abs(cond_corr(i, j)) >= tol;
      a(i, j) = on;
      a(j, i) = on;
    }
  }
  return a;
}

namespace {

LearnResult finish(const SpdMatrix<double>& sigma, OptTrace trace,
                   double tol) {
  LearnResult r;
  r.sigma = sigma.matrix();
  r.theta = sigma.inverse_matrix();
  r.cond_corr = conditional_correlation(r.theta);
  r.adjacency = threshold_adjacency(r.cond_corr, tol);
  r.trace = std::move(trace);
  return r;
}

}  // namespace

LearnResult learn_from(const Data& x, const ModelConfig& cfg,
                       const FactorPoint<double>& start) {
  cfg.validate(x.p());
  if (!is_factor_model(cfg.model)) {
    throw Error(ErrorCode::kInvalidArgument,
                "learn_from takes a factor starting point");
  }
  const FactorObjective<double> cost(x, cfg.generator, cfg.penalty);
  auto res = minimize(FactorManifold<double>{}, cost, start, cfg.solver);
  LearnResult r = finish(embed(res.point), std::move(res.trace), cfg.tol);
  r.factors.emplace(std::move(res.point));
  return r;
}

LearnResult learn(const Data& x, const ModelConfig& cfg) {
  cfg.validate(x.p());
  if (is_factor_model(cfg.model)) {
    return learn_from(x, cfg, init_factor(x, cfg.rank));
  }
  const SpdObjective<double> cost(x, cfg.generator, cfg.penalty);
  auto res = minimize(SpdManifold<double>{}, cost, init_full(x), cfg.solver);
  return finish(res.point, std::move(res.trace), cfg.tol);
}

}  // namespace gfm
