#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "gfm/bench.hpp"

namespace gfm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Presets {
  double full_gaussian;
  double full_elliptical;
  double factor_gaussian;
  double factor_elliptical;
  int rank;
};

Presets presets_for(GraphKind graph) {
  switch (graph) {
    case GraphKind::kBarabasiAlbert: return {0.05, 0.05, 0.01, 0.01, 20};
    case GraphKind::kErdosRenyi: return {0.05, 0.05, 0.01, 0.01, 20};
    case GraphKind::kWattsStrogatz: return {0.1, 0.1, 0.01, 0.01, 10};
    case GraphKind::kRandomGeometric: return {0.1, 0.1, 0.01, 0.05, 20};
  }
  return {0.05, 0.05, 0.01, 0.01, 20};
}

struct TrialOutcome {
  std::vector<double> auc;                // per model, NaN on failure
  std::vector<std::vector<double>> tpr;  // per model, empty on failure
};

TrialOutcome run_trial(const GraphModel& graph, const BenchConfig& bench,
                       const std::vector<NamedModel>& models,
                       const std::vector<double>& grid, int trial) {
  TrialOutcome out;
  out.auc.assign(models.size(), kNaN);
  out.tpr.resize(models.size());
  Rng rng = trial_rng(bench.seed, trial);
  const Matrix w = sample_graph(graph, bench.p, rng);
  const BoolMatrix truth = support_of(w);
  const SpdMatrix<double> sigma(graph_to_precision(w, bench.kappa).inverse_matrix());
  const DensityGenerator g = bench.nu_data
                                 ? DensityGenerator::student_t(*bench.nu_data)
                                 : DensityGenerator::gaussian();
  const Data x = sample_elliptical(sigma, g, bench.n, rng);
  for (std::size_t m = 0; m < models.size(); ++m) {
    try {
      const LearnResult r = learn(x, models[m].config);
      const RocResult roc = roc_auc(r.cond_corr, truth);
      out.auc[m] = roc.auc;
      out.tpr[m] = interpolate_roc(roc, grid);
    } catch (const Error&) {
      // Recorded as a failed trial for this model.
    }
  }
  return out;
}

}  // namespace

NamedModel preset_model(GraphKind graph, ModelKind model, double nu) {
  const Presets ps = presets_for(graph);
  double lambda = 0;
  switch (model) {
    case ModelKind::kGGM: lambda = ps.full_gaussian; break;
    case ModelKind::kEGM: lambda = ps.full_elliptical; break;
    case ModelKind::kGGFM: lambda = ps.factor_gaussian; break;
    case ModelKind::kEGFM: lambda = ps.factor_elliptical; break;
  }
  return {std::string(to_string(model)),
          ModelConfig::make(model, lambda, ps.rank, nu)};
}

std::vector<NamedModel> preset_models(GraphKind graph, double nu) {
  std::vector<NamedModel> out;
  for (ModelKind m : {ModelKind::kGGM, ModelKind::kGGFM, ModelKind::kEGM,
                      ModelKind::kEGFM}) {
    out.push_back(preset_model(graph, m, nu));
  }
  return out;
}

Rng trial_rng(std::uint64_t seed, int trial) {
  std::seed_seq seq{std::uint32_t(seed & 0xffffffffu), std::uint32_t(seed >> 32),
                    std::uint32_t(trial)};
  return Rng(seq);
}

int worker_count(int requested, int tasks) {
  int n = requested > 0 ? requested
                        : std::max(1, int(std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("GFM_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return std::clamp(n, 1, std::max(1, tasks));
}

BenchReport run_benchmark(const GraphModel& graph, const BenchConfig& bench,
                          const std::vector<NamedModel>& models) {
  if (bench.trials < 1) throw Error(ErrorCode::kInvalidArgument, "trials must be >= 1");
  if (!(bench.kappa > 0)) throw Error(ErrorCode::kInvalidArgument, "kappa must be > 0");
  if (bench.nu_data && !(*bench.nu_data > 2)) {
    throw Error(ErrorCode::kInvalidArgument, "data nu must be > 2");
  }
  if (models.empty()) throw Error(ErrorCode::kInvalidArgument, "no models to run");
  for (const auto& m : models) m.config.validate(bench.p);

  BenchReport report;
  report.fpr_grid = roc_grid();
  std::vector<TrialOutcome> outcomes(std::size_t(bench.trials));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int t = next++; t < bench.trials; t = next++) {
      try {
        outcomes[std::size_t(t)] =
            run_trial(graph, bench, models, report.fpr_grid, t);
      } catch (const Error&) {
        // Degenerate sampled truth: every model fails this trial.
        outcomes[std::size_t(t)].auc.assign(models.size(), kNaN);
        outcomes[std::size_t(t)].tpr.assign(models.size(), {});
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const int workers = worker_count(bench.threads, bench.trials);
    for (int i = 1; i < workers; ++i) pool.emplace_back(work);
    work();
  }

  const std::size_t grid_size = report.fpr_grid.size();
  for (std::size_t m = 0; m < models.size(); ++m) {
    ModelReport mr;
    mr.label = models[m].label;
    mr.mean_tpr.assign(grid_size, 0.0);
    double sum = 0, sum_sq = 0;
    int ok = 0;
    for (const auto& o : outcomes) {
      const double a = o.auc[m];
      mr.aucs.push_back(a);
      if (std::isnan(a)) {
        ++mr.failures;
        continue;
      }
      ++ok;
      sum += a;
      for (std::size_t g = 0; g < grid_size; ++g) mr.mean_tpr[g] += o.tpr[m][g];
    }
    if (ok == 0) {
      mr.mean_auc = kNaN;
      mr.stderr_auc = kNaN;
      std::fill(mr.mean_tpr.begin(), mr.mean_tpr.end(), kNaN);
    } else {
      mr.mean_auc = sum / ok;
      for (double a : mr.aucs)
        if (!std::isnan(a)) sum_sq += (a - mr.mean_auc) * (a - mr.mean_auc);
      mr.stderr_auc = ok > 1 ? std::sqrt(sum_sq / (ok - 1) / ok) : 0.0;
      for (double& v : mr.mean_tpr) v /= ok;
    }
    report.models.push_back(std::move(mr));
  }
  return report;
}

std::vector<SensitivityRow> run_sensitivity(
    const GraphModel& graph, const BenchConfig& bench,
    const std::vector<NamedModel>& models, std::span<const double> lambdas,
    std::span<const int> ranks) {
  if (lambdas.empty() == ranks.empty()) {
    throw Error(ErrorCode::kUsage, "sweep exactly one of lambda or rank");
  }
  std::vector<SensitivityRow> rows;
  auto emit = [&](const NamedModel& nm) {
    const BenchReport r = run_benchmark(graph, bench, {nm});
    const ModelReport& m = r.models.front();
    rows.push_back({nm.label, nm.config.penalty.lambda, nm.config.rank,
                    m.mean_auc, m.stderr_auc, m.failures});
  };
  for (const auto& base : models) {
    if (!lambdas.empty()) {
      for (double l : lambdas) {
        NamedModel nm = base;
        nm.config.penalty.lambda = l;
        emit(nm);
      }
    } else {
      if (!is_factor_model(base.config.model)) {
        throw Error(ErrorCode::kUsage, "rank sweep needs factor models");
      }
      for (int k : ranks) {
        NamedModel nm = base;
        nm.config.rank = k;
        emit(nm);
      }
    }
  }
  return rows;
}

}  // namespace gfm
