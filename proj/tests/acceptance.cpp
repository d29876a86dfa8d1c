// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Measured quantities are printed next to the verdict.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "support.hpp"

namespace gfm {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// Instance i cycles through the four (generator, λ) combinations.
DensityGenerator generator_for(int i) {
  return i % 2 ? DensityGenerator::student_t(4.0) : DensityGenerator::gaussian();
}
PenaltyConfig penalty_for(int i) { return {(i / 2) % 2 ? 0.1 : 0.0, 1e-12}; }

Verdict gradient_correctness() {
  const auto t0 = Clock::now();
  Rng rng(1001);
  double worst = 0;
  const SpdManifold<double> spd;
  const FactorManifold<double> fac;
  for (int i = 0; i < 20; ++i) {
    const Index p = test::uniform_int(3, 8, rng);
    const Data x = test::random_data(test::uniform_int(20, 60, rng), p, rng);
    const SpdObjective<double> f(x, generator_for(i), penalty_for(i));
    const SpdMatrix<double> s(test::random_spd(p, rng));
    const Matrix grad = spd.egrad_to_rgrad(s, f.value_and_egrad(s).second);
    for (int d = 0; d < 10; ++d) {
      const Matrix xi = test::random_sym(p, rng);
      const double fd = test::directional_derivative(
          [&](double t) { return f.value(spd.retract(s, Matrix(t * xi))); });
      worst = std::max(worst, test::relative_error(fd, spd.inner(s, grad, xi)));
    }
  }
  for (int i = 0; i < 20; ++i) {
    const Index p = test::uniform_int(4, 8, rng);
    const Index k = test::uniform_int(1, 3, rng);
    const Data x = test::random_data(test::uniform_int(20, 60, rng), p, rng);
    const FactorObjective<double> f(x, generator_for(i), penalty_for(i));
    const auto th = test::random_factor_point(p, k, rng);
    const auto grad = fac.egrad_to_rgrad(th, f.value_and_egrad(th).second);
    for (int d = 0; d < 10; ++d) {
      const auto xi = test::random_factor_tangent(th, rng);
      const double fd = test::directional_derivative(
          [&](double t) { return f.value(fac.retract(th, t * xi)); });
      worst = std::max(worst, test::relative_error(fd, fac.inner(th, grad, xi)));
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-5 && secs < 30,
          fmt("worst rel err %.2e", worst) + fmt(", %.1f s", secs)};
}

Verdict stationarity() {
  Rng rng(1002);
  double worst = 0;
  const SpdManifold<double> m;
  for (int i = 0; i < 10; ++i) {
    const Index p = test::uniform_int(2, 10, rng);
    const Data x = test::random_data(test::uniform_int(3 * int(p), 100, rng), p, rng);
    const SpdObjective<double> f(x, DensityGenerator::gaussian(), {0.0, 1e-12});
    const SpdMatrix<double> scm(x.scatter());
    const Matrix g = m.egrad_to_rgrad(scm, f.value_and_egrad(scm).second);
    worst = std::max(worst, std::sqrt(m.inner(scm, g, g)));
  }
  return {worst <= 1e-8, fmt("max grad norm %.2e", worst)};
}

Verdict quotient_invariance() {
  Rng rng(1003);
  double worst_f = 0, worst_r = 0;
  for (int i = 0; i < 50; ++i) {
    const Index p = test::uniform_int(4, 9, rng);
    const Index k = test::uniform_int(1, 3, rng);
    const Data x = test::random_data(40, p, rng);
    const FactorObjective<double> f(x, generator_for(i), penalty_for(i));
    const auto th = test::random_factor_point(p, k, rng);
    const Matrix o = test::random_orthogonal(k, rng);
    const auto tho = act(th, o);
    const double fa = f.value(th), fb = f.value(tho);
    worst_f = std::max(worst_f, std::abs(fa - fb) / std::max(1.0, std::abs(fa)));
    const auto xi = project_horizontal(th, test::random_factor_tangent(th, rng));
    const Matrix ra = embed(retract_factor(th, xi)).matrix();
    const Matrix rb = embed(retract_factor(tho, act(xi, o))).matrix();
    worst_r = std::max(worst_r, (ra - rb).cwiseAbs().maxCoeff());
  }
  return {worst_f <= 1e-10 && worst_r <= 1e-9,
          fmt("objective %.2e", worst_f) + fmt(", iterates %.2e", worst_r)};
}

Verdict horizontal_projection() {
  Rng rng(1004);
  double idem = 0, resid = 0, orth = 0;
  for (int i = 0; i < 20; ++i) {
    const Index p = test::uniform_int(4, 10, rng);
    const Index k = test::uniform_int(1, std::min<int>(5, int(p) - 1), rng);
    const auto th = test::random_factor_point(p, k, rng);
    const auto xi = test::random_factor_tangent(th, rng);
    const auto h = project_horizontal(th, xi);
    idem = std::max(idem, (project_horizontal(th, h) - h).max_abs());
    resid = std::max(resid, horizontality_residual(th, h));
    for (int j = 0; j < 20; ++j) {
      const auto vert = vertical_vector(th, Matrix(test::random_skew(k, rng)));
      orth = std::max(orth, std::abs(metric_factor(th, h, vert)));
    }
  }
  return {idem <= 1e-10 && resid <= 1e-9 && orth <= 1e-9,
          fmt("idempotence %.2e", idem) + fmt(", horizontality %.2e", resid) +
              fmt(", vertical inner %.2e", orth)};
}

Verdict retraction_order() {
  Rng rng(1005);
  double min_slope = 1e300;
  for (int i = 0; i < 10; ++i) {
    const Index p = test::uniform_int(2, 8, rng);
    const Matrix s = test::random_spd(p, rng);
    const Matrix xi = test::random_sym(p, rng);
    std::vector<double> err;
    for (double t : {1e-1, 1e-2, 1e-3})
      err.push_back((retract_spd(SpdMatrix<double>(s), Matrix(t * xi)).matrix() -
                     test::spd_geodesic(s, xi, t))
                        .norm());
    // Overall slope across two decades, plus each single-decade slope.
    const double slope = (std::log10(err[0]) - std::log10(err[2])) / 2;
    min_slope = std::min({min_slope, slope, std::log10(err[0] / err[1]),
                          std::log10(err[1] / err[2])});
  }
  return {min_slope >= 2.7, fmt("min slope %.3f", min_slope)};
}

Verdict descent() {
  Rng rng(1006);
  bool ok = true;
  int total_iters = 0;
  CGConfig cfg;
  cfg.max_iter = 300;
  const auto monotone = [](const OptTrace& t) {
    for (std::size_t i = 1; i < t.records.size(); ++i)
      if (t.records[i].objective > t.records[i - 1].objective) return false;
    return true;
  };
  for (int i = 0; i < 20; ++i) {
    const Index p = test::uniform_int(4, 12, rng);
    const Data x = test::random_data(test::uniform_int(20, 80, rng), p, rng);
    const PenaltyConfig pen{i % 3 ? 0.05 : 0.0, 1e-12};
    if (i % 2 == 0) {
      const SpdManifold<double> m;
      const SpdObjective<double> f(x, generator_for(i / 2), pen);
      const auto r = minimize(m, f, init_full(x), cfg, [&](const SpdMatrix<double>& s) {
        ok = ok && m.satisfies_constraints(s);
      });
      ok = ok && monotone(r.trace);
      total_iters += r.trace.iterations();
    } else {
      const FactorManifold<double> m;
      const FactorObjective<double> f(x, generator_for(i / 2), pen);
      const Index k = test::uniform_int(1, 3, rng);
      const auto r = minimize(m, f, init_factor(x, k), cfg,
                              [&](const FactorPoint<double>& th) {
                                ok = ok && m.satisfies_constraints(th);
                              });
      ok = ok && monotone(r.trace);
      total_iters += r.trace.iterations();
    }
  }
  return {ok, std::to_string(total_iters) + " iterates checked"};
}

double mean_auc_of(const BenchReport& r, const std::string& label) {
  for (const auto& m : r.models)
    if (m.label == label) return m.mean_auc;
  return std::nan("");
}

// Regression floor for criterion 7, set from the first calibrated run.
constexpr double kEgmAucFloor = 0.70;

Verdict support_recovery() {
  const auto t0 = Clock::now();
  BenchConfig cfg;
  cfg.p = 50;
  cfg.n = 250;
  cfg.trials = 50;
  cfg.nu_data = 3.5;
  cfg.seed = 0;
  const std::vector<NamedModel> models = {
      preset_model(GraphKind::kErdosRenyi, ModelKind::kGGM),
      preset_model(GraphKind::kErdosRenyi, ModelKind::kEGM)};
  const BenchReport r = run_benchmark(GraphModel::of(GraphKind::kErdosRenyi), cfg, models);
  const double ggm = mean_auc_of(r, "ggm"), egm = mean_auc_of(r, "egm");
  const double secs = seconds_since(t0);
  int failures = 0;
  for (const auto& m : r.models) failures += m.failures;
  return {egm >= ggm - 0.01 && egm >= kEgmAucFloor && secs < 900,
          fmt("EGM %.4f", egm) + fmt(", GGM %.4f", ggm) +
              fmt(", failed trials %.0f", double(failures)) + fmt(", %.0f s", secs)};
}

Verdict gaussian_limit() {
  BenchConfig cfg;
  cfg.p = 50;
  cfg.n = 250;
  cfg.trials = 20;
  cfg.nu_data = std::nullopt;
  cfg.seed = 0;
  const std::vector<NamedModel> models = {
      preset_model(GraphKind::kErdosRenyi, ModelKind::kGGM),
      preset_model(GraphKind::kErdosRenyi, ModelKind::kEGM, 100.0)};
  const BenchReport r = run_benchmark(GraphModel::of(GraphKind::kErdosRenyi), cfg, models);
  const double ggm = mean_auc_of(r, "ggm"), egm = mean_auc_of(r, "egm");
  return {std::abs(ggm - egm) <= 0.02,
          fmt("GGM %.4f", ggm) + fmt(", EGM(nu=100) %.4f", egm) +
              fmt(", gap %.4f", std::abs(ggm - egm))};
}

// Wall time per CG iteration over a fixed iteration budget, best of three
// runs to damp scheduler noise.
template <typename M, typename F, typename P>
double seconds_per_iteration(const M& m, const F& f, const P& x0) {
  CGConfig cfg;
  cfg.max_iter = 15;
  cfg.grad_tol = 1e-300;
  double best = 1e300;
  for (int rep = 0; rep < 3; ++rep) {
    const auto t0 = Clock::now();
    const auto r = minimize(m, f, x0, cfg);
    best = std::min(best, seconds_since(t0) / std::max(1, r.trace.iterations()));
  }
  return best;
}

Verdict complexity_scaling() {
  Rng rng(1009);
  const Index k = 10, n = 250;
  std::vector<double> ggfm, unpenalized, ggm;
  for (Index p : {100, 200, 400}) {
    const Data x = test::random_data(n, p, rng);
    const FactorObjective<double> ff(x, DensityGenerator::gaussian(), {0.01, 1e-12});
    ggfm.push_back(seconds_per_iteration(FactorManifold<double>{}, ff, init_factor(x, k)));
    // λ = 0 drops the O(p²) penalty; reported to separate the two costs.
    const FactorObjective<double> f0(x, DensityGenerator::gaussian(), {0.0, 1e-12});
    unpenalized.push_back(
        seconds_per_iteration(FactorManifold<double>{}, f0, init_factor(x, k)));
    const SpdObjective<double> fs(x, DensityGenerator::gaussian(), {0.05, 1e-12});
    ggm.push_back(seconds_per_iteration(SpdManifold<double>{}, fs, init_full(x)));
  }
  const double ratio = ggfm[2] / ggfm[0];
  return {ratio <= 8,
          fmt("GGFM t(400)/t(100) %.2f", ratio) + fmt(" (%.2e s/iter at 400)", ggfm[2]) +
              fmt("; GGFM lambda=0 ratio %.2f", unpenalized[2] / unpenalized[0]) +
              fmt("; GGM ratio %.2f reported", ggm[2] / ggm[0])};
}

Verdict noiseless_round_trip() {
  Rng rng(1010);
  double worst = 1;
  for (GraphKind g : {GraphKind::kBarabasiAlbert, GraphKind::kErdosRenyi,
                      GraphKind::kWattsStrogatz, GraphKind::kRandomGeometric}) {
    for (int t = 0; t < 10; ++t) {
      const Matrix w = sample_graph(GraphModel::of(g), 50, rng);
      const Matrix c = conditional_correlation(graph_to_precision(w, 0.1).matrix());
      worst = std::min(worst, roc_auc(c, support_of(w)).auc);
    }
  }
  return {worst == 1.0, fmt("min AUC %.6f over 40 graphs", worst)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict determinism() {
  const fs::path root = fs::temp_directory_path() / "gfm_acceptance_determinism";
  fs::remove_all(root);
  std::vector<std::string> outs;
  for (const char* run : {"a", "b"}) {
    const std::string dir = (root / run).string();
    const std::vector<std::string> args = {"gfm",     "bench",  "--graph", "ba",
                                           "--p",     "30",     "--n",     "150",
                                           "--trials", "3",     "--seed",  "7",
                                           "--output", dir};
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    if (cli::run(int(argv.size()), argv.data(), out, err) != 0)
      return {false, "bench exited non-zero: " + err.str()};
    outs.push_back(slurp(root / run / "auc.csv") + slurp(root / run / "roc.csv"));
  }
  fs::remove_all(root);
  return {!outs[0].empty() && outs[0] == outs[1],
          std::to_string(outs[0].size()) + " bytes compared"};
}

}  // namespace
}  // namespace gfm

// Optional arguments select criteria by number, e.g. `acceptance 7 9`.
int main(int argc, char** argv) {
  using gfm::Verdict;
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"gradient correctness", gfm::gradient_correctness},
      {"stationarity at the sample covariance", gfm::stationarity},
      {"quotient invariance", gfm::quotient_invariance},
      {"horizontal projection", gfm::horizontal_projection},
      {"retraction order", gfm::retraction_order},
      {"descent and iterate invariants", gfm::descent},
      {"support recovery, heavy-tailed ER", gfm::support_recovery},
      {"Gaussian-limit consistency", gfm::gaussian_limit},
      {"complexity scaling", gfm::complexity_scaling},
      {"noiseless support round trip", gfm::noiseless_round_trip},
      {"bench determinism", gfm::determinism},
  };
  int failed = 0;
  std::vector<bool> selected(criteria.size(), argc == 1);
  for (int a = 1; a < argc; ++a) {
    const std::size_t n = std::strtoul(argv[a], nullptr, 10);
    if (n >= 1 && n <= criteria.size()) selected[n - 1] = true;
  }
  std::size_t ran = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected[i]) continue;
    ++ran;
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += v.pass ? 0 : 1;
    std::printf("%s criterion %zu: %s (%s)\n", v.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, ran);
  return failed == 0 ? 0 : 1;
}
