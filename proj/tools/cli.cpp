#include "cli.hpp"

#include <filesystem>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gfm/bench.hpp"
#include "gfm/io.hpp"
#include "gfm/pipeline.hpp"

namespace gfm::cli {

namespace {

struct ModelFlags {
  std::string models;
  int rank = 10;
  double lambda = 0.05;
  double nu = 5.0;
  double epsilon = 1e-12;
  double tol = 1e-2;
  int max_iter = 1000;
  double grad_tol = 1e-6;

  CLI::Option* rank_opt = nullptr;
  CLI::Option* lambda_opt = nullptr;
  CLI::Option* nu_opt = nullptr;
};

struct BenchFlags {
  std::string graph = "er";
  Index p = 50;
  Index n = 250;
  int trials = 50;
  double kappa = 0.1;
  double data_nu = 3.5;
  std::uint64_t seed = 0;
};

void add_model_flags(CLI::App& app, ModelFlags& f, bool single_model) {
  if (single_model) {
    f.models = "ggm";
    app.add_option("--model", f.models, "ggm | ggfm | egm | egfm")
        ->capture_default_str();
    f.rank_opt = app.add_option("--rank", f.rank, "Rank k (factor models only)")
                     ->capture_default_str();
    f.lambda_opt = app.add_option("--lambda", f.lambda, "Penalty weight")
                       ->capture_default_str();
  } else {
    f.models = "ggm,ggfm,egm,egfm";
    app.add_option("--model", f.models, "Comma list of ggm | ggfm | egm | egfm")
        ->capture_default_str();
    f.rank_opt = app.add_option("--rank", f.rank,
                                "Rank k for factor models [default: graph preset]");
    f.lambda_opt = app.add_option("--lambda", f.lambda,
                                  "Penalty weight [default: graph preset]");
  }
  f.nu_opt = app.add_option("--nu", f.nu,
                            "Student-t degrees of freedom (elliptical models only)")
                 ->capture_default_str();
  app.add_option("--epsilon", f.epsilon, "Log-cosh smoothing")->capture_default_str();
  app.add_option("--tol", f.tol, "Edge threshold on |conditional correlation|")
      ->capture_default_str();
  app.add_option("--max-iter", f.max_iter, "Solver iteration cap")->capture_default_str();
  app.add_option("--grad-tol", f.grad_tol, "Solver gradient-norm tolerance")
      ->capture_default_str();
}

void add_bench_flags(CLI::App& app, BenchFlags& b) {
  app.add_option("--graph", b.graph, "ba | er | ws | rgg")->capture_default_str();
  app.add_option("--p", b.p, "Number of variables")->capture_default_str();
  app.add_option("--n", b.n, "Samples per trial")->capture_default_str();
  app.add_option("--trials", b.trials, "Monte-Carlo trials")->capture_default_str();
  app.add_option("--kappa", b.kappa, "Precision ridge in L + kappa*I")
      ->capture_default_str();
  app.add_option("--data-nu", b.data_nu,
                 "Student-t nu of the generated data; 0 for Gaussian data")
      ->capture_default_str();
  app.add_option("--seed", b.seed, "Master seed")->capture_default_str();
}

std::vector<ModelKind> parse_model_list(const std::string& list) {
  std::vector<ModelKind> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_model_kind(item));
  }
  if (out.empty()) throw Error(ErrorCode::kUsage, "--model list is empty");
  return out;
}

void check_consistency(const ModelFlags& f, const std::vector<ModelKind>& kinds) {
  bool any_factor = false, any_elliptical = false;
  for (ModelKind k : kinds) {
    any_factor |= is_factor_model(k);
    any_elliptical |= is_elliptical_model(k);
  }
  if (f.rank_opt->count() > 0 && !any_factor) {
    throw Error(ErrorCode::kUsage, "--rank applies only to factor models (ggfm, egfm)");
  }
  if (f.nu_opt->count() > 0 && !any_elliptical) {
    throw Error(ErrorCode::kUsage, "--nu applies only to elliptical models (egm, egfm)");
  }
}

void apply_solver_flags(const ModelFlags& f, ModelConfig& cfg) {
  cfg.penalty.epsilon = f.epsilon;
  cfg.tol = f.tol;
  cfg.solver.max_iter = f.max_iter;
  cfg.solver.grad_tol = f.grad_tol;
}

std::vector<NamedModel> bench_models(const ModelFlags& f, GraphKind graph) {
  const auto kinds = parse_model_list(f.models);
  check_consistency(f, kinds);
  std::vector<NamedModel> out;
  for (ModelKind k : kinds) {
    NamedModel nm = preset_model(graph, k, f.nu);
    if (f.lambda_opt->count() > 0) nm.config.penalty.lambda = f.lambda;
    if (f.rank_opt->count() > 0 && is_factor_model(k)) nm.config.rank = f.rank;
    apply_solver_flags(f, nm.config);
    out.push_back(std::move(nm));
  }
  return out;
}

BenchConfig bench_config(const BenchFlags& b) {
  BenchConfig c;
  c.p = b.p;
  c.n = b.n;
  c.trials = b.trials;
  c.kappa = b.kappa;
  c.seed = b.seed;
  if (b.data_nu == 0) {
    c.nu_data.reset();
  } else {
    c.nu_data = b.data_nu;
  }
  return c;
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string());
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse graph learning with elliptical and factor graphical models"};
  app.require_subcommand(1);

  ModelFlags learn_model;
  std::string input, learn_output, format = "json";
  CLI::App* learn = app.add_subcommand("learn", "Learn a graph from a CSV file");
  learn->add_option("--input", input, "CSV with a header row of variable names")
      ->required();
  learn->add_option("--output", learn_output, "Graph output file")->required();
  learn->add_option("--format", format, "json | graphml | dot")->capture_default_str();
  add_model_flags(*learn, learn_model, true);

  ModelFlags bench_model;
  BenchFlags bench_flags;
  std::string bench_output;
  CLI::App* bench = app.add_subcommand(
      "bench", "Monte-Carlo ROC benchmark; writes auc.csv and roc.csv");
  bench->add_option("--output", bench_output, "Output directory")->required();
  add_model_flags(*bench, bench_model, false);
  add_bench_flags(*bench, bench_flags);

  ModelFlags sens_model;
  BenchFlags sens_flags;
  std::string sens_output;
  std::vector<double> sweep_lambda;
  std::vector<int> sweep_rank;
  CLI::App* sens = app.add_subcommand(
      "sensitivity", "Mean AUC over a lambda or rank sweep; writes sensitivity.csv");
  sens->add_option("--output", sens_output, "Output directory")->required();
  add_model_flags(*sens, sens_model, false);
  add_bench_flags(*sens, sens_flags);
  auto* sl = sens->add_option("--sweep-lambda", sweep_lambda, "Comma list of lambdas")
                 ->delimiter(',');
  auto* sr = sens->add_option("--sweep-rank", sweep_rank, "Comma list of ranks")
                 ->delimiter(',');
  sl->excludes(sr);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*learn) {
      const ModelKind kind = parse_model_kind(learn_model.models);
      check_consistency(learn_model, {kind});
      const GraphFormat fmt = parse_graph_format(format);
      ModelConfig cfg = ModelConfig::make(kind, learn_model.lambda,
                                          learn_model.rank, learn_model.nu);
      apply_solver_flags(learn_model, cfg);
      const Data x = ingest_csv(input, err);
      const LearnResult r = gfm::learn(x, cfg);
      export_graph(r, x.names(), cfg, fmt, learn_output);
      out << "p=" << x.p() << " n=" << x.n() << " model=" << to_string(kind)
          << " edges=" << r.edge_count() << " iterations=" << r.trace.iterations()
          << " objective=" << r.trace.last().objective
          << " status=" << to_string(r.trace.status) << "\n";
    } else if (*bench) {
      const GraphKind graph = parse_graph_kind(bench_flags.graph);
      const auto models = bench_models(bench_model, graph);
      const BenchReport report =
          run_benchmark(GraphModel::of(graph), bench_config(bench_flags), models);
      const std::filesystem::path dir(bench_output);
      ensure_directory(dir);
      write_text(dir / "auc.csv", render_auc_csv(report));
      write_text(dir / "roc.csv", render_curve_csv(report));
      for (const auto& m : report.models) {
        out << m.label << ": mean_auc=" << m.mean_auc << " stderr=" << m.stderr_auc
            << " failures=" << m.failures << "\n";
      }
    } else if (*sens) {
      if (sweep_lambda.empty() && sweep_rank.empty()) {
        throw Error(ErrorCode::kUsage, "give --sweep-lambda or --sweep-rank");
      }
      const GraphKind graph = parse_graph_kind(sens_flags.graph);
      const auto models = bench_models(sens_model, graph);
      const auto rows = run_sensitivity(GraphModel::of(graph),
                                        bench_config(sens_flags), models,
                                        sweep_lambda, sweep_rank);
      const std::filesystem::path dir(sens_output);
      ensure_directory(dir);
      write_text(dir / "sensitivity.csv", render_sensitivity_csv(rows));
      for (const auto& r : rows) {
        out << r.label << " lambda=" << r.lambda << " rank=" << r.rank
            << ": mean_auc=" << r.mean_auc << " failures=" << r.failures << "\n";
      }
    }
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return e.code() == ErrorCode::kUsage ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: Internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace gfm::cli
