#include <omp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lbandit/error.hpp"
#include "lbandit/experiment.hpp"
#include "lbandit/svg_plot.hpp"

namespace fs = std::filesystem;
using namespace lbandit;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitPartialSweep = 3;

// "a:b,c:d" -> pairs
std::vector<std::pair<double, double>> parse_pairs(const std::string& text, const char* what) {
  std::vector<std::pair<double, double>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw invalid_input_error(std::string(what) + ": expected a:b, got '" + item + "'");
    try {
      out.emplace_back(std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1)));
    } catch (const std::exception&) {
      throw invalid_input_error(std::string(what) + ": bad number in '" + item + "'");
    }
  }
  if (out.empty()) throw invalid_input_error(std::string(what) + " is empty");
  return out;
}

struct CommonArgs {
  std::string env = "env1";
  std::string shapes;
  std::string algorithm = "pbvi";
  std::string bound = "clipping";
  std::string hyperprior = "uninformative";
  std::vector<double> hyper_mean;
  std::vector<double> hyper_std;
  long long k_iters = -1;
  int threads = 0;
  bool allow_invalid_lambda2 = false;
  bool union_bound_delta = false;
  bool raw = false;
  std::string out_dir = "out";
  std::string config_path;
  ExperimentConfig cfg;
};

// CLI11 only reads config files on the top-level app, so subcommands load
// theirs here. Keys name long options; anything given on the command line wins.
void apply_config_file(CLI::App& app, const std::string& path) {
  std::ifstream in(path);
  for (const CLI::ConfigItem& item : CLI::ConfigINI().from_config(in)) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    if (!item.parents.empty()) throw invalid_input_error(path + ": sections are not supported");
    CLI::Option* opt = app.get_option_no_throw("--" + item.name);
    if (opt == nullptr || item.name == "config") {
      throw invalid_input_error(path + ": unknown key '" + item.name + "'");
    }
    if (opt->count() > 0) continue;
    opt->add_result(item.inputs);
    opt->run_callback();
  }
}

void add_common(CLI::App& app, CommonArgs& a) {
  ExperimentConfig& c = a.cfg;
  app.add_option("--config", a.config_path, "Flat key = value file (# comments); flags override it")
      ->check(CLI::ExistingFile);
  app.add_option("--env", a.env, "Environment: env1, env2 or env3")->capture_default_str();
  app.add_option("--shapes", a.shapes, "Custom environment as alpha:beta,alpha:beta,...");
  app.add_option("--algorithm", a.algorithm, "lfs, arr, pbvi or pbmcmc")->capture_default_str();
  app.add_option("--bound", a.bound, "bernstein or clipping")->capture_default_str();
  app.add_option("--t1", c.bound.t1, "Temperature T1 (lambda1 = T1 sqrt(n))")->capture_default_str();
  app.add_option("--t2", c.bound.t2, "Temperature T2 (lambda2 = T2 sqrt(m))")->capture_default_str();
  app.add_option("--epsilon", c.bound.epsilon, "Exploration floor for Bernstein")->capture_default_str();
  app.add_option("--tau", c.bound.tau, "Clip level for the clipping bound")->capture_default_str();
  app.add_option("--delta", c.bound.delta, "Confidence parameter")->capture_default_str();
  app.add_option("--c-n", c.bound.c_n, "Transfer constant c_n")->capture_default_str();
  app.add_option("-n,--tasks", c.n, "Tasks per lifelong run")->capture_default_str();
  app.add_option("-m,--steps", c.m, "Steps per task")->capture_default_str();
  app.add_option("--k-iters", a.k_iters, "Optimizer iterations per task (default: learner's own)");
  app.add_option("--lr", c.adam.learning_rate, "Adam learning rate (pbvi)")->capture_default_str();
  app.add_option("--psgld-step", c.psgld.step_size, "pSGLD step size (pbmcmc)")->capture_default_str();
  app.add_option("--psgld-decay", c.psgld.precond_decay, "pSGLD preconditioner decay")->capture_default_str();
  app.add_option("--psgld-eps", c.psgld.precond_eps, "pSGLD preconditioner epsilon")->capture_default_str();
  app.add_option("--vi-bound-samples", c.vi_bound_samples, "Monte Carlo draws for the VI bound")->capture_default_str();
  app.add_option("--mcmc-bound-samples", c.mcmc_bound_samples, "Hyperprior draws for the MCMC bound")
      ->capture_default_str();
  app.add_option("--inner-runs", c.inner_runs, "Independent runs averaged per repeat (A)")->capture_default_str();
  app.add_option("--repeats", c.repeats, "Repeats (R)")->capture_default_str();
  app.add_option("--seed", c.seed, "Base seed")->capture_default_str();
  app.add_option("--hyperprior", a.hyperprior, "uninformative, informative-env3 or explicit")->capture_default_str();
  app.add_option("--hyperprior-mean", a.hyper_mean, "Explicit hyperprior mean (comma separated)")->delimiter(',');
  app.add_option("--hyperprior-std", a.hyper_std, "Explicit hyperprior std (comma separated)")->delimiter(',');
  app.add_option("--threads", a.threads, "Worker threads (0 = OpenMP default)");
  app.add_option("--out-dir", a.out_dir, "Output directory")->capture_default_str();
  app.add_flag("--raw", a.raw, "Also write per-run records");
  app.add_flag("--union-bound-delta", a.union_bound_delta, "Use delta / N for an N-cell grid");
  app.add_flag("--allow-invalid-lambda2", a.allow_invalid_lambda2,
               "Evaluate Bernstein configurations violating lambda2 <= m epsilon / K (result is not a valid bound)");
}

ExperimentConfig finish_config(CommonArgs& a) {
  ExperimentConfig c = a.cfg;
  c.environment = a.env;
  if (!a.shapes.empty()) {
    for (auto [al, be] : parse_pairs(a.shapes, "--shapes")) c.custom_shapes.push_back(BetaShape{al, be});
  }
  c.algorithm = parse_algorithm(a.algorithm);
  c.bound.kind = parse_bound_kind(a.bound);
  c.bound.enforce_lambda2_constraint = !a.allow_invalid_lambda2;
  if (a.k_iters >= 0) c.k_iters = static_cast<std::size_t>(a.k_iters);
  if (a.hyperprior == "uninformative") {
    c.hyperprior.kind = HyperpriorSpec::Kind::uninformative;
  } else if (a.hyperprior == "informative-env3" || a.hyperprior == "informative") {
    c.hyperprior.kind = HyperpriorSpec::Kind::informative_env3;
  } else if (a.hyperprior == "explicit") {
    c.hyperprior.kind = HyperpriorSpec::Kind::explicit_values;
    c.hyperprior.mean = a.hyper_mean;
    c.hyperprior.std_dev = a.hyper_std;
  } else {
    throw invalid_input_error("unknown hyperprior '" + a.hyperprior + "'");
  }
  if (a.threads > 0) omp_set_num_threads(a.threads);
  return c;
}

void warn_lambda2(const ExperimentConfig& c) {
  const BoundConfig b = c.effective_bound();
  if (b.kind == BoundKind::bernstein && !b.lambda2_constraint_holds()) {
    std::fprintf(stderr,
                 "warning: lambda2 = %g exceeds m * epsilon / K = %g; reported Bernstein values are not valid bounds\n",
                 b.lambda2(), static_cast<double>(b.m) * b.epsilon / static_cast<double>(b.num_actions));
  }
}

int do_run(CommonArgs& a, std::size_t grid_size) {
  ExperimentConfig c = finish_config(a);
  if (a.union_bound_delta) c.union_bound_cells = grid_size;
  c.validate();
  warn_lambda2(c);
  const ExperimentResult r = run_experiment(c);
  const fs::path out(a.out_dir);
  write_text_file(out / "results.csv", format_csv(r.rows));
  if (a.raw) write_text_file(out / "raw.csv", format_raw_csv(r.runs));
  const AggregateRow& last = r.rows.back();
  std::printf("%s: task %zu mean_avg_reward=%.4f (std %.4f) mean_bound=%.4f -> %s\n",
              std::string(to_string(c.algorithm)).c_str(), last.task_index, last.mean_avg_reward,
              last.std_avg_reward, last.mean_bound, (out / "results.csv").string().c_str());
  return 0;
}

int do_sweep(CommonArgs& a, const std::string& temps, const std::vector<double>& eps, const std::vector<double>& taus) {
  ExperimentConfig base = finish_config(a);
  SweepGrid grid;
  for (auto [t1, t2] : parse_pairs(temps, "--temperatures")) grid.temperatures.push_back({t1, t2});
  grid.epsilons = eps;
  grid.taus = taus;
  const std::vector<SweepCell> cells = expand_sweep(base, grid, a.union_bound_delta);
  for (const SweepCell& cell : cells) {
    try {
      cell.config.validate();
      warn_lambda2(cell.config);
    } catch (const std::exception&) {
      // Reported per cell by run_sweep.
    }
  }
  const fs::path out(a.out_dir);
  const std::vector<SweepCellResult> results = run_sweep(cells, out);
  write_text_file(out / "summary.csv", format_summary_csv(results));
  std::size_t failed = 0;
  for (const SweepCellResult& r : results) {
    if (r.ok) {
      std::printf("%-48s reward=%.4f bound=%.4f\n", r.cell.name.c_str(), r.final_row->mean_avg_reward,
                  r.final_row->mean_bound);
    } else {
      ++failed;
      std::printf("%-48s FAILED: %s\n", r.cell.name.c_str(), r.error.c_str());
    }
  }
  std::printf("%zu/%zu cells ok; summary -> %s\n", results.size() - failed, results.size(),
              (out / "summary.csv").string().c_str());
  return failed == 0 ? 0 : kExitPartialSweep;
}

int do_plot(const std::vector<std::string>& csvs, std::vector<std::string> labels, const std::string& out_dir) {
  if (!labels.empty() && labels.size() != csvs.size()) {
    throw invalid_input_error("--labels needs one entry per csv");
  }
  std::vector<PlotSeries> series;
  for (std::size_t i = 0; i < csvs.size(); ++i) {
    PlotSeries s;
    s.label = labels.empty() ? fs::path(csvs[i]).stem().string() : labels[i];
    try {
      s.rows = parse_csv(read_text_file(csvs[i]));
    } catch (const invalid_input_error& e) {
      throw invalid_input_error(csvs[i] + ": " + e.what());
    }
    series.push_back(std::move(s));
  }
  for (PlotMetric m : {PlotMetric::avg_reward, PlotMetric::bound}) {
    const fs::path p = fs::path(out_dir) / (std::string(metric_name(m)) + ".svg");
    write_text_file(p, render_svg(series, m));
    std::printf("wrote %s\n", p.string().c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lifelong PAC-Bayes bandit experiments"};
  app.require_subcommand(1);

  CommonArgs run_args;
  std::size_t grid_size = 1;
  CLI::App* run = app.add_subcommand("run", "Run one configuration and write results.csv");
  add_common(*run, run_args);
  run->add_option("--grid-size", grid_size, "N for --union-bound-delta")->capture_default_str();

  CommonArgs sweep_args;
  std::string temps = "5:1,15:3,50:10";
  std::vector<double> eps{0.05, 0.1, 0.2};
  std::vector<double> taus{0.1, 0.2, 0.5};
  CLI::App* sweep = app.add_subcommand("sweep", "Run a temperature grid and write summary.csv");
  add_common(*sweep, sweep_args);
  sweep->add_option("--temperatures", temps, "T1:T2 pairs")->capture_default_str();
  sweep->add_option("--epsilons", eps, "Epsilon grid (Bernstein)")->delimiter(',');
  sweep->add_option("--taus", taus, "Tau grid (clipping)")->delimiter(',');

  std::vector<std::string> csvs;
  std::vector<std::string> labels;
  std::string plot_out = "out";
  CLI::App* plot = app.add_subcommand("plot", "Render avg_reward.svg and bound.svg from result CSVs");
  plot->add_option("csv", csvs, "Result CSVs")->required()->check(CLI::ExistingFile);
  plot->add_option("--labels", labels, "Legend labels (comma separated)")->delimiter(',');
  plot->add_option("--out-dir", plot_out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run && !run_args.config_path.empty()) apply_config_file(*run, run_args.config_path);
    if (*sweep && !sweep_args.config_path.empty()) apply_config_file(*sweep, sweep_args.config_path);
  } catch (const CLI::Error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const invalid_input_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  }

  try {
    if (*run) return do_run(run_args, grid_size);
    if (*sweep) return do_sweep(sweep_args, temps, eps, taus);
    return do_plot(csvs, labels, plot_out);
  } catch (const invalid_input_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const constraint_violation_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
}
