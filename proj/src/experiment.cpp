#include "lbandit/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lbandit/baselines.hpp"
#include "lbandit/error.hpp"

namespace lbandit {

Algorithm parse_algorithm(std::string_view s) {
  if (s == "lfs") return Algorithm::lfs;
  if (s == "arr") return Algorithm::arr;
  if (s == "pbvi" || s == "vi") return Algorithm::pbvi;
  if (s == "pbmcmc" || s == "mcmc") return Algorithm::pbmcmc;
  throw invalid_input_error("unknown algorithm '" + std::string(s) + "' (expected lfs, arr, pbvi or pbmcmc)");
}

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::lfs: return "lfs";
    case Algorithm::arr: return "arr";
    case Algorithm::pbvi: return "pbvi";
    case Algorithm::pbmcmc: return "pbmcmc";
  }
  return "?";
}

GaussianDiag HyperpriorSpec::resolve(std::size_t num_actions) const {
  switch (kind) {
    case Kind::uninformative:
      return GaussianDiag::standard(num_actions);
    case Kind::informative_env3: {
      GaussianDiag g = GaussianDiag::standard(num_actions);
      g.mean.back() = 2.0;
      return g;
    }
    case Kind::explicit_values:
      break;
  }
  if (mean.size() != num_actions || std_dev.size() != num_actions) {
    throw invalid_input_error("explicit hyperprior needs " + std::to_string(num_actions) +
                              " mean and std entries");
  }
  for (double s : std_dev) {
    if (!(s > 0.0) || !std::isfinite(s)) throw invalid_input_error("hyperprior std entries must be positive");
  }
  GaussianDiag g = GaussianDiag::from_std(mean, std_dev);
  g.validate();
  return g;
}

BetaBernoulliEnv ExperimentConfig::make_environment() const {
  if (!custom_shapes.empty()) return BetaBernoulliEnv(custom_shapes);
  return builtin_environment(environment);
}

BoundConfig ExperimentConfig::effective_bound() const {
  BoundConfig b = bound;
  b.delta = bound.delta / static_cast<double>(union_bound_cells);
  b.n = n;
  b.m = m;
  b.num_actions = make_environment().num_actions();
  return b;
}

void ExperimentConfig::validate() const {
  if (n == 0) throw invalid_input_error("n must be at least 1");
  if (m == 0) throw invalid_input_error("m must be at least 1");
  if (repeats == 0) throw invalid_input_error("repeats must be at least 1");
  if (inner_runs == 0) throw invalid_input_error("inner_runs must be at least 1");
  if (union_bound_cells == 0) throw invalid_input_error("union-bound cell count must be at least 1");
  if (vi_bound_samples == 0 || mcmc_bound_samples == 0) throw invalid_input_error("bound sample counts must be at least 1");
  if (!(adam.learning_rate > 0.0)) throw invalid_input_error("adam learning rate must be positive");
  if (!(psgld.step_size > 0.0)) throw invalid_input_error("psgld step size must be positive");
  const BetaBernoulliEnv env = make_environment();
  if (algorithm == Algorithm::pbvi || algorithm == Algorithm::pbmcmc) {
    (void)hyperprior.resolve(env.num_actions());
    effective_bound().validate();
  } else {
    // Baselines only use the behaviour rule.
    BoundConfig b = effective_bound();
    b.enforce_lambda2_constraint = false;
    b.validate();
  }
}

std::vector<RunRecord> run_single(const ExperimentConfig& cfg, RandomStream& rng) {
  const BetaBernoulliEnv env = cfg.make_environment();
  const BoundConfig bound = cfg.effective_bound();
  switch (cfg.algorithm) {
    case Algorithm::lfs:
      return lfs_run(env, bound, cfg.n, cfg.m, rng);
    case Algorithm::arr:
      return arr_run(env, bound, cfg.n, cfg.m, rng);
    case Algorithm::pbvi: {
      ViSettings s;
      if (cfg.k_iters) s.k_iters = *cfg.k_iters;
      s.adam = cfg.adam;
      s.bound_samples = cfg.vi_bound_samples;
      return vi_lifelong_run(env, cfg.hyperprior.resolve(env.num_actions()), bound, cfg.n, cfg.m, s, rng);
    }
    case Algorithm::pbmcmc: {
      McmcSettings s;
      if (cfg.k_iters) s.k_iters = *cfg.k_iters;
      s.psgld = cfg.psgld;
      s.bound_samples = cfg.mcmc_bound_samples;
      return mcmc_lifelong_run(env, cfg.hyperprior.resolve(env.num_actions()), bound, cfg.n, cfg.m, s, rng);
    }
  }
  throw invalid_input_error("unknown algorithm");
}

std::vector<AggregateRow> aggregate(std::span<const RawRun> runs, std::size_t repeats, std::size_t inner_runs) {
  if (runs.size() != repeats * inner_runs || runs.empty()) {
    throw invalid_input_error("aggregate: expected repeats * inner_runs runs");
  }
  const std::size_t n = runs.front().records.size();
  for (const RawRun& r : runs) {
    if (r.records.size() != n) throw invalid_input_error("aggregate: runs differ in task count");
  }
  const double inv_a = 1.0 / static_cast<double>(inner_runs);
  const double inv_r = 1.0 / static_cast<double>(repeats);
  const double inv_all = 1.0 / static_cast<double>(runs.size());
  std::vector<AggregateRow> rows(n);
  std::vector<double> rep_reward(repeats);
  std::vector<double> rep_bound(repeats);
  for (std::size_t i = 0; i < n; ++i) {
    AggregateRow& row = rows[i];
    row.task_index = runs.front().records[i].task_index;
    for (std::size_t r = 0; r < repeats; ++r) {
      double reward = 0.0;
      double bound = 0.0;
      for (std::size_t a = 0; a < inner_runs; ++a) {
        const RunRecord& rec = runs[r * inner_runs + a].records[i];
        reward += rec.avg_reward;
        bound += rec.bound_value;
        row.mean_kl_hyper += rec.kl_hyper;
        row.mean_task_kl_sum += rec.expected_task_kl_sum;
      }
      rep_reward[r] = reward * inv_a;
      rep_bound[r] = bound * inv_a;
      row.mean_avg_reward += rep_reward[r];
      row.mean_bound += rep_bound[r];
    }
    row.mean_avg_reward *= inv_r;
    row.mean_bound *= inv_r;
    row.mean_kl_hyper *= inv_all;
    row.mean_task_kl_sum *= inv_all;
    double var_reward = 0.0;
    double var_bound = 0.0;
    for (std::size_t r = 0; r < repeats; ++r) {
      var_reward += (rep_reward[r] - row.mean_avg_reward) * (rep_reward[r] - row.mean_avg_reward);
      var_bound += (rep_bound[r] - row.mean_bound) * (rep_bound[r] - row.mean_bound);
    }
    row.std_avg_reward = std::sqrt(var_reward * inv_r);
    row.std_bound = std::sqrt(var_bound * inv_r);
  }
  return rows;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t total = cfg.repeats * cfg.inner_runs;
  ExperimentResult result;
  result.runs.resize(total);
  std::vector<std::string> errors(total);

#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t idx = 0; idx < static_cast<std::ptrdiff_t>(total); ++idx) {
    const auto u = static_cast<std::size_t>(idx);
    RawRun& run = result.runs[u];
    run.repeat = u / cfg.inner_runs;
    run.inner_run = u % cfg.inner_runs;
    try {
      RandomStream rng(derive_seed(cfg.seed, {run.repeat, run.inner_run}));
      run.records = run_single(cfg, rng);
    } catch (const std::exception& e) {
      errors[u] = e.what();
    }
  }
  for (std::size_t u = 0; u < total; ++u) {
    if (!errors[u].empty()) {
      throw numerical_error("run (repeat " + std::to_string(result.runs[u].repeat) + ", inner " +
                            std::to_string(result.runs[u].inner_run) + ") failed: " + errors[u]);
    }
  }
  result.rows = aggregate(result.runs, cfg.repeats, cfg.inner_runs);
  return result;
}

namespace {

void append_number(std::string& out, double x) {
  if (std::isnan(x)) {
    out += "nan";
    return;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  out += buf;
}

double parse_number(const std::string& field, std::size_t line) {
  if (field == "nan") return std::nan("");
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw invalid_input_error("csv line " + std::to_string(line) + ": bad number '" + field + "'");
  }
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string format_csv(std::span<const AggregateRow> rows) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const AggregateRow& r : rows) {
    out += std::to_string(r.task_index);
    for (double v : {r.mean_avg_reward, r.std_avg_reward, r.mean_bound, r.std_bound, r.mean_kl_hyper,
                     r.mean_task_kl_sum}) {
      out += ',';
      append_number(out, v);
    }
    out += '\n';
  }
  return out;
}

std::string format_raw_csv(std::span<const RawRun> runs) {
  std::string out(kRawCsvHeader);
  out += '\n';
  for (const RawRun& run : runs) {
    for (const RunRecord& rec : run.records) {
      out += std::to_string(run.repeat) + ',' + std::to_string(run.inner_run) + ',' +
             std::to_string(rec.task_index) + ',';
      append_number(out, rec.avg_reward);
      out += ',' + std::to_string(rec.reward_total) + ',';
      append_number(out, rec.bound_value);
      out += ',';
      append_number(out, rec.kl_hyper);
      out += ',';
      append_number(out, rec.expected_task_kl_sum);
      out += '\n';
    }
  }
  return out;
}

std::vector<AggregateRow> parse_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw invalid_input_error("csv is empty");
  const std::vector<std::string> got = split_fields(line);
  const std::vector<std::string> want = split_fields(std::string(kCsvHeader));
  for (std::size_t c = 0; c < std::max(got.size(), want.size()); ++c) {
    const std::string g = c < got.size() ? got[c] : "<missing>";
    const std::string w = c < want.size() ? want[c] : "<none>";
    if (g != w) {
      throw invalid_input_error("csv column " + std::to_string(c + 1) + ": expected '" + w + "', found '" + g + "'");
    }
  }
  std::vector<AggregateRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::vector<std::string> f = split_fields(line);
    if (f.size() != want.size()) {
      throw invalid_input_error("csv line " + std::to_string(lineno) + ": expected " +
                                std::to_string(want.size()) + " fields");
    }
    AggregateRow r;
    r.task_index = static_cast<std::size_t>(parse_number(f[0], lineno));
    r.mean_avg_reward = parse_number(f[1], lineno);
    r.std_avg_reward = parse_number(f[2], lineno);
    r.mean_bound = parse_number(f[3], lineno);
    r.std_bound = parse_number(f[4], lineno);
    r.mean_kl_hyper = parse_number(f[5], lineno);
    r.mean_task_kl_sum = parse_number(f[6], lineno);
    rows.push_back(r);
  }
  return rows;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw invalid_input_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<SweepCell> expand_sweep(const ExperimentConfig& base, const SweepGrid& grid,
                                    bool union_bound_delta) {
  if (grid.temperatures.empty()) throw invalid_input_error("sweep grid has no temperatures");
  const bool bernstein = base.bound.kind == BoundKind::bernstein;
  const std::vector<double> second = bernstein ? grid.epsilons : grid.taus;
  const std::vector<double> values = second.empty() ? std::vector<double>{bernstein ? base.bound.epsilon : base.bound.tau}
                                                    : second;
  std::vector<SweepCell> cells;
  for (const TemperaturePair& t : grid.temperatures) {
    for (double v : values) {
      SweepCell c;
      c.config = base;
      c.config.bound.t1 = t.t1;
      c.config.bound.t2 = t.t2;
      (bernstein ? c.config.bound.epsilon : c.config.bound.tau) = v;
      char buf[128];
      std::snprintf(buf, sizeof buf, "%s_%s_T1-%g_T2-%g_%s-%g", std::string(to_string(base.algorithm)).c_str(),
                    std::string(to_string(base.bound.kind)).c_str(), t.t1, t.t2, bernstein ? "eps" : "tau", v);
      c.name = buf;
      cells.push_back(std::move(c));
    }
  }
  if (union_bound_delta) {
    for (SweepCell& c : cells) c.config.union_bound_cells = cells.size();
  }
  return cells;
}

std::vector<SweepCellResult> run_sweep(std::span<const SweepCell> cells, const std::filesystem::path& out_dir) {
  std::vector<SweepCellResult> results;
  for (const SweepCell& cell : cells) {
    SweepCellResult res;
    res.cell = cell;
    try {
      const ExperimentResult r = run_experiment(cell.config);
      write_text_file(out_dir / (cell.name + ".csv"), format_csv(r.rows));
      res.final_row = r.rows.back();
      res.ok = true;
    } catch (const std::exception& e) {
      res.error = e.what();
    }
    results.push_back(std::move(res));
  }
  return results;
}

std::string format_summary_csv(std::span<const SweepCellResult> results) {
  std::string out = "cell,t1,t2,epsilon,tau,delta,status,final_mean_avg_reward,final_mean_bound,error\n";
  for (const SweepCellResult& r : results) {
    const BoundConfig b = r.cell.config.bound;
    out += r.cell.name + ',';
    for (double v : {b.t1, b.t2, b.epsilon, b.tau, b.delta / static_cast<double>(r.cell.config.union_bound_cells)}) {
      append_number(out, v);
      out += ',';
    }
    out += r.ok ? "ok," : "failed,";
    append_number(out, r.final_row ? r.final_row->mean_avg_reward : std::nan(""));
    out += ',';
    append_number(out, r.final_row ? r.final_row->mean_bound : std::nan(""));
    out += ',';
    std::string msg = r.error;
    for (char& ch : msg) {
      if (ch == ',' || ch == '\n') ch = ';';
    }
    out += msg + '\n';
  }
  return out;
}

}  // namespace lbandit
