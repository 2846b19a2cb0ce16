#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lbandit/bounds.hpp"
#include "lbandit/core_math.hpp"
#include "lbandit/environments.hpp"
#include "lbandit/mcmc_learner.hpp"
#include "lbandit/run_record.hpp"
#include "lbandit/vi_learner.hpp"

namespace lbandit {

enum class Algorithm { lfs, arr, pbvi, pbmcmc };

Algorithm parse_algorithm(std::string_view s);
std::string_view to_string(Algorithm a);

struct HyperpriorSpec {
  enum class Kind { uninformative, informative_env3, explicit_values };
  Kind kind = Kind::uninformative;
  std::vector<double> mean;     // explicit_values only
  std::vector<double> std_dev;  // explicit_values only

  /// Standard normal; informative puts 2 on the last mean entry.
  GaussianDiag resolve(std::size_t num_actions) const;
};

struct ExperimentConfig {
  std::string environment = "env1";
  /// Overrides `environment` when non-empty.
  std::vector<BetaShape> custom_shapes;
  Algorithm algorithm = Algorithm::pbvi;
  BoundConfig bound;
  std::size_t n = 100;
  std::size_t m = 20;
  /// Per-task optimizer iterations; unset means the learner's default.
  std::optional<std::size_t> k_iters;
  AdamSettings adam;
  PsgldSettings psgld;
  std::size_t vi_bound_samples = ViSettings{}.bound_samples;
  std::size_t mcmc_bound_samples = McmcSettings{}.bound_samples;
  std::size_t inner_runs = 10;  // A
  std::size_t repeats = 50;     // R
  std::uint64_t seed = 1;
  HyperpriorSpec hyperprior;
  /// Bounds use delta / union_bound_cells (1 = no correction).
  std::size_t union_bound_cells = 1;

  BetaBernoulliEnv make_environment() const;
  /// Bound constants as the learners see them (delta already divided).
  BoundConfig effective_bound() const;
  /// Throws invalid_input_error / constraint_violation_error.
  void validate() const;
};

/// One row of the aggregated CSV. Means are taken over repeats of the
/// inner-run average; std is the population std across repeats. KL columns
/// average all R * A runs.
struct AggregateRow {
  std::size_t task_index = 0;
  double mean_avg_reward = 0.0;
  double std_avg_reward = 0.0;
  double mean_bound = 0.0;
  double std_bound = 0.0;
  double mean_kl_hyper = 0.0;
  double mean_task_kl_sum = 0.0;
};

struct RawRun {
  std::size_t repeat = 0;
  std::size_t inner_run = 0;
  std::vector<RunRecord> records;
};

struct ExperimentResult {
  std::vector<AggregateRow> rows;
  std::vector<RawRun> runs;  // ordered by (repeat, inner_run)
};

inline constexpr std::string_view kCsvHeader =
    "task_index,mean_avg_reward,std_avg_reward,mean_bound,std_bound,mean_kl_hyper,mean_task_kl_sum";
inline constexpr std::string_view kRawCsvHeader =
    "repeat,inner_run,task_index,avg_reward,reward_total,bound_value,kl_hyper,expected_task_kl_sum";

/// A single lifelong run of the configured algorithm.
std::vector<RunRecord> run_single(const ExperimentConfig& cfg, RandomStream& rng);

/// All R * A runs, each seeded with derive_seed(seed, {r, a}), executed in
/// parallel and aggregated in a fixed order.
ExperimentResult run_experiment(const ExperimentConfig& cfg);
std::vector<AggregateRow> aggregate(std::span<const RawRun> runs, std::size_t repeats, std::size_t inner_runs);

std::string format_csv(std::span<const AggregateRow> rows);
std::string format_raw_csv(std::span<const RawRun> runs);
std::vector<AggregateRow> parse_csv(std::string_view text);
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

struct TemperaturePair {
  double t1;
  double t2;
};

/// Temperatures crossed with epsilons (Bernstein) or taus (clipping).
struct SweepGrid {
  std::vector<TemperaturePair> temperatures;
  std::vector<double> epsilons;
  std::vector<double> taus;
};

struct SweepCell {
  std::string name;
  ExperimentConfig config;
};

struct SweepCellResult {
  SweepCell cell;
  bool ok = false;
  std::string error;
  std::optional<AggregateRow> final_row;
};

std::vector<SweepCell> expand_sweep(const ExperimentConfig& base, const SweepGrid& grid,
                                    bool union_bound_delta);
/// Runs every cell, writing <out_dir>/<name>.csv for each success; a failed
/// cell is recorded and the sweep continues.
std::vector<SweepCellResult> run_sweep(std::span<const SweepCell> cells,
                                       const std::filesystem::path& out_dir);
std::string format_summary_csv(std::span<const SweepCellResult> results);

}  // namespace lbandit
