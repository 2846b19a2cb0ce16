#pragma once

#include <cstddef>
#include <vector>

#include "lbandit/bounds.hpp"
#include "lbandit/core_math.hpp"
#include "lbandit/environments.hpp"
#include "lbandit/rng.hpp"
#include "lbandit/run_record.hpp"

namespace lbandit {

/// Running average of final posteriors; the prior for the next task.
class ArrPrior {
 public:
  explicit ArrPrior(std::size_t num_actions);

  /// Uniform before any task has been observed.
  ActionDistribution prior() const;
  void observe(const ActionDistribution& final_posterior);
  std::size_t tasks_seen() const { return tasks_seen_; }

 private:
  std::vector<double> sum_;
  std::size_t tasks_seen_ = 0;
};

/// Learning from scratch: uniform prior on every task. The behaviour rule
/// follows cfg.kind (epsilon-soft for Bernstein).
std::vector<RunRecord> lfs_run(const BetaBernoulliEnv& env, const BoundConfig& cfg, std::size_t n,
                               std::size_t m, RandomStream& rng);

/// Posterior averaging: prior for task i+1 is the mean of the i final
/// posteriors seen so far.
std::vector<RunRecord> arr_run(const BetaBernoulliEnv& env, const BoundConfig& cfg, std::size_t n,
                               std::size_t m, RandomStream& rng);

}  // namespace lbandit
