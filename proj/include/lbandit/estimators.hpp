#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lbandit/core_math.hpp"
#include "lbandit/environments.hpp"

namespace lbandit {

/// One interaction: the action taken, its reward, and the behaviour policy's
/// probability of that action at sampling time.
struct Step {
  std::size_t action;
  double reward;
  double behaviour_prob;
};

/// Ordered interaction log of a single task.
class TaskDataset {
 public:
  explicit TaskDataset(std::size_t num_actions);

  /// Throws invalid_input_error for an out-of-range action, a reward outside
  /// [0, 1] or a behaviour probability outside (0, 1].
  void append(const Step& step);

  std::size_t num_actions() const { return num_actions_; }
  std::size_t size() const { return steps_.size(); }
  bool empty() const { return steps_.empty(); }
  const std::vector<Step>& steps() const { return steps_; }
  const Step& operator[](std::size_t j) const { return steps_[j]; }

 private:
  std::size_t num_actions_;
  std::vector<Step> steps_;
};

/// Per-action pull counts and reward sums.
struct SufficientStats {
  std::vector<std::size_t> counts;
  std::vector<double> reward_sums;

  explicit SufficientStats(std::size_t num_actions);
  static SufficientStats of(const TaskDataset& data);
  /// Stats of the first `length` steps.
  static SufficientStats of_prefix(const TaskDataset& data, std::size_t length);

  std::size_t num_actions() const { return counts.size(); }
  void add(std::size_t action, double reward);
  std::size_t total_count() const;
};

/// entry a = (1/m) sum_j r_j / b_j [a_j = a].
std::vector<double> iw_estimate_vector(const TaskDataset& data);
/// entry a = (1/m) sum_j min(1/b_j, 1 + tau) r_j [a_j = a].
std::vector<double> clipped_iw_estimate_vector(const TaskDataset& data, double tau);

/// sum_a q[a] est[a].
double estimate_under_policy(std::span<const double> est, const ActionDistribution& q);
/// Expected reward of q on a Bernoulli task, sum_a q[a] p[a].
double true_reward(const Task& task, const ActionDistribution& q);

}  // namespace lbandit
