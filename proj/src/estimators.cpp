#include "lbandit/estimators.hpp"

#include <algorithm>
#include <numeric>

#include "lbandit/error.hpp"

namespace lbandit {

TaskDataset::TaskDataset(std::size_t num_actions) : num_actions_(num_actions) {
  if (num_actions < 2) throw invalid_input_error("dataset needs at least 2 actions");
}

void TaskDataset::append(const Step& step) {
  if (step.action >= num_actions_) throw invalid_input_error("step action out of range");
  if (!(step.reward >= 0.0 && step.reward <= 1.0)) {
    throw invalid_input_error("step reward must lie in [0, 1]");
  }
  if (!(step.behaviour_prob > 0.0 && step.behaviour_prob <= 1.0)) {
    throw invalid_input_error("behaviour probability must lie in (0, 1]");
  }
  steps_.push_back(step);
}

SufficientStats::SufficientStats(std::size_t num_actions)
    : counts(num_actions, 0), reward_sums(num_actions, 0.0) {}

SufficientStats SufficientStats::of(const TaskDataset& data) { return of_prefix(data, data.size()); }

SufficientStats SufficientStats::of_prefix(const TaskDataset& data, std::size_t length) {
  if (length > data.size()) throw invalid_input_error("prefix longer than dataset");
  SufficientStats s(data.num_actions());
  for (std::size_t j = 0; j < length; ++j) s.add(data[j].action, data[j].reward);
  return s;
}

void SufficientStats::add(std::size_t action, double reward) {
  if (action >= counts.size()) throw invalid_input_error("stats action out of range");
  ++counts[action];
  reward_sums[action] += reward;
}

std::size_t SufficientStats::total_count() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

namespace {

template <typename Weight>
std::vector<double> weighted_estimate(const TaskDataset& data, Weight weight) {
  if (data.empty()) throw invalid_input_error("reward estimate of an empty dataset");
  std::vector<double> est(data.num_actions(), 0.0);
  for (const Step& s : data.steps()) est[s.action] += weight(s.behaviour_prob) * s.reward;
  const double inv_m = 1.0 / static_cast<double>(data.size());
  for (double& e : est) e *= inv_m;
  return est;
}

}  // namespace

std::vector<double> iw_estimate_vector(const TaskDataset& data) {
  return weighted_estimate(data, [](double b) { return 1.0 / b; });
}

std::vector<double> clipped_iw_estimate_vector(const TaskDataset& data, double tau) {
  if (!(tau > 0.0)) throw invalid_input_error("clip level tau must be positive");
  const double cap = 1.0 + tau;
  return weighted_estimate(data, [cap](double b) { return std::min(1.0 / b, cap); });
}

double estimate_under_policy(std::span<const double> est, const ActionDistribution& q) {
  if (est.size() != q.size()) throw invalid_input_error("estimate_under_policy: dimension mismatch");
  double v = 0.0;
  for (std::size_t a = 0; a < est.size(); ++a) v += q[a] * est[a];
  return v;
}

double true_reward(const Task& task, const ActionDistribution& q) {
  if (task.num_actions() != q.size()) throw invalid_input_error("true_reward: dimension mismatch");
  return estimate_under_policy(task.p, q);
}

}  // namespace lbandit
