#include "lbandit/base_learner.hpp"

#include <algorithm>
#include <cmath>

#include "lbandit/error.hpp"

namespace lbandit {

std::vector<double> posterior_exponents(const SufficientStats& stats, std::size_t horizon) {
  if (horizon == 0) throw invalid_input_error("horizon must be at least 1");
  const double scale = std::sqrt(static_cast<double>(horizon)) / static_cast<double>(stats.num_actions());
  std::vector<double> e(stats.num_actions(), 0.0);
  for (std::size_t a = 0; a < e.size(); ++a) {
    if (stats.counts[a] > 0) e[a] = scale * stats.reward_sums[a] / static_cast<double>(stats.counts[a]);
  }
  return e;
}

ActionDistribution posterior(const SufficientStats& stats, const ActionDistribution& prior,
                             std::size_t horizon) {
  if (stats.num_actions() != prior.size()) throw invalid_input_error("posterior: dimension mismatch");
  const std::vector<double> e = posterior_exponents(stats, horizon);
  const double mx = *std::max_element(e.begin(), e.end());
  std::vector<double> q(prior.size());
  double z = 0.0;
  for (std::size_t a = 0; a < q.size(); ++a) {
    q[a] = prior[a] * std::exp(e[a] - mx);
    z += q[a];
  }
  for (double& x : q) x /= z;
  return ActionDistribution(std::move(q));
}

std::vector<ActionDistribution> posterior_sequence(const TaskDataset& data,
                                                   const ActionDistribution& prior,
                                                   std::size_t horizon) {
  if (data.size() != horizon) {
    throw invalid_input_error("posterior_sequence: dataset length differs from the horizon");
  }
  std::vector<ActionDistribution> seq;
  seq.reserve(horizon + 1);
  seq.push_back(prior);
  SufficientStats stats(data.num_actions());
  for (const Step& s : data.steps()) {
    stats.add(s.action, s.reward);
    seq.push_back(posterior(stats, prior, horizon));
  }
  return seq;
}

double objective_value(const ActionDistribution& q, const SufficientStats& stats,
                       const ActionDistribution& prior, std::size_t horizon) {
  if (q.size() != prior.size() || stats.num_actions() != prior.size()) {
    throw invalid_input_error("objective_value: dimension mismatch");
  }
  double reward = 0.0;
  for (std::size_t a = 0; a < q.size(); ++a) {
    if (stats.counts[a] > 0) reward += q[a] * stats.reward_sums[a] / static_cast<double>(stats.counts[a]);
  }
  const double weight = static_cast<double>(q.size()) / std::sqrt(static_cast<double>(horizon));
  return reward - weight * kl_discrete(q, prior);
}

}  // namespace lbandit
