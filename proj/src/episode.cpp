#include "lbandit/episode.hpp"

#include <algorithm>

#include "lbandit/base_learner.hpp"
#include "lbandit/error.hpp"

namespace lbandit {

BehaviourPolicy BehaviourPolicy::for_bound(const BoundConfig& cfg) {
  if (cfg.kind == BoundKind::bernstein) return BehaviourPolicy{true, cfg.epsilon};
  return BehaviourPolicy{false, 0.0};
}

ActionDistribution BehaviourPolicy::apply(const ActionDistribution& posterior) const {
  return epsilon_soft ? lbandit::epsilon_soft(posterior, epsilon) : posterior;
}

Episode run_episode(const Task& task, const ActionDistribution& prior, std::size_t horizon,
                    const BehaviourPolicy& policy, RandomStream& rng) {
  if (task.num_actions() != prior.size()) throw invalid_input_error("episode: prior/task size mismatch");
  if (horizon == 0) throw invalid_input_error("episode horizon must be at least 1");
  Episode ep{TaskDataset(prior.size()), prior, 0, 1.0};
  SufficientStats stats(prior.size());
  for (std::size_t j = 0; j < horizon; ++j) {
    const ActionDistribution b = policy.apply(ep.final_posterior);
    const std::size_t a = rng.categorical(b.probs());
    const int r = sample_reward(task, a, rng);
    ep.data.append(Step{a, static_cast<double>(r), b[a]});
    ep.min_behaviour_prob = std::min(ep.min_behaviour_prob, *std::min_element(b.probs().begin(), b.probs().end()));
    ep.reward_total += static_cast<std::size_t>(r);
    stats.add(a, r);
    ep.final_posterior = posterior(stats, prior, horizon);
  }
  return ep;
}

}  // namespace lbandit
