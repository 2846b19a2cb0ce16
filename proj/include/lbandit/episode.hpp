#pragma once

#include <cstddef>

#include "lbandit/bounds.hpp"
#include "lbandit/core_math.hpp"
#include "lbandit/environments.hpp"
#include "lbandit/estimators.hpp"
#include "lbandit/rng.hpp"

namespace lbandit {

/// How actions are sampled inside a task: the current posterior itself, or
/// its epsilon-soft mixture with the uniform distribution.
struct BehaviourPolicy {
  bool epsilon_soft = false;
  double epsilon = 0.0;

  /// Bernstein experiments explore epsilon-soft; clipping ones act on the
  /// posterior directly.
  static BehaviourPolicy for_bound(const BoundConfig& cfg);
  ActionDistribution apply(const ActionDistribution& posterior) const;
};

struct Episode {
  TaskDataset data;
  ActionDistribution final_posterior;
  std::size_t reward_total = 0;
  double min_behaviour_prob = 1.0;

  double avg_reward() const {
    return static_cast<double>(reward_total) / static_cast<double>(data.size());
  }
};

/// Plays one task for `horizon` steps starting from `prior`, updating the
/// base learner's posterior after every step.
Episode run_episode(const Task& task, const ActionDistribution& prior, std::size_t horizon,
                    const BehaviourPolicy& policy, RandomStream& rng);

}  // namespace lbandit
