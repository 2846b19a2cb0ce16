#pragma once

#include <cstddef>

namespace lbandit {

/// Outcome of one task within one lifelong run. Baselines carry no bound:
/// bound_value is NaN and the KL fields are zero.
struct RunRecord {
  std::size_t task_index = 0;  // 1-based
  double avg_reward = 0.0;
  double bound_value = 0.0;
  double kl_hyper = 0.0;
  double expected_task_kl_sum = 0.0;
  double wall_seconds = 0.0;
  std::size_t reward_total = 0;  // sum of the task's m binary rewards
};

}  // namespace lbandit
