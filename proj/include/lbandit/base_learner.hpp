#pragma once

#include <cstddef>
#include <vector>

#include "lbandit/core_math.hpp"
#include "lbandit/estimators.hpp"

namespace lbandit {

// KL-regularized base learner. For prior P and horizon m the posterior is
//
//   Q(a) ∝ P(a) exp( sqrt(m) / (K |I_a|) * sum_{j in I_a} r_j ),
//
// the maximizer of  sum_a Q(a) mean_reward(a) - (K / sqrt(m)) KL(Q || P).
// Unobserved actions (|I_a| = 0) get exponent 0 and keep their prior mass.
// The horizon m is the task's full length, also for prefix posteriors.

/// Per-action exponent sqrt(m) / (K |I_a|) * sum r, 0 for unobserved actions.
std::vector<double> posterior_exponents(const SufficientStats& stats, std::size_t horizon);

ActionDistribution posterior(const SufficientStats& stats, const ActionDistribution& prior,
                             std::size_t horizon);

/// Posteriors after 0, 1, ..., m steps; element 0 is the prior. Requires
/// data.size() == horizon.
std::vector<ActionDistribution> posterior_sequence(const TaskDataset& data,
                                                   const ActionDistribution& prior,
                                                   std::size_t horizon);

/// The learner's argmax objective at q. Throws divergence_error when q has
/// support outside the prior's (the objective is -infinity there).
double objective_value(const ActionDistribution& q, const SufficientStats& stats,
                       const ActionDistribution& prior, std::size_t horizon);

}  // namespace lbandit
