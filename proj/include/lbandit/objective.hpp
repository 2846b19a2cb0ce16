#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lbandit/bounds.hpp"
#include "lbandit/core_math.hpp"
#include "lbandit/estimators.hpp"

namespace lbandit {

/// Per-task quantities that the multi-task objectives reuse on every
/// evaluation: the cached reward-estimate vector and the base learner's
/// exponents for each prefix D^{:j}, j = 0..m-1.
struct TaskSummary {
  std::size_t num_actions = 0;
  std::size_t horizon = 0;
  std::vector<double> estimate;     // K
  std::vector<double> exponents;    // horizon x K
  std::vector<double> row_max;      // horizon
  std::vector<double> shifted_exp;  // exp(exponents - row_max), horizon x K

  std::span<const double> exponent_row(std::size_t j) const {
    return {exponents.data() + j * num_actions, num_actions};
  }
  std::span<const double> shifted_exp_row(std::size_t j) const {
    return {shifted_exp.data() + j * num_actions, num_actions};
  }
};

/// Builds a summary from a complete dataset (data.size() == horizon) and a
/// precomputed estimate vector.
TaskSummary summarize_task(const TaskDataset& data, std::vector<double> estimate);
/// Uses the clipped estimator for the clipping bound, the plain
/// importance-weighted one for Bernstein.
TaskSummary summarize_task(const TaskDataset& data, BoundKind kind, double tau);

/// Weights of one (i, j) term: value = reward * R_hat_i(Q_ij) - kl * KL(Q_ij || P_ij).
struct TermWeights {
  double reward = 0.0;
  double kl = 0.0;
};

/// Unweighted sums over all (i, j) terms.
struct TermTotals {
  double reward_sum = 0.0;
  double kl_sum = 0.0;
};

// Reparameterized kernel: term (i, j) uses prior weights
//   w_ij = mean + exp(log_std) * noise[(i * m + j) * K .. +K].
// If the gradient spans are non-empty they receive (overwrite) the gradient
// of sum_ij weighted term values with respect to mean and log_std.
//
// The parallel version splits work by task and reduces partial sums in task
// order, so its result does not depend on the thread count.
TermTotals reparam_terms(const GaussianDiag& theta, std::span<const TaskSummary> tasks,
                         std::span<const double> noise, const TermWeights& weights,
                         std::span<double> grad_mean, std::span<double> grad_log_std);
TermTotals reparam_terms_serial(const GaussianDiag& theta, std::span<const TaskSummary> tasks,
                                std::span<const double> noise, const TermWeights& weights,
                                std::span<double> grad_mean, std::span<double> grad_log_std);

// Shared-prior kernel: every term uses the same weight vector w.
TermTotals shared_terms(std::span<const double> w, std::span<const TaskSummary> tasks,
                        const TermWeights& weights, std::span<double> grad_w);
TermTotals shared_terms_serial(std::span<const double> w, std::span<const TaskSummary> tasks,
                               const TermWeights& weights, std::span<double> grad_w);

}  // namespace lbandit
