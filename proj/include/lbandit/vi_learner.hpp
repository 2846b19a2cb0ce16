#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lbandit/bounds.hpp"
#include "lbandit/core_math.hpp"
#include "lbandit/environments.hpp"
#include "lbandit/objective.hpp"
#include "lbandit/rng.hpp"
#include "lbandit/run_record.hpp"

namespace lbandit {

struct AdamSettings {
  double learning_rate = 0.05;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Hyperposterior parameters plus Adam moments over the flattened
/// (mean, log_std) vector.
struct ViState {
  GaussianDiag theta;
  std::vector<double> adam_m;
  std::vector<double> adam_v;
  std::size_t step_count = 0;

  static ViState starting_at(const GaussianDiag& theta);
};

struct ViGradient {
  double value = 0.0;
  std::vector<double> mean;
  std::vector<double> log_std;

  /// (d/dmean..., d/dlog_std...)
  std::vector<double> flattened() const;
};

/// Monte Carlo PAC-Bayes objective
///
///   L = 1/(nm) sum_ij R_hat_i(A(D_i^{:j-1}, P_wij))
///       - 1/(T2 n m sqrt(m)) sum_ij KL(A(D_i^{:j-1}, P_wij) || P_wij)
///       - (T1 sqrt(n) + T2 n sqrt(m)) / (T1 T2 n sqrt(nm)) KL(Q_theta || hyperprior)
///
/// with w_ij = mean + sigma * noise_ij. n and m come from `tasks`; only
/// T1 and T2 are read from cfg.
double l_vi(const GaussianDiag& theta, std::span<const TaskSummary> tasks,
            const GaussianDiag& hyperprior, const BoundConfig& cfg, std::span<const double> noise);

/// Exact pathwise gradient of l_vi with the noise held fixed.
ViGradient l_vi_gradient(const GaussianDiag& theta, std::span<const TaskSummary> tasks,
                         const GaussianDiag& hyperprior, const BoundConfig& cfg,
                         std::span<const double> noise);

/// One bias-corrected Adam ascent step (parameters move along +grad).
ViState adam_step(const ViState& state, std::span<const double> grad, const AdamSettings& adam);

/// Monte Carlo estimate of the bound inputs at theta, averaging
/// `num_samples` independent draws of the per-term weight vectors.
BoundInputs vi_bound_inputs(const GaussianDiag& theta, std::span<const TaskSummary> tasks,
                            const GaussianDiag& hyperprior, std::size_t num_samples,
                            RandomStream& rng);

struct ViSettings {
  std::size_t k_iters = 50;
  AdamSettings adam;
  std::size_t bound_samples = 8;
};

/// Lifelong PAC-Bayes VI: per task, draw a prior from the hyperposterior,
/// play the task, then run k_iters Adam steps on l_vi over all tasks so far
/// (warm-started) and record the bound at the new hyperposterior.
std::vector<RunRecord> vi_lifelong_run(const BetaBernoulliEnv& env, const GaussianDiag& hyperprior,
                                       const BoundConfig& cfg, std::size_t n, std::size_t m,
                                       const ViSettings& settings, RandomStream& rng);

}  // namespace lbandit
