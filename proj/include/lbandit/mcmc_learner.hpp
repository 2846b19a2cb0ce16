#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "lbandit/bounds.hpp"
#include "lbandit/core_math.hpp"
#include "lbandit/environments.hpp"
#include "lbandit/objective.hpp"
#include "lbandit/rng.hpp"
#include "lbandit/run_record.hpp"

namespace lbandit {

/// C = T1 T2 n sqrt(nm) / (T1 sqrt(n) + T2 n sqrt(m)), the reciprocal of the
/// hyper-KL coefficient.
double phi_scale(const BoundConfig& cfg);

/// phi(w) = C [ 1/(nm) sum_ij R_hat_i(A(D_i^{:j-1}, P_w))
///              - 1/(T2 n m sqrt(m)) sum_ij KL(A(D_i^{:j-1}, P_w) || P_w) ].
/// The Gibbs hyperposterior is hyperprior(w) exp(phi(w)) / Z. Empty `tasks`
/// gives phi = 0.
double phi(std::span<const double> w, std::span<const TaskSummary> tasks, const BoundConfig& cfg);

struct GibbsGradient {
  double value = 0.0;
  std::vector<double> grad;
};

double log_gibbs_density_unnormalized(std::span<const double> w, const GaussianDiag& hyperprior,
                                      std::span<const TaskSummary> tasks, const BoundConfig& cfg);
GibbsGradient log_gibbs_density_gradient(std::span<const double> w, const GaussianDiag& hyperprior,
                                         std::span<const TaskSummary> tasks, const BoundConfig& cfg);

struct PsgldSettings {
  double step_size = 1e-3;
  double precond_decay = 0.99;
  double precond_eps = 1e-5;
};

/// One pSGLD update with an RMSProp diagonal preconditioner:
///   V' = decay V + (1 - decay) g^2,  G = 1 / (sqrt(V') + eps)
///   w' = w + (h/2) G g + sqrt(h G) xi
/// The curvature correction term is omitted. Returns (w', V').
std::pair<std::vector<double>, std::vector<double>> psgld_step(std::span<const double> w,
                                                               std::span<const double> grad,
                                                               std::span<const double> precond,
                                                               const PsgldSettings& settings,
                                                               RandomStream& rng);

/// Langevin step with a fixed diagonal preconditioner G (no adaptation).
std::vector<double> langevin_step(std::span<const double> w, std::span<const double> grad,
                                  std::span<const double> precond_g, double step_size,
                                  RandomStream& rng);

struct McmcBoundEstimate {
  double bound = 0.0;
  /// ln((1/K) sum_k exp(phi(w_k))) with w_k drawn from the hyperprior.
  double log_mean_exp_phi = 0.0;
  /// Self-normalized importance estimates of the Gibbs hyperposterior's bound
  /// inputs; they reproduce `bound` through lower_bound().
  BoundInputs inputs;
};

/// Log-mean-exp estimate of the bound at the Gibbs hyperposterior.
McmcBoundEstimate mcmc_bound_estimate(const GaussianDiag& hyperprior,
                                      std::span<const TaskSummary> tasks, const BoundConfig& cfg,
                                      std::size_t num_samples, RandomStream& rng);

/// Stable ln(mean(exp(x))).
double log_mean_exp(std::span<const double> x);

struct McmcSettings {
  std::size_t k_iters = 100;
  PsgldSettings psgld;
  std::size_t bound_samples = 32;
};

/// Lifelong PAC-Bayes MCMC: a single pSGLD chain over prior weights that
/// persists across tasks; task i uses softmax of the chain's current state.
std::vector<RunRecord> mcmc_lifelong_run(const BetaBernoulliEnv& env,
                                         const GaussianDiag& hyperprior, const BoundConfig& cfg,
                                         std::size_t n, std::size_t m,
                                         const McmcSettings& settings, RandomStream& rng);

}  // namespace lbandit
