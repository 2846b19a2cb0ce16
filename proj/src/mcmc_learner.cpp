#include "lbandit/mcmc_learner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "lbandit/episode.hpp"
#include "lbandit/error.hpp"

namespace lbandit {

namespace {

BoundConfig fitted_config(const BoundConfig& cfg, std::span<const TaskSummary> tasks) {
  BoundConfig c = cfg;
  if (!tasks.empty()) {
    c.n = tasks.size();
    c.m = tasks.front().horizon;
    c.num_actions = tasks.front().num_actions;
  }
  return c;
}

// phi's per-term weights: C/(nm) on rewards, C/(T2 n m sqrt(m)) on KLs.
TermWeights phi_weights(const BoundConfig& c) {
  const double scale = phi_scale(c);
  return TermWeights{scale / (static_cast<double>(c.n) * static_cast<double>(c.m)),
                     scale * task_kl_coefficient(c)};
}

void check_dim(std::span<const double> w, const GaussianDiag& hyperprior) {
  if (w.size() != hyperprior.size()) throw invalid_input_error("weight vector and hyperprior differ in dimension");
}

}  // namespace

double phi_scale(const BoundConfig& cfg) { return 1.0 / hyper_kl_coefficient(cfg); }

double phi(std::span<const double> w, std::span<const TaskSummary> tasks, const BoundConfig& cfg) {
  if (tasks.empty()) return 0.0;
  const BoundConfig c = fitted_config(cfg, tasks);
  const TermWeights wt = phi_weights(c);
  const TermTotals tot = shared_terms(w, tasks, wt, {});
  return wt.reward * tot.reward_sum - wt.kl * tot.kl_sum;
}

double log_gibbs_density_unnormalized(std::span<const double> w, const GaussianDiag& hyperprior,
                                      std::span<const TaskSummary> tasks, const BoundConfig& cfg) {
  check_dim(w, hyperprior);
  return hyperprior.log_density(w) + phi(w, tasks, cfg);
}

GibbsGradient log_gibbs_density_gradient(std::span<const double> w, const GaussianDiag& hyperprior,
                                         std::span<const TaskSummary> tasks, const BoundConfig& cfg) {
  check_dim(w, hyperprior);
  const std::size_t k = w.size();
  GibbsGradient g;
  g.grad.assign(k, 0.0);
  double phi_value = 0.0;
  if (!tasks.empty()) {
    const BoundConfig c = fitted_config(cfg, tasks);
    const TermWeights wt = phi_weights(c);
    const TermTotals tot = shared_terms(w, tasks, wt, g.grad);
    phi_value = wt.reward * tot.reward_sum - wt.kl * tot.kl_sum;
  }
  for (std::size_t a = 0; a < k; ++a) {
    g.grad[a] -= (w[a] - hyperprior.mean[a]) * std::exp(-2.0 * hyperprior.log_std[a]);
  }
  g.value = hyperprior.log_density(w) + phi_value;
  return g;
}

std::pair<std::vector<double>, std::vector<double>> psgld_step(std::span<const double> w,
                                                               std::span<const double> grad,
                                                               std::span<const double> precond,
                                                               const PsgldSettings& settings,
                                                               RandomStream& rng) {
  const std::size_t k = w.size();
  if (grad.size() != k || precond.size() != k) throw invalid_input_error("psgld_step: shape mismatch");
  if (!(settings.step_size > 0.0)) throw invalid_input_error("psgld step size must be positive");
  std::vector<double> next_w(k);
  std::vector<double> next_v(k);
  for (std::size_t a = 0; a < k; ++a) {
    if (!std::isfinite(grad[a])) {
      throw numerical_error("psgld_step: non-finite gradient at coordinate " + std::to_string(a) +
                            " (w = " + std::to_string(w[a]) + ")");
    }
    next_v[a] = settings.precond_decay * precond[a] + (1.0 - settings.precond_decay) * grad[a] * grad[a];
    const double g = 1.0 / (std::sqrt(next_v[a]) + settings.precond_eps);
    next_w[a] = w[a] + 0.5 * settings.step_size * g * grad[a] + std::sqrt(settings.step_size * g) * rng.normal();
  }
  return {std::move(next_w), std::move(next_v)};
}

std::vector<double> langevin_step(std::span<const double> w, std::span<const double> grad,
                                  std::span<const double> precond_g, double step_size,
                                  RandomStream& rng) {
  const std::size_t k = w.size();
  if (grad.size() != k || precond_g.size() != k) throw invalid_input_error("langevin_step: shape mismatch");
  std::vector<double> next(k);
  for (std::size_t a = 0; a < k; ++a) {
    next[a] = w[a] + 0.5 * step_size * precond_g[a] * grad[a] + std::sqrt(step_size * precond_g[a]) * rng.normal();
  }
  return next;
}

double log_mean_exp(std::span<const double> x) {
  if (x.empty()) throw invalid_input_error("log_mean_exp of an empty sample");
  return log_sum_exp(x) - std::log(static_cast<double>(x.size()));
}

McmcBoundEstimate mcmc_bound_estimate(const GaussianDiag& hyperprior,
                                      std::span<const TaskSummary> tasks, const BoundConfig& cfg,
                                      std::size_t num_samples, RandomStream& rng) {
  if (num_samples < 1) throw invalid_input_error("bound estimate needs at least one sample");
  hyperprior.validate();
  const BoundConfig c = fitted_config(cfg, tasks);
  const std::size_t k = hyperprior.size();
  std::vector<double> phis(num_samples, 0.0);
  std::vector<double> rewards(num_samples, 0.0);
  std::vector<double> kls(num_samples, 0.0);
  std::vector<double> w(k);
  const TermWeights wt = tasks.empty() ? TermWeights{} : phi_weights(c);
  for (std::size_t s = 0; s < num_samples; ++s) {
    for (std::size_t a = 0; a < k; ++a) w[a] = hyperprior.mean[a] + hyperprior.std_dev(a) * rng.normal();
    if (tasks.empty()) continue;
    const TermTotals tot = shared_terms(w, tasks, wt, {});
    rewards[s] = tot.reward_sum / (static_cast<double>(c.n) * static_cast<double>(c.m));
    kls[s] = std::max(tot.kl_sum, 0.0);
    phis[s] = wt.reward * tot.reward_sum - wt.kl * tot.kl_sum;
  }

  McmcBoundEstimate est;
  est.log_mean_exp_phi = log_mean_exp(phis);
  est.bound = est.log_mean_exp_phi / phi_scale(c) - constant_penalty(c);

  // Self-normalized weights of the hyperprior draws under the Gibbs density.
  const double lse = log_sum_exp(phis);
  double mean_phi = 0.0;
  for (std::size_t s = 0; s < num_samples; ++s) {
    const double wgt = std::exp(phis[s] - lse);
    est.inputs.empirical_multitask_reward += wgt * rewards[s];
    est.inputs.expected_task_kl_sum += wgt * kls[s];
    mean_phi += wgt * phis[s];
  }
  est.inputs.kl_hyper = std::max(mean_phi - est.log_mean_exp_phi, 0.0);
  return est;
}

std::vector<RunRecord> mcmc_lifelong_run(const BetaBernoulliEnv& env,
                                         const GaussianDiag& hyperprior, const BoundConfig& cfg,
                                         std::size_t n, std::size_t m,
                                         const McmcSettings& settings, RandomStream& rng) {
  const std::size_t k = env.num_actions();
  if (hyperprior.size() != k) throw invalid_input_error("hyperprior dimension differs from the action count");
  hyperprior.validate();
  BoundConfig base = cfg;
  base.m = m;
  base.num_actions = k;
  base.with_task_count(n).validate();
  const BehaviourPolicy policy = BehaviourPolicy::for_bound(base);

  std::vector<double> w(k);
  for (std::size_t a = 0; a < k; ++a) w[a] = hyperprior.mean[a] + hyperprior.std_dev(a) * rng.normal();
  std::vector<double> precond(k, 0.0);
  std::vector<TaskSummary> tasks;
  tasks.reserve(n);
  std::vector<RunRecord> records;
  records.reserve(n);

  for (std::size_t i = 1; i <= n; ++i) {
    const auto start = std::chrono::steady_clock::now();
    const Task task = sample_task(env, rng);
    const ActionDistribution prior = softmax(WeightVector(w));
    const Episode ep = run_episode(task, prior, m, policy, rng);
    tasks.push_back(summarize_task(ep.data, base.kind, base.tau));

    const BoundConfig cur = base.with_task_count(i);
    for (std::size_t it = 0; it < settings.k_iters; ++it) {
      const GibbsGradient g = log_gibbs_density_gradient(w, hyperprior, tasks, cur);
      auto [next_w, next_v] = psgld_step(w, g.grad, precond, settings.psgld, rng);
      w = std::move(next_w);
      precond = std::move(next_v);
    }

    const McmcBoundEstimate est = mcmc_bound_estimate(hyperprior, tasks, cur, settings.bound_samples, rng);
    RunRecord rec;
    rec.task_index = i;
    rec.avg_reward = ep.avg_reward();
    rec.reward_total = ep.reward_total;
    rec.bound_value = est.bound;
    rec.kl_hyper = est.inputs.kl_hyper;
    rec.expected_task_kl_sum = est.inputs.expected_task_kl_sum;
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    records.push_back(rec);
  }
  return records;
}

}  // namespace lbandit
