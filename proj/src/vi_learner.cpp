#include "lbandit/vi_learner.hpp"

#include <chrono>
#include <cmath>

#include "lbandit/episode.hpp"
#include "lbandit/error.hpp"

namespace lbandit {

namespace {

// n, m taken from the task list; T1, T2 from cfg.
BoundConfig objective_config(const BoundConfig& cfg, std::span<const TaskSummary> tasks) {
  if (tasks.empty()) throw invalid_input_error("objective needs at least one task");
  BoundConfig c = cfg;
  c.n = tasks.size();
  c.m = tasks.front().horizon;
  c.num_actions = tasks.front().num_actions;
  return c;
}

TermWeights objective_weights(const BoundConfig& c) {
  return TermWeights{1.0 / (static_cast<double>(c.n) * static_cast<double>(c.m)), task_kl_coefficient(c)};
}

}  // namespace

ViState ViState::starting_at(const GaussianDiag& theta) {
  theta.validate();
  ViState s;
  s.theta = theta;
  s.adam_m.assign(2 * theta.size(), 0.0);
  s.adam_v.assign(2 * theta.size(), 0.0);
  return s;
}

std::vector<double> ViGradient::flattened() const {
  std::vector<double> g(mean);
  g.insert(g.end(), log_std.begin(), log_std.end());
  return g;
}

double l_vi(const GaussianDiag& theta, std::span<const TaskSummary> tasks,
            const GaussianDiag& hyperprior, const BoundConfig& cfg, std::span<const double> noise) {
  const BoundConfig c = objective_config(cfg, tasks);
  const TermWeights wt = objective_weights(c);
  const TermTotals tot = reparam_terms(theta, tasks, noise, wt, {}, {});
  return wt.reward * tot.reward_sum - wt.kl * tot.kl_sum -
         hyper_kl_coefficient(c) * kl_gaussian_diag(theta, hyperprior);
}

ViGradient l_vi_gradient(const GaussianDiag& theta, std::span<const TaskSummary> tasks,
                         const GaussianDiag& hyperprior, const BoundConfig& cfg,
                         std::span<const double> noise) {
  const BoundConfig c = objective_config(cfg, tasks);
  const TermWeights wt = objective_weights(c);
  const std::size_t k = theta.size();
  ViGradient g;
  g.mean.resize(k);
  g.log_std.resize(k);
  const TermTotals tot = reparam_terms(theta, tasks, noise, wt, g.mean, g.log_std);
  const double hyper = hyper_kl_coefficient(c);
  g.value = wt.reward * tot.reward_sum - wt.kl * tot.kl_sum - hyper * kl_gaussian_diag(theta, hyperprior);
  for (std::size_t a = 0; a < k; ++a) {
    const double inv_var_p = std::exp(-2.0 * hyperprior.log_std[a]);
    const double var_ratio = std::exp(2.0 * theta.log_std[a]) * inv_var_p;
    g.mean[a] -= hyper * (theta.mean[a] - hyperprior.mean[a]) * inv_var_p;
    g.log_std[a] -= hyper * (var_ratio - 1.0);
  }
  return g;
}

ViState adam_step(const ViState& state, std::span<const double> grad, const AdamSettings& adam) {
  const std::size_t k = state.theta.size();
  if (grad.size() != 2 * k || state.adam_m.size() != 2 * k || state.adam_v.size() != 2 * k) {
    throw invalid_input_error("adam_step: gradient/moment size mismatch");
  }
  ViState next = state;
  next.step_count = state.step_count + 1;
  const double t = static_cast<double>(next.step_count);
  const double corr1 = 1.0 - std::pow(adam.beta1, t);
  const double corr2 = 1.0 - std::pow(adam.beta2, t);
  for (std::size_t p = 0; p < 2 * k; ++p) {
    if (!std::isfinite(grad[p])) throw numerical_error("adam_step: non-finite gradient entry");
    next.adam_m[p] = adam.beta1 * state.adam_m[p] + (1.0 - adam.beta1) * grad[p];
    next.adam_v[p] = adam.beta2 * state.adam_v[p] + (1.0 - adam.beta2) * grad[p] * grad[p];
    const double m_hat = next.adam_m[p] / corr1;
    const double v_hat = next.adam_v[p] / corr2;
    const double delta = adam.learning_rate * m_hat / (std::sqrt(v_hat) + adam.epsilon);
    if (p < k) {
      next.theta.mean[p] += delta;
    } else {
      next.theta.log_std[p - k] += delta;
    }
  }
  return next;
}

BoundInputs vi_bound_inputs(const GaussianDiag& theta, std::span<const TaskSummary> tasks,
                            const GaussianDiag& hyperprior, std::size_t num_samples,
                            RandomStream& rng) {
  if (num_samples == 0) throw invalid_input_error("bound estimate needs at least one sample");
  if (tasks.empty()) throw invalid_input_error("bound estimate needs at least one task");
  const std::size_t k = theta.size();
  const std::size_t m = tasks.front().horizon;
  std::vector<double> noise(tasks.size() * m * k);
  double reward = 0.0;
  double kl = 0.0;
  for (std::size_t s = 0; s < num_samples; ++s) {
    rng.fill_normal(noise);
    const TermTotals tot = reparam_terms(theta, tasks, noise, TermWeights{}, {}, {});
    reward += tot.reward_sum;
    kl += tot.kl_sum;
  }
  const double ns = static_cast<double>(num_samples);
  BoundInputs in;
  in.empirical_multitask_reward = reward / (ns * static_cast<double>(tasks.size() * m));
  in.expected_task_kl_sum = std::max(kl / ns, 0.0);
  in.kl_hyper = kl_gaussian_diag(theta, hyperprior);
  return in;
}

std::vector<RunRecord> vi_lifelong_run(const BetaBernoulliEnv& env, const GaussianDiag& hyperprior,
                                       const BoundConfig& cfg, std::size_t n, std::size_t m,
                                       const ViSettings& settings, RandomStream& rng) {
  const std::size_t k = env.num_actions();
  if (hyperprior.size() != k) throw invalid_input_error("hyperprior dimension differs from the action count");
  BoundConfig base = cfg;
  base.m = m;
  base.num_actions = k;
  base.with_task_count(n).validate();
  const BehaviourPolicy policy = BehaviourPolicy::for_bound(base);

  ViState state = ViState::starting_at(hyperprior);
  std::vector<TaskSummary> tasks;
  tasks.reserve(n);
  std::vector<RunRecord> records;
  records.reserve(n);
  std::vector<double> noise;
  std::vector<double> w(k);

  for (std::size_t i = 1; i <= n; ++i) {
    const auto start = std::chrono::steady_clock::now();
    const Task task = sample_task(env, rng);
    for (std::size_t a = 0; a < k; ++a) w[a] = state.theta.mean[a] + state.theta.std_dev(a) * rng.normal();
    const ActionDistribution prior = softmax(WeightVector(w));
    const Episode ep = run_episode(task, prior, m, policy, rng);
    tasks.push_back(summarize_task(ep.data, base.kind, base.tau));

    const BoundConfig cur = base.with_task_count(i);
    noise.resize(tasks.size() * m * k);
    for (std::size_t it = 0; it < settings.k_iters; ++it) {
      rng.fill_normal(noise);
      const ViGradient g = l_vi_gradient(state.theta, tasks, hyperprior, cur, noise);
      state = adam_step(state, g.flattened(), settings.adam);
    }

    const BoundInputs in = vi_bound_inputs(state.theta, tasks, hyperprior, settings.bound_samples, rng);
    RunRecord rec;
    rec.task_index = i;
    rec.avg_reward = ep.avg_reward();
    rec.reward_total = ep.reward_total;
    rec.bound_value = lower_bound(in, cur);
    rec.kl_hyper = in.kl_hyper;
    rec.expected_task_kl_sum = in.expected_task_kl_sum;
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    records.push_back(rec);
  }
  return records;
}

}  // namespace lbandit
