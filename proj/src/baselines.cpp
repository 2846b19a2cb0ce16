#include "lbandit/baselines.hpp"

#include <chrono>
#include <limits>

#include "lbandit/episode.hpp"
#include "lbandit/error.hpp"

namespace lbandit {

ArrPrior::ArrPrior(std::size_t num_actions) : sum_(num_actions, 0.0) {
  if (num_actions < 2) throw invalid_input_error("ARR prior needs at least two actions");
}

ActionDistribution ArrPrior::prior() const {
  if (tasks_seen_ == 0) return ActionDistribution::uniform(sum_.size());
  std::vector<double> p(sum_.size());
  double total = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    p[a] = sum_[a] / static_cast<double>(tasks_seen_);
    total += p[a];
  }
  // Absorb accumulated rounding so the sum-to-one check never trips.
  for (double& x : p) x /= total;
  return ActionDistribution(std::move(p));
}

void ArrPrior::observe(const ActionDistribution& final_posterior) {
  if (final_posterior.size() != sum_.size()) throw invalid_input_error("ARR posterior size mismatch");
  for (std::size_t a = 0; a < sum_.size(); ++a) sum_[a] += final_posterior[a];
  ++tasks_seen_;
}

namespace {

template <typename PriorFor, typename Observe>
std::vector<RunRecord> baseline_run(const BetaBernoulliEnv& env, const BoundConfig& cfg, std::size_t n,
                                    std::size_t m, RandomStream& rng, PriorFor prior_for, Observe observe) {
  if (n == 0 || m == 0) throw invalid_input_error("task count and horizon must be positive");
  BoundConfig c = cfg;
  c.n = n;
  c.m = m;
  c.num_actions = env.num_actions();
  const BehaviourPolicy policy = BehaviourPolicy::for_bound(c);
  std::vector<RunRecord> records;
  records.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const auto start = std::chrono::steady_clock::now();
    const Task task = sample_task(env, rng);
    const Episode ep = run_episode(task, prior_for(), m, policy, rng);
    observe(ep.final_posterior);
    RunRecord rec;
    rec.task_index = i;
    rec.avg_reward = ep.avg_reward();
    rec.reward_total = ep.reward_total;
    rec.bound_value = std::numeric_limits<double>::quiet_NaN();
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    records.push_back(rec);
  }
  return records;
}

}  // namespace

std::vector<RunRecord> lfs_run(const BetaBernoulliEnv& env, const BoundConfig& cfg, std::size_t n,
                               std::size_t m, RandomStream& rng) {
  const ActionDistribution uniform = ActionDistribution::uniform(env.num_actions());
  return baseline_run(env, cfg, n, m, rng, [&] { return uniform; }, [](const ActionDistribution&) {});
}

std::vector<RunRecord> arr_run(const BetaBernoulliEnv& env, const BoundConfig& cfg, std::size_t n,
                               std::size_t m, RandomStream& rng) {
  ArrPrior arr(env.num_actions());
  return baseline_run(env, cfg, n, m, rng, [&] { return arr.prior(); },
                      [&](const ActionDistribution& q) { arr.observe(q); });
}

}  // namespace lbandit
