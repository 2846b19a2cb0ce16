#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "lbandit/rng.hpp"

namespace lbandit {

struct BetaShape {
  double alpha;
  double beta;
  double mean() const { return alpha / (alpha + beta); }
};

/// Task environment: arm a's success probability is drawn from
/// Beta(alpha_a, beta_a), independently across arms.
class BetaBernoulliEnv {
 public:
  explicit BetaBernoulliEnv(std::vector<BetaShape> shapes);

  std::size_t num_actions() const { return shapes_.size(); }
  const std::vector<BetaShape>& shapes() const { return shapes_; }

 private:
  std::vector<BetaShape> shapes_;
};

enum class EnvironmentId { env1, env2, env3 };

EnvironmentId parse_environment_id(std::string_view id);
BetaBernoulliEnv builtin_environment(EnvironmentId id);
BetaBernoulliEnv builtin_environment(std::string_view id);

/// One bandit task: per-arm Bernoulli success probabilities.
struct Task {
  std::vector<double> p;

  explicit Task(std::vector<double> probs);
  std::size_t num_actions() const { return p.size(); }
};

Task sample_task(const BetaBernoulliEnv& env, RandomStream& rng);
/// 1 with probability task.p[a], else 0.
int sample_reward(const Task& task, std::size_t a, RandomStream& rng);

}  // namespace lbandit
