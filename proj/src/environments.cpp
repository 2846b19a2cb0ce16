#include "lbandit/environments.hpp"

#include <cmath>
#include <string>

#include "lbandit/error.hpp"

namespace lbandit {

BetaBernoulliEnv::BetaBernoulliEnv(std::vector<BetaShape> shapes) : shapes_(std::move(shapes)) {
  if (shapes_.size() < 2) throw invalid_input_error("environment needs at least 2 actions");
  for (const auto& s : shapes_) {
    if (!(s.alpha > 0.0) || !(s.beta > 0.0) || !std::isfinite(s.alpha) || !std::isfinite(s.beta)) {
      throw invalid_input_error("beta shape parameters must be positive and finite");
    }
  }
}

EnvironmentId parse_environment_id(std::string_view id) {
  if (id == "env1") return EnvironmentId::env1;
  if (id == "env2") return EnvironmentId::env2;
  if (id == "env3") return EnvironmentId::env3;
  throw invalid_input_error("unknown environment id '" + std::string(id) + "'");
}

BetaBernoulliEnv builtin_environment(EnvironmentId id) {
  std::vector<BetaShape> shapes;
  switch (id) {
    case EnvironmentId::env1:
      shapes.assign(8, {5.0, 20.0});
      shapes.insert(shapes.end(), 2, {20.0, 5.0});
      break;
    case EnvironmentId::env2:
      shapes.assign(16, {5.0, 20.0});
      shapes.insert(shapes.end(), 4, {20.0, 5.0});
      break;
    case EnvironmentId::env3:
      shapes.assign(10, {1.0, 4.0});
      // means rise linearly from 0.2 to 0.8 with alpha + beta = 25
      for (int j = 0; j < 10; ++j) {
        const double mean = 0.2 + 0.6 * j / 9.0;
        shapes.push_back({25.0 * mean, 25.0 * (1.0 - mean)});
      }
      break;
  }
  return BetaBernoulliEnv(std::move(shapes));
}

BetaBernoulliEnv builtin_environment(std::string_view id) {
  return builtin_environment(parse_environment_id(id));
}

Task::Task(std::vector<double> probs) : p(std::move(probs)) {
  for (double x : p) {
    if (!(x >= 0.0 && x <= 1.0)) throw invalid_input_error("task probabilities must lie in [0, 1]");
  }
}

Task sample_task(const BetaBernoulliEnv& env, RandomStream& rng) {
  std::vector<double> p;
  p.reserve(env.num_actions());
  for (const auto& s : env.shapes()) p.push_back(rng.beta(s.alpha, s.beta));
  return Task(std::move(p));
}

int sample_reward(const Task& task, std::size_t a, RandomStream& rng) {
  if (a >= task.num_actions()) {
    throw invalid_input_error("action " + std::to_string(a) + " out of range");
  }
  return rng.bernoulli(task.p[a]) ? 1 : 0;
}

}  // namespace lbandit
