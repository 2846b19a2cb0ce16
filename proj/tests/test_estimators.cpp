#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "lbandit/error.hpp"
#include "lbandit/estimators.hpp"
#include "oracles.hpp"

using namespace lbandit;

namespace {

// Visits every (action, reward) sequence of length m under a fixed behaviour
// policy b on a Bernoulli task p, passing the sequence and its probability.
void enumerate(const std::vector<double>& b, const std::vector<double>& p, std::size_t m,
               const std::function<void(const TaskDataset&, double)>& visit) {
  const std::size_t k = b.size();
  const std::size_t outcomes = 2 * k;
  std::size_t total = 1;
  for (std::size_t j = 0; j < m; ++j) total *= outcomes;
  for (std::size_t code = 0; code < total; ++code) {
    TaskDataset d(k);
    double prob = 1.0;
    std::size_t c = code;
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t o = c % outcomes;
      c /= outcomes;
      const std::size_t a = o / 2;
      const int r = static_cast<int>(o % 2);
      prob *= b[a] * (r ? p[a] : 1.0 - p[a]);
      d.append({a, double(r), b[a]});
    }
    visit(d, prob);
  }
}

}  // namespace

TEST_CASE("iw estimate examples") {
  TaskDataset one(2);
  one.append({0, 1.0, 1.0});
  CHECK(iw_estimate_vector(one) == std::vector<double>{1.0, 0.0});

  TaskDataset two(2);
  two.append({0, 1.0, 0.5});
  two.append({1, 0.0, 0.5});
  CHECK(iw_estimate_vector(two) == std::vector<double>{1.0, 0.0});

  CHECK_THROWS_AS(iw_estimate_vector(TaskDataset(2)), invalid_input_error);
  CHECK_THROWS_AS(clipped_iw_estimate_vector(TaskDataset(2), 0.1), invalid_input_error);
  CHECK_THROWS_AS(clipped_iw_estimate_vector(one, 0.0), invalid_input_error);
}

TEST_CASE("dataset validation") {
  TaskDataset d(2);
  CHECK_THROWS_AS(d.append({2, 1.0, 0.5}), invalid_input_error);
  CHECK_THROWS_AS(d.append({0, 1.5, 0.5}), invalid_input_error);
  CHECK_THROWS_AS(d.append({0, 1.0, 0.0}), invalid_input_error);
  CHECK_THROWS_AS(d.append({0, 1.0, 1.1}), invalid_input_error);
}

TEST_CASE("clipped estimate examples") {
  TaskDataset d(2);
  d.append({0, 1.0, 0.1});
  CHECK(clipped_iw_estimate_vector(d, 0.5)[0] == doctest::Approx(1.5));

  TaskDataset wide(3);
  wide.append({0, 1.0, 0.8});
  wide.append({2, 1.0, 0.9});
  wide.append({1, 0.0, 0.7});
  CHECK(clipped_iw_estimate_vector(wide, 0.5) == iw_estimate_vector(wide));
}

TEST_CASE("exhaustive enumeration: unbiased and clipped-low") {
  const std::vector<std::vector<double>> behaviours{{0.5, 0.5}, {0.2, 0.8}, {0.9, 0.1}};
  const std::vector<std::vector<double>> tasks{{0.3, 0.9}, {0.5, 0.5}, {0.05, 0.7}};
  for (std::size_t m = 1; m <= 3; ++m) {
    for (const auto& b : behaviours) {
      for (const auto& p : tasks) {
        std::vector<double> e_iw(2, 0.0), e_clip(2, 0.0);
        double mass = 0.0;
        enumerate(b, p, m, [&](const TaskDataset& d, double prob) {
          const auto iw = iw_estimate_vector(d);
          const auto cl = clipped_iw_estimate_vector(d, 0.2);
          for (std::size_t a = 0; a < 2; ++a) {
            e_iw[a] += prob * iw[a];
            e_clip[a] += prob * cl[a];
          }
          mass += prob;
        });
        CHECK(std::abs(mass - 1.0) < 1e-12);
        for (std::size_t a = 0; a < 2; ++a) {
          CHECK(std::abs(e_iw[a] - p[a]) <= 1e-12);
          CHECK(e_clip[a] <= p[a] + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("random datasets: clipped <= plain, permutation invariance, oracle agreement") {
  RandomStream rng(31);
  for (int t = 0; t < 200; ++t) {
    const std::size_t k = 2 + t % 6;
    TaskDataset d = fixtures::random_tasks(1, 1 + t % 25, k, rng).front();
    const double tau = 0.01 + 2.0 * rng.uniform();
    const auto iw = iw_estimate_vector(d);
    const auto cl = clipped_iw_estimate_vector(d, tau);
    const auto o_iw = oracle::iw_estimate(d, false, tau);
    const auto o_cl = oracle::iw_estimate(d, true, tau);
    for (std::size_t a = 0; a < k; ++a) {
      CHECK(cl[a] <= iw[a]);
      CHECK(iw[a] >= 0.0);
      CHECK(iw[a] == doctest::Approx(o_iw[a]).epsilon(1e-12));
      CHECK(cl[a] == doctest::Approx(o_cl[a]).epsilon(1e-12));
    }
    std::vector<Step> steps = d.steps();
    std::reverse(steps.begin(), steps.end());
    std::rotate(steps.begin(), steps.begin() + steps.size() / 2, steps.end());
    TaskDataset shuffled(k);
    for (const Step& s : steps) shuffled.append(s);
    const auto iw2 = iw_estimate_vector(shuffled);
    for (std::size_t a = 0; a < k; ++a) CHECK(iw2[a] == doctest::Approx(iw[a]).epsilon(1e-14));
  }
}

TEST_CASE("estimate_under_policy and true_reward") {
  const std::vector<double> est{0.4, 0.8};
  CHECK(estimate_under_policy(est, ActionDistribution({0.25, 0.75})) == doctest::Approx(0.7));
  CHECK(estimate_under_policy(est, ActionDistribution::point_mass(2, 1)) == 0.8);
  CHECK(estimate_under_policy(est, ActionDistribution::uniform(2)) == doctest::Approx(0.6));
  CHECK_THROWS_AS(estimate_under_policy(est, ActionDistribution::uniform(3)), invalid_input_error);

  std::vector<double> env1_means(10, 0.2);
  env1_means[8] = env1_means[9] = 0.8;
  CHECK(true_reward(Task(env1_means), ActionDistribution::uniform(10)) == doctest::Approx(0.32));
  CHECK(true_reward(Task({0.3, 0.9}), ActionDistribution::point_mass(2, 0)) == 0.3);
  CHECK(true_reward(Task({0.3, 0.9}), ActionDistribution::point_mass(2, 1)) == 0.9);
}

TEST_CASE("sufficient stats") {
  TaskDataset d(3);
  d.append({0, 1.0, 0.5});
  d.append({2, 0.0, 0.5});
  d.append({0, 1.0, 0.5});
  const SufficientStats s = SufficientStats::of(d);
  CHECK(s.counts == std::vector<std::size_t>{2, 0, 1});
  CHECK(s.reward_sums == std::vector<double>{2.0, 0.0, 0.0});
  CHECK(s.total_count() == 3);
  const SufficientStats p = SufficientStats::of_prefix(d, 2);
  CHECK(p.counts == std::vector<std::size_t>{1, 0, 1});
}
