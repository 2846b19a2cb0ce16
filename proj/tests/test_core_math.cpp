#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "lbandit/core_math.hpp"
#include "lbandit/error.hpp"
#include "lbandit/rng.hpp"

using namespace lbandit;

namespace {

ActionDistribution random_dist(RandomStream& rng, std::size_t k) {
  std::vector<double> p(k);
  double z = 0.0;
  for (double& x : p) {
    x = rng.gamma(0.7);
    z += x;
  }
  for (double& x : p) x /= z;
  return ActionDistribution(p);
}

// Simpson's rule for KL(N(mq, sq^2) || N(mp, sp^2)) on a wide grid.
double kl_gaussian_numeric(double mq, double sq, double mp, double sp) {
  const double lo = mq - 14 * sq;
  const double hi = mq + 14 * sq;
  const int n = 20000;
  const double h = (hi - lo) / n;
  auto f = [&](double x) {
    const double lq = -0.5 * std::pow((x - mq) / sq, 2) - std::log(sq);
    const double lp = -0.5 * std::pow((x - mp) / sp, 2) - std::log(sp);
    return std::exp(lq) / std::sqrt(2 * std::numbers::pi) * (lq - lp);
  };
  double s = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) s += f(lo + i * h) * (i % 2 ? 4 : 2);
  return s * h / 3;
}

}  // namespace

TEST_CASE("action distribution rejects invalid vectors") {
  CHECK_THROWS_AS(ActionDistribution({1.0}), invalid_input_error);
  CHECK_THROWS_AS(ActionDistribution({0.5, 0.6}), invalid_input_error);
  CHECK_THROWS_AS(ActionDistribution({1.2, -0.2}), invalid_input_error);
  CHECK_NOTHROW(ActionDistribution({0.5, 0.5 + 5e-10}));
}

TEST_CASE("softmax") {
  SUBCASE("zero and constant weights give uniform") {
    for (double c : {0.0, 3.7, -250.0}) {
      const ActionDistribution p = softmax(WeightVector(std::vector<double>(4, c)));
      for (double x : p.probs()) CHECK(x == doctest::Approx(0.25).epsilon(1e-15));
    }
  }
  SUBCASE("log weights recover proportions") {
    const ActionDistribution p = softmax(WeightVector({std::log(1.0), std::log(2.0), std::log(3.0)}));
    CHECK(p[0] == doctest::Approx(1.0 / 6).epsilon(1e-14));
    CHECK(p[1] == doctest::Approx(2.0 / 6).epsilon(1e-14));
    CHECK(p[2] == doctest::Approx(3.0 / 6).epsilon(1e-14));
  }
  SUBCASE("non-finite input") {
    CHECK_THROWS_AS(WeightVector({0.0, std::numeric_limits<double>::quiet_NaN()}), invalid_input_error);
    CHECK_THROWS_AS(WeightVector({0.0, std::numeric_limits<double>::infinity()}), invalid_input_error);
  }
  SUBCASE("sums to one and keeps the argmax") {
    RandomStream rng(11);
    for (int t = 0; t < 1000; ++t) {
      std::vector<double> w(2 + t % 19);
      for (double& x : w) x = 30.0 * rng.normal();
      const ActionDistribution p = softmax(WeightVector(w));
      double s = 0.0;
      for (double x : p.probs()) s += x;
      CHECK(std::abs(s - 1.0) < 1e-9);
      CHECK(std::max_element(w.begin(), w.end()) - w.begin() ==
            std::max_element(p.probs().begin(), p.probs().end()) - p.probs().begin());
    }
  }
}

TEST_CASE("kl_discrete") {
  const ActionDistribution q({0.5, 0.5});
  CHECK(kl_discrete(q, q) == 0.0);
  CHECK(kl_discrete(ActionDistribution({1.0, 0.0}), q) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(kl_discrete(q, ActionDistribution({0.25, 0.75})) ==
        doctest::Approx(0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0)).epsilon(1e-14));
  CHECK_THROWS_AS(kl_discrete(q, ActionDistribution({1.0, 0.0})), divergence_error);
  CHECK_THROWS_AS(kl_discrete(q, ActionDistribution::uniform(3)), invalid_input_error);

  RandomStream rng(12);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t k = 2 + t % 7;
    const ActionDistribution a = random_dist(rng, k);
    const ActionDistribution b = random_dist(rng, k);
    CHECK(kl_discrete(a, b) >= 0.0);
    CHECK(kl_discrete(a, a) <= 1e-12);
    if (a != b) CHECK(kl_discrete(a, b) > 0.0);
  }
}

TEST_CASE("kl_gaussian_diag") {
  const GaussianDiag std1 = GaussianDiag::standard(1);
  CHECK(kl_gaussian_diag(std1, std1) == 0.0);
  CHECK(kl_gaussian_diag(GaussianDiag::from_std({1.0}, {1.0}), std1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(kl_gaussian_diag(GaussianDiag{{0.0}, {1.0}}, std1) ==
        doctest::Approx(-1.5 + std::exp(2.0) / 2.0).epsilon(1e-14));
  CHECK_THROWS_AS(kl_gaussian_diag(std1, GaussianDiag::standard(2)), invalid_input_error);

  RandomStream rng(13);
  for (int t = 0; t < 10; ++t) {
    const double mq = rng.normal(), sq = std::exp(0.5 * rng.normal());
    const double mp = rng.normal(), sp = std::exp(0.5 * rng.normal());
    const double closed = kl_gaussian_diag(GaussianDiag::from_std({mq}, {sq}), GaussianDiag::from_std({mp}, {sp}));
    CHECK(std::abs(closed - kl_gaussian_numeric(mq, sq, mp, sp)) < 1e-6);
  }
}

TEST_CASE("epsilon_soft") {
  const ActionDistribution q({1.0, 0.0});
  CHECK(epsilon_soft(q, 0.0) == q);
  CHECK(epsilon_soft(q, 1.0) == ActionDistribution::uniform(2));
  const ActionDistribution s = epsilon_soft(q, 0.2);
  CHECK(s[0] == doctest::Approx(0.9));
  CHECK(s[1] == doctest::Approx(0.1));
  CHECK_THROWS_AS(epsilon_soft(q, -0.1), invalid_input_error);
  CHECK_THROWS_AS(epsilon_soft(q, 1.5), invalid_input_error);

  RandomStream rng(14);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t k = 2 + t % 19;
    const double eps = rng.uniform();
    const ActionDistribution e = epsilon_soft(random_dist(rng, k), eps);
    for (double x : e.probs()) CHECK(x >= eps / double(k) - 1e-15);
  }
}

TEST_CASE("gaussian log density matches the univariate formula") {
  const GaussianDiag g = GaussianDiag::from_std({1.0, -2.0}, {0.5, 3.0});
  const double x0 = 0.3, x1 = 1.0;
  auto ld = [](double x, double mu, double s) {
    return -0.5 * std::pow((x - mu) / s, 2) - std::log(s) - 0.5 * std::log(2 * std::numbers::pi);
  };
  const std::vector<double> x{x0, x1};
  CHECK(g.log_density(x) == doctest::Approx(ld(x0, 1.0, 0.5) + ld(x1, -2.0, 3.0)).epsilon(1e-14));
}
