#include "lbandit/core_math.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lbandit/error.hpp"

namespace lbandit {

namespace {

constexpr double kSumTolerance = 1e-9;

}  // namespace

ActionDistribution::ActionDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.size() < 2) throw invalid_input_error("action distribution needs at least 2 actions");
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw invalid_input_error("action probabilities must be finite and nonnegative");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kSumTolerance) {
    throw invalid_input_error("action probabilities sum to " + std::to_string(total) + ", not 1");
  }
}

ActionDistribution ActionDistribution::uniform(std::size_t num_actions) {
  if (num_actions < 2) throw invalid_input_error("action distribution needs at least 2 actions");
  return ActionDistribution(std::vector<double>(num_actions, 1.0 / static_cast<double>(num_actions)));
}

ActionDistribution ActionDistribution::point_mass(std::size_t num_actions, std::size_t action) {
  if (action >= num_actions) throw invalid_input_error("point mass action out of range");
  std::vector<double> p(num_actions, 0.0);
  p[action] = 1.0;
  return ActionDistribution(std::move(p));
}

WeightVector::WeightVector(std::vector<double> w) : w_(std::move(w)) {
  for (double x : w_) {
    if (!std::isfinite(x)) throw invalid_input_error("weight vector has a non-finite entry");
  }
}

GaussianDiag GaussianDiag::standard(std::size_t dim) {
  return GaussianDiag{std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
}

GaussianDiag GaussianDiag::from_std(std::vector<double> mean, const std::vector<double>& std_dev) {
  if (mean.size() != std_dev.size()) throw invalid_input_error("mean/std size mismatch");
  std::vector<double> log_std(std_dev.size());
  for (std::size_t k = 0; k < std_dev.size(); ++k) {
    if (!(std_dev[k] > 0.0)) throw invalid_input_error("standard deviations must be positive");
    log_std[k] = std::log(std_dev[k]);
  }
  GaussianDiag g{std::move(mean), std::move(log_std)};
  g.validate();
  return g;
}

double GaussianDiag::std_dev(std::size_t k) const { return std::exp(log_std[k]); }

void GaussianDiag::validate() const {
  if (mean.size() != log_std.size()) throw invalid_input_error("gaussian mean/log_std size mismatch");
  for (std::size_t k = 0; k < mean.size(); ++k) {
    if (!std::isfinite(mean[k]) || !std::isfinite(log_std[k])) {
      throw invalid_input_error("gaussian parameters must be finite");
    }
  }
}

double GaussianDiag::log_density(std::span<const double> w) const {
  if (w.size() != size()) throw invalid_input_error("gaussian log_density: dimension mismatch");
  constexpr double kHalfLog2Pi = 0.91893853320467274178;
  double total = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double z = (w[k] - mean[k]) * std::exp(-log_std[k]);
    total += -0.5 * z * z - log_std[k] - kHalfLog2Pi;
  }
  return total;
}

void softmax_into(std::span<const double> w, std::span<double> out) {
  const double mx = *std::max_element(w.begin(), w.end());
  double z = 0.0;
  for (std::size_t a = 0; a < w.size(); ++a) {
    out[a] = std::exp(w[a] - mx);
    z += out[a];
  }
  const double inv = 1.0 / z;
  for (double& p : out) p *= inv;
}

ActionDistribution softmax(const WeightVector& w) {
  if (w.size() < 2) throw invalid_input_error("softmax needs at least 2 weights");
  std::vector<double> p(w.size());
  softmax_into(w.values(), p);
  return ActionDistribution(std::move(p));
}

double log_sum_exp(std::span<const double> x) {
  if (x.empty()) throw invalid_input_error("log_sum_exp of an empty range");
  const double mx = *std::max_element(x.begin(), x.end());
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double v : x) s += std::exp(v - mx);
  return mx + std::log(s);
}

double kl_discrete(const ActionDistribution& q, const ActionDistribution& p) {
  if (q.size() != p.size()) throw invalid_input_error("kl_discrete: dimension mismatch");
  double kl = 0.0;
  for (std::size_t a = 0; a < q.size(); ++a) {
    if (q[a] == 0.0) continue;
    if (p[a] == 0.0) {
      throw divergence_error("kl_discrete: q has mass on action " + std::to_string(a) +
                             " where p has none");
    }
    kl += q[a] * std::log(q[a] / p[a]);
  }
  // rounding can leave a -1e-17 residue when q == p
  return std::max(kl, 0.0);
}

double kl_gaussian_diag(const GaussianDiag& q, const GaussianDiag& p) {
  if (q.size() != p.size()) throw invalid_input_error("kl_gaussian_diag: dimension mismatch");
  q.validate();
  p.validate();
  double kl = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) {
    const double var_ratio = std::exp(2.0 * (q.log_std[k] - p.log_std[k]));
    const double d = (q.mean[k] - p.mean[k]) * std::exp(-p.log_std[k]);
    kl += (p.log_std[k] - q.log_std[k]) + 0.5 * (var_ratio + d * d) - 0.5;
  }
  return kl;
}

ActionDistribution epsilon_soft(const ActionDistribution& q, double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw invalid_input_error("epsilon must lie in [0, 1]");
  const double floor = eps / static_cast<double>(q.size());
  std::vector<double> b(q.size());
  for (std::size_t a = 0; a < q.size(); ++a) b[a] = (1.0 - eps) * q[a] + floor;
  return ActionDistribution(std::move(b));
}

}  // namespace lbandit
