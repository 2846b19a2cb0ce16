#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lbandit {

/// Probability vector over K >= 2 actions. Entries are nonnegative and sum to
/// one within 1e-9; the constructor enforces both.
class ActionDistribution {
 public:
  explicit ActionDistribution(std::vector<double> probs);

  static ActionDistribution uniform(std::size_t num_actions);
  static ActionDistribution point_mass(std::size_t num_actions, std::size_t action);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t a) const { return probs_[a]; }
  std::span<const double> probs() const { return probs_; }

  friend bool operator==(const ActionDistribution&, const ActionDistribution&) = default;

 private:
  std::vector<double> probs_;
};

/// Unconstrained logits; entries must be finite.
class WeightVector {
 public:
  explicit WeightVector(std::vector<double> w);

  std::size_t size() const { return w_.size(); }
  double operator[](std::size_t a) const { return w_[a]; }
  std::span<const double> values() const { return w_; }

 private:
  std::vector<double> w_;
};

/// Diagonal Gaussian N(mean, diag(exp(log_std))^2).
struct GaussianDiag {
  std::vector<double> mean;
  std::vector<double> log_std;

  static GaussianDiag standard(std::size_t dim);
  static GaussianDiag from_std(std::vector<double> mean, const std::vector<double>& std_dev);

  std::size_t size() const { return mean.size(); }
  double std_dev(std::size_t k) const;
  /// Throws invalid_input_error on size mismatch or non-finite entries.
  void validate() const;
  /// Full log-density including the normalizing constant.
  double log_density(std::span<const double> w) const;
};

ActionDistribution softmax(const WeightVector& w);
/// Max-shifted softmax on raw spans, for hot loops. out.size() == w.size().
void softmax_into(std::span<const double> w, std::span<double> out);
/// log(sum(exp(x))), stable for any finite x.
double log_sum_exp(std::span<const double> x);

/// sum_a q[a] ln(q[a]/p[a]) with 0 ln 0 = 0. Throws divergence_error if
/// q[a] > 0 where p[a] = 0.
double kl_discrete(const ActionDistribution& q, const ActionDistribution& p);

double kl_gaussian_diag(const GaussianDiag& q, const GaussianDiag& p);

/// (1 - eps) q + eps * uniform; every entry is at least eps / K.
ActionDistribution epsilon_soft(const ActionDistribution& q, double eps);

}  // namespace lbandit
