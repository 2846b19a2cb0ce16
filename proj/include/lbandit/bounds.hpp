#pragma once

#include <cstddef>
#include <string_view>

namespace lbandit {

enum class BoundKind { bernstein, clipping };

BoundKind parse_bound_kind(std::string_view s);
std::string_view to_string(BoundKind kind);

/// Constants of the two lower bounds on marginal transfer reward. The free
/// parameters are lambda1 = T1 sqrt(n) and lambda2 = T2 sqrt(m).
struct BoundConfig {
  double delta = 0.05;
  double t1 = 1.0;
  double t2 = 1.0;
  /// Exploration floor of the epsilon-soft behaviour policy (Bernstein).
  double epsilon = 0.05;
  /// Importance-weight clip level (clipping).
  double tau = 0.1;
  double c_n = 0.0;
  BoundKind kind = BoundKind::clipping;
  std::size_t n = 1;
  std::size_t m = 1;
  std::size_t num_actions = 2;
  /// When false, a Bernstein configuration with lambda2 > m * epsilon / K is
  /// still evaluated; the result is then the formula's value, not a valid
  /// high-probability bound.
  bool enforce_lambda2_constraint = true;

  double lambda1() const;
  double lambda2() const;
  /// epsilon / K, the guaranteed minimum behaviour probability.
  double b_min() const;
  bool lambda2_constraint_holds() const;

  /// Same constants with a different task count.
  BoundConfig with_task_count(std::size_t tasks) const;

  /// Throws invalid_input_error for out-of-range fields and
  /// constraint_violation_error for an enforced, violated lambda2 constraint.
  void validate() const;
};

/// The three data-dependent quantities entering either bound.
struct BoundInputs {
  double empirical_multitask_reward = 0.0;
  double kl_hyper = 0.0;
  /// E_{P~Q} sum_i sum_j KL(A(D_i^{:j-1}, P) || P).
  double expected_task_kl_sum = 0.0;
};

/// Each additive term of a bound, signed so that total() is the bound.
struct PenaltyBreakdown {
  double empirical_reward = 0.0;
  double hyper_kl = 0.0;        // -(1/lambda1 + 1/(n lambda2)) KL(Q||P)
  double task_kl = 0.0;         // -1/(n m lambda2) E sum KL
  double c_n = 0.0;             // -c_n
  double transfer_slack = 0.0;  // -lambda1 / (8n)
  double estimator_slack = 0.0; // Bernstein: -lambda2 (e-2) / (b_min m); clipping: -lambda2 (1+tau)^2 / (8m)
  double confidence_transfer = 0.0;  // -ln(2/delta) / lambda1
  double confidence_task = 0.0;      // -ln(2m/delta) / (n lambda2)

  double total() const;
};

/// Coefficient multiplying KL(Q||P): 1/lambda1 + 1/(n lambda2).
double hyper_kl_coefficient(const BoundConfig& cfg);
/// Coefficient multiplying the expected task-KL sum: 1/(n m lambda2).
double task_kl_coefficient(const BoundConfig& cfg);
/// Sum of all data-independent penalties (positive number).
double constant_penalty(const BoundConfig& cfg);

double bernstein_lower_bound(const BoundInputs& inp, const BoundConfig& cfg);
double clipping_lower_bound(const BoundInputs& inp, const BoundConfig& cfg);
/// Dispatches on cfg.kind.
double lower_bound(const BoundInputs& inp, const BoundConfig& cfg);
PenaltyBreakdown penalty_breakdown(const BoundInputs& inp, const BoundConfig& cfg);

}  // namespace lbandit
