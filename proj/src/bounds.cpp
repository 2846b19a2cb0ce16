#include "lbandit/bounds.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "lbandit/error.hpp"

namespace lbandit {

BoundKind parse_bound_kind(std::string_view s) {
  if (s == "bernstein") return BoundKind::bernstein;
  if (s == "clipping" || s == "clip") return BoundKind::clipping;
  throw invalid_input_error("unknown bound kind '" + std::string(s) + "'");
}

std::string_view to_string(BoundKind kind) {
  return kind == BoundKind::bernstein ? "bernstein" : "clipping";
}

double BoundConfig::lambda1() const { return t1 * std::sqrt(static_cast<double>(n)); }
double BoundConfig::lambda2() const { return t2 * std::sqrt(static_cast<double>(m)); }
double BoundConfig::b_min() const { return epsilon / static_cast<double>(num_actions); }

bool BoundConfig::lambda2_constraint_holds() const {
  // Relative slack so T2 = epsilon sqrt(m) / K, the largest allowed value, passes.
  return lambda2() <= static_cast<double>(m) * b_min() * (1.0 + 1e-12);
}

BoundConfig BoundConfig::with_task_count(std::size_t tasks) const {
  BoundConfig c = *this;
  c.n = tasks;
  return c;
}

void BoundConfig::validate() const {
  if (!(delta > 0.0 && delta <= 1.0)) throw invalid_input_error("delta must lie in (0, 1]");
  if (!(t1 > 0.0) || !std::isfinite(t1)) throw invalid_input_error("T1 must be positive");
  if (!(t2 > 0.0) || !std::isfinite(t2)) throw invalid_input_error("T2 must be positive");
  if (n == 0 || m == 0) throw invalid_input_error("task count and horizon must be at least 1");
  if (num_actions < 2) throw invalid_input_error("bound needs at least 2 actions");
  if (!std::isfinite(c_n)) throw invalid_input_error("c_n must be finite");
  if (kind == BoundKind::bernstein) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw invalid_input_error("epsilon must lie in [0, 1]");
    if (enforce_lambda2_constraint && !lambda2_constraint_holds()) {
      throw constraint_violation_error(
          "Bernstein constraint lambda2 <= m * epsilon / K violated: lambda2 = T2*sqrt(m) = " +
          std::to_string(lambda2()) + " > " + std::to_string(static_cast<double>(m) * b_min()));
    }
  } else if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw invalid_input_error("clip level tau must be positive");
  }
}

double hyper_kl_coefficient(const BoundConfig& cfg) {
  return 1.0 / cfg.lambda1() + 1.0 / (static_cast<double>(cfg.n) * cfg.lambda2());
}

double task_kl_coefficient(const BoundConfig& cfg) {
  return 1.0 / (static_cast<double>(cfg.n) * static_cast<double>(cfg.m) * cfg.lambda2());
}

namespace {

PenaltyBreakdown breakdown_unchecked(const BoundInputs& inp, const BoundConfig& cfg) {
  const double n = static_cast<double>(cfg.n);
  const double m = static_cast<double>(cfg.m);
  const double l1 = cfg.lambda1();
  const double l2 = cfg.lambda2();
  PenaltyBreakdown b;
  b.empirical_reward = inp.empirical_multitask_reward;
  b.hyper_kl = -hyper_kl_coefficient(cfg) * inp.kl_hyper;
  b.task_kl = -task_kl_coefficient(cfg) * inp.expected_task_kl_sum;
  b.c_n = -cfg.c_n;
  b.transfer_slack = -l1 / (8.0 * n);
  if (cfg.kind == BoundKind::bernstein) {
    b.estimator_slack = -l2 * (std::numbers::e - 2.0) / (cfg.b_min() * m);
  } else {
    b.estimator_slack = -l2 * (1.0 + cfg.tau) * (1.0 + cfg.tau) / (8.0 * m);
  }
  b.confidence_transfer = -std::log(2.0 / cfg.delta) / l1;
  b.confidence_task = -std::log(2.0 * m / cfg.delta) / (n * l2);
  return b;
}

void check_inputs(const BoundInputs& inp) {
  if (!(inp.kl_hyper >= 0.0) || !(inp.expected_task_kl_sum >= 0.0)) {
    throw invalid_input_error("KL inputs to a bound must be nonnegative");
  }
}

}  // namespace

double PenaltyBreakdown::total() const {
  return empirical_reward + hyper_kl + task_kl + c_n + transfer_slack + estimator_slack +
         confidence_transfer + confidence_task;
}

double constant_penalty(const BoundConfig& cfg) {
  cfg.validate();
  const PenaltyBreakdown b = breakdown_unchecked(BoundInputs{}, cfg);
  return -(b.c_n + b.transfer_slack + b.estimator_slack + b.confidence_transfer + b.confidence_task);
}

PenaltyBreakdown penalty_breakdown(const BoundInputs& inp, const BoundConfig& cfg) {
  cfg.validate();
  check_inputs(inp);
  return breakdown_unchecked(inp, cfg);
}

double bernstein_lower_bound(const BoundInputs& inp, const BoundConfig& cfg) {
  if (cfg.kind != BoundKind::bernstein) throw invalid_input_error("config is not a Bernstein bound");
  return penalty_breakdown(inp, cfg).total();
}

double clipping_lower_bound(const BoundInputs& inp, const BoundConfig& cfg) {
  if (cfg.kind != BoundKind::clipping) throw invalid_input_error("config is not a clipping bound");
  return penalty_breakdown(inp, cfg).total();
}

double lower_bound(const BoundInputs& inp, const BoundConfig& cfg) {
  return penalty_breakdown(inp, cfg).total();
}

}  // namespace lbandit
