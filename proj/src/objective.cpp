#include "lbandit/objective.hpp"

#include <algorithm>
#include <cmath>

#include "lbandit/base_learner.hpp"
#include "lbandit/error.hpp"

namespace lbandit {

TaskSummary summarize_task(const TaskDataset& data, std::vector<double> estimate) {
  const std::size_t k = data.num_actions();
  const std::size_t m = data.size();
  if (m == 0) throw invalid_input_error("cannot summarize an empty task");
  if (estimate.size() != k) throw invalid_input_error("estimate vector has the wrong length");
  TaskSummary s;
  s.num_actions = k;
  s.horizon = m;
  s.estimate = std::move(estimate);
  s.exponents.resize(m * k);
  s.shifted_exp.resize(m * k);
  s.row_max.resize(m);
  SufficientStats stats(k);
  for (std::size_t j = 0; j < m; ++j) {
    const std::vector<double> e = posterior_exponents(stats, m);
    const double mx = *std::max_element(e.begin(), e.end());
    s.row_max[j] = mx;
    for (std::size_t a = 0; a < k; ++a) {
      s.exponents[j * k + a] = e[a];
      s.shifted_exp[j * k + a] = std::exp(e[a] - mx);
    }
    stats.add(data[j].action, data[j].reward);
  }
  return s;
}

TaskSummary summarize_task(const TaskDataset& data, BoundKind kind, double tau) {
  return summarize_task(data, kind == BoundKind::clipping ? clipped_iw_estimate_vector(data, tau)
                                                          : iw_estimate_vector(data));
}

namespace {

// Evaluates one term at weight vector w given the prefix row (exponents e,
// shifted exponentials ex, row max). Writes the weighted gradient with
// respect to w into grad (if non-null). prior/post are K-sized scratch.
//
//   P = softmax(w),  Q = softmax(w + e)
//   KL(Q||P) = sum_a Q_a e_a - log(sum_a P_a exp(e_a))
//   dR/dw_b  = Q_b (est_b - R)
//   dKL/dw_b = Q_b (e_b - Q.e) - Q_b + P_b
inline void eval_term(const double* w, const double* e, const double* ex, double emax,
                      const double* est, std::size_t k, const TermWeights& wt, double* prior,
                      double* post, double* grad, double& reward, double& kl) {
  double mx = w[0];
  for (std::size_t a = 1; a < k; ++a) mx = std::max(mx, w[a]);
  double zp = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    prior[a] = std::exp(w[a] - mx);
    zp += prior[a];
  }
  const double inv_zp = 1.0 / zp;
  double zq = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    prior[a] *= inv_zp;
    post[a] = prior[a] * ex[a];
    zq += post[a];
  }
  const double inv_zq = 1.0 / zq;
  double r = 0.0;
  double qe = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    post[a] *= inv_zq;
    r += post[a] * est[a];
    qe += post[a] * e[a];
  }
  reward = r;
  kl = qe - emax - std::log(zq);
  if (grad != nullptr) {
    for (std::size_t a = 0; a < k; ++a) {
      grad[a] = wt.reward * post[a] * (est[a] - r) - wt.kl * (post[a] * (e[a] - qe) - post[a] + prior[a]);
    }
  }
}

void check_tasks(std::span<const TaskSummary> tasks, std::size_t k) {
  if (tasks.empty()) throw invalid_input_error("objective needs at least one task");
  const std::size_t m = tasks.front().horizon;
  for (const auto& t : tasks) {
    if (t.num_actions != k) throw invalid_input_error("task summary has the wrong action count");
    if (t.horizon != m) throw invalid_input_error("task summaries must share one horizon");
  }
}

void check_reparam_shapes(const GaussianDiag& theta, std::span<const TaskSummary> tasks,
                          std::span<const double> noise, std::span<double> grad_mean,
                          std::span<double> grad_log_std) {
  const std::size_t k = theta.size();
  if (theta.log_std.size() != k) throw invalid_input_error("theta mean/log_std size mismatch");
  check_tasks(tasks, k);
  if (noise.size() != tasks.size() * tasks.front().horizon * k) {
    throw invalid_input_error("noise must hold one K-vector per (task, step) term");
  }
  if (grad_mean.size() != grad_log_std.size() || (!grad_mean.empty() && grad_mean.size() != k)) {
    throw invalid_input_error("gradient buffers must both be empty or both have K entries");
  }
}

// Sums over one task's m terms into out = [reward, kl, grad_mean(K), grad_log_std(K)].
void reparam_task(const GaussianDiag& theta, const std::vector<double>& sigma, const TaskSummary& t,
                  const double* noise, const TermWeights& wt, bool want_grad, double* out,
                  std::vector<double>& scratch) {
  const std::size_t k = t.num_actions;
  double* w = scratch.data();
  double* prior = w + k;
  double* post = prior + k;
  double* g = post + k;
  double* gm = out + 2;
  double* gs = gm + k;
  for (std::size_t j = 0; j < t.horizon; ++j) {
    const double* z = noise + j * k;
    for (std::size_t a = 0; a < k; ++a) w[a] = theta.mean[a] + sigma[a] * z[a];
    double r, kl;
    eval_term(w, t.exponents.data() + j * k, t.shifted_exp.data() + j * k, t.row_max[j],
              t.estimate.data(), k, wt, prior, post, want_grad ? g : nullptr, r, kl);
    out[0] += r;
    out[1] += kl;
    if (want_grad) {
      for (std::size_t a = 0; a < k; ++a) {
        gm[a] += g[a];
        gs[a] += g[a] * z[a] * sigma[a];
      }
    }
  }
}

}  // namespace

TermTotals reparam_terms_serial(const GaussianDiag& theta, std::span<const TaskSummary> tasks,
                                std::span<const double> noise, const TermWeights& weights,
                                std::span<double> grad_mean, std::span<double> grad_log_std) {
  check_reparam_shapes(theta, tasks, noise, grad_mean, grad_log_std);
  const std::size_t k = theta.size();
  const std::size_t m = tasks.front().horizon;
  const bool want_grad = !grad_mean.empty();
  std::fill(grad_mean.begin(), grad_mean.end(), 0.0);
  std::fill(grad_log_std.begin(), grad_log_std.end(), 0.0);
  std::vector<double> w(k), prior(k), post(k), g(k);
  TermTotals tot;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const TaskSummary& t = tasks[i];
    for (std::size_t j = 0; j < m; ++j) {
      const double* z = noise.data() + (i * m + j) * k;
      for (std::size_t a = 0; a < k; ++a) w[a] = theta.mean[a] + std::exp(theta.log_std[a]) * z[a];
      double r, kl;
      eval_term(w.data(), t.exponents.data() + j * k, t.shifted_exp.data() + j * k, t.row_max[j],
                t.estimate.data(), k, weights, prior.data(), post.data(),
                want_grad ? g.data() : nullptr, r, kl);
      tot.reward_sum += r;
      tot.kl_sum += kl;
      if (want_grad) {
        for (std::size_t a = 0; a < k; ++a) {
          grad_mean[a] += g[a];
          grad_log_std[a] += g[a] * z[a] * std::exp(theta.log_std[a]);
        }
      }
    }
  }
  return tot;
}

TermTotals reparam_terms(const GaussianDiag& theta, std::span<const TaskSummary> tasks,
                         std::span<const double> noise, const TermWeights& weights,
                         std::span<double> grad_mean, std::span<double> grad_log_std) {
  check_reparam_shapes(theta, tasks, noise, grad_mean, grad_log_std);
  const std::size_t k = theta.size();
  const std::size_t m = tasks.front().horizon;
  const std::size_t n = tasks.size();
  const bool want_grad = !grad_mean.empty();
  const std::size_t stride = 2 + 2 * k;
  std::vector<double> partial(n * stride, 0.0);
  std::vector<double> sigma(k);
  for (std::size_t a = 0; a < k; ++a) sigma[a] = std::exp(theta.log_std[a]);

#pragma omp parallel
  {
    std::vector<double> scratch(4 * k);
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
      const auto ui = static_cast<std::size_t>(i);
      reparam_task(theta, sigma, tasks[ui], noise.data() + ui * m * k, weights, want_grad,
                   partial.data() + ui * stride, scratch);
    }
  }

  TermTotals tot;
  std::fill(grad_mean.begin(), grad_mean.end(), 0.0);
  std::fill(grad_log_std.begin(), grad_log_std.end(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = partial.data() + i * stride;
    tot.reward_sum += p[0];
    tot.kl_sum += p[1];
    if (want_grad) {
      for (std::size_t a = 0; a < k; ++a) {
        grad_mean[a] += p[2 + a];
        grad_log_std[a] += p[2 + k + a];
      }
    }
  }
  return tot;
}

TermTotals shared_terms_serial(std::span<const double> w, std::span<const TaskSummary> tasks,
                               const TermWeights& weights, std::span<double> grad_w) {
  const std::size_t k = w.size();
  check_tasks(tasks, k);
  if (!grad_w.empty() && grad_w.size() != k) throw invalid_input_error("gradient buffer must have K entries");
  const bool want_grad = !grad_w.empty();
  std::fill(grad_w.begin(), grad_w.end(), 0.0);
  std::vector<double> prior(k), post(k), g(k);
  TermTotals tot;
  for (const TaskSummary& t : tasks) {
    for (std::size_t j = 0; j < t.horizon; ++j) {
      double r, kl;
      eval_term(w.data(), t.exponents.data() + j * k, t.shifted_exp.data() + j * k, t.row_max[j],
                t.estimate.data(), k, weights, prior.data(), post.data(),
                want_grad ? g.data() : nullptr, r, kl);
      tot.reward_sum += r;
      tot.kl_sum += kl;
      if (want_grad) {
        for (std::size_t a = 0; a < k; ++a) grad_w[a] += g[a];
      }
    }
  }
  return tot;
}

TermTotals shared_terms(std::span<const double> w, std::span<const TaskSummary> tasks,
                        const TermWeights& weights, std::span<double> grad_w) {
  const std::size_t k = w.size();
  check_tasks(tasks, k);
  if (!grad_w.empty() && grad_w.size() != k) throw invalid_input_error("gradient buffer must have K entries");
  const bool want_grad = !grad_w.empty();
  const std::size_t n = tasks.size();
  const std::size_t stride = 2 + k;
  std::vector<double> partial(n * stride, 0.0);

#pragma omp parallel
  {
    std::vector<double> prior(k), post(k), g(k);
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
      const TaskSummary& t = tasks[static_cast<std::size_t>(i)];
      double* out = partial.data() + static_cast<std::size_t>(i) * stride;
      for (std::size_t j = 0; j < t.horizon; ++j) {
        double r, kl;
        eval_term(w.data(), t.exponents.data() + j * k, t.shifted_exp.data() + j * k, t.row_max[j],
                  t.estimate.data(), k, weights, prior.data(), post.data(),
                  want_grad ? g.data() : nullptr, r, kl);
        out[0] += r;
        out[1] += kl;
        if (want_grad) {
          for (std::size_t a = 0; a < k; ++a) out[2 + a] += g[a];
        }
      }
    }
  }

  TermTotals tot;
  std::fill(grad_w.begin(), grad_w.end(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = partial.data() + i * stride;
    tot.reward_sum += p[0];
    tot.kl_sum += p[1];
    if (want_grad) {
      for (std::size_t a = 0; a < k; ++a) grad_w[a] += p[2 + a];
    }
  }
  return tot;
}

}  // namespace lbandit
