// Copyright 2026 The dpiw Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dpiw/metrics/metrics.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "dpiw/core/error.hpp"
#include "dpiw/core/math_util.hpp"
#include "dpiw/kernels/kernels.hpp"
#include "dpiw/ratio/logistic.hpp"

namespace dpiw::metrics {

namespace detail {

std::vector<double> pairwise_distances(const Dataset& a, const Dataset& b) {
  if (a.cols() != b.cols()) throw InputError("point clouds must share a dimension");
  std::vector<double> cost(a.rows() * b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto ra = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j)
      cost[i * b.rows() + j] = std::sqrt(kernels::sq_dist(ra.data(), b.row(j).data(), a.cols()));
  }
  return cost;
}

double transport_cost_exact(std::vector<double> cost, std::vector<double> supply,
                            std::vector<double> demand);

}  // namespace detail

std::vector<std::size_t> subsample_rows(std::size_t from, std::size_t count, RngStream rng) {
  if (count > from) throw InputError("cannot subsample more rows than available");
  auto perm = rng.permutation(from);
  perm.resize(count);
  std::sort(perm.begin(), perm.end());
  return perm;
}

double weighted_mmd2(const Dataset& synth, const WeightVector& w, const Dataset& real,
                     double bandwidth) {
  const std::size_t n = synth.rows();
  if (real.rows() != n)
    throw InputError("weighted MMD^2 needs equal sample sizes; subsample the larger set");
  if (n < 2) throw InputError("need at least two points per sample");
  if (w.size() != n) throw InputError("weights must have one entry per synthetic row");
  if (synth.cols() != real.cols()) throw InputError("samples must share a dimension");
  if (!(bandwidth > 0.0)) throw InputError("bandwidth must be positive");

  const auto weights = w.values_mean_one();
  const double inv2h2 = 1.0 / (2.0 * bandwidth * bandwidth);
  const std::size_t d = synth.cols();

  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = synth.row(i);
    const auto zi = real.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const auto xj = synth.row(j);
      const auto zj = real.row(j);
      const double k_xx = std::exp(-kernels::sq_dist(xi.data(), xj.data(), d) * inv2h2);
      const double k_zz = std::exp(-kernels::sq_dist(zi.data(), zj.data(), d) * inv2h2);
      const double k_xizj = std::exp(-kernels::sq_dist(xi.data(), zj.data(), d) * inv2h2);
      const double k_xjzi = std::exp(-kernels::sq_dist(xj.data(), zi.data(), d) * inv2h2);
      acc += weights[i] * weights[j] * k_xx + k_zz - weights[i] * k_xizj - weights[j] * k_xjzi;
    }
  }
  return acc / (static_cast<double>(n) * (static_cast<double>(n) - 1.0));
}

namespace {

// Log-domain Sinkhorn on one regularization level; returns the final
// marginal violation.
double sinkhorn_pass(const std::vector<double>& cost, const std::vector<double>& log_a,
                     const std::vector<double>& log_b, double reg, std::size_t iters, double tol,
                     std::vector<double>& f, std::vector<double>& g, std::size_t* used) {
  const std::size_t m = log_a.size();
  const std::size_t n = log_b.size();
  std::vector<double> scratch(std::max(m, n));
  double err = std::numeric_limits<double>::infinity();
  std::size_t it = 0;
  for (; it < iters; ++it) {
    for (std::size_t i = 0; i < m; ++i) {
      const double* crow = cost.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) scratch[j] = (g[j] - crow[j]) / reg;
      f[i] = reg * (log_a[i] - logsumexp({scratch.data(), n}));
    }
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < m; ++i) scratch[i] = (f[i] - cost[i * n + j]) / reg;
      g[j] = reg * (log_b[j] - logsumexp({scratch.data(), m}));
    }
    // Row marginals match exactly after the f update; check columns.
    err = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double* crow = cost.data() + i * n;
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) row += std::exp((f[i] + g[j] - crow[j]) / reg);
      err = std::max(err, std::fabs(row - std::exp(log_a[i])));
    }
    if (err < tol) break;
  }
  if (used) *used = it + 1;
  return err;
}

}  // namespace

double sinkhorn_wasserstein1(const Dataset& a, const std::vector<double>& mass_a,
                             const Dataset& b, const std::vector<double>& mass_b,
                             const WassersteinSettings& settings) {
  const std::size_t m = a.rows();
  const std::size_t n = b.rows();
  if (mass_a.size() != m || mass_b.size() != n)
    throw InputError("mass vectors must match point counts");
  const auto cost = detail::pairwise_distances(a, b);

  double ta = 0.0, tb = 0.0;
  for (double x : mass_a) ta += x;
  for (double x : mass_b) tb += x;
  std::vector<double> log_a(m), log_b(n);
  for (std::size_t i = 0; i < m; ++i) log_a[i] = std::log(mass_a[i] / ta);
  for (std::size_t j = 0; j < n; ++j) log_b[j] = std::log(mass_b[j] / tb);

  std::vector<double> f(m, 0.0), g(n, 0.0);

  // Annealed warm start: halve the regularization down to the target, then
  // run the final level to tolerance.
  double reg = std::max(settings.sinkhorn_reg, 1.0);
  while (reg > settings.sinkhorn_reg * 1.0001) {
    sinkhorn_pass(cost, log_a, log_b, reg, 50, settings.sinkhorn_tol, f, g, nullptr);
    reg = std::max(reg * 0.5, settings.sinkhorn_reg);
  }
  const double err = sinkhorn_pass(cost, log_a, log_b, settings.sinkhorn_reg,
                                   settings.sinkhorn_max_iters, settings.sinkhorn_tol, f, g,
                                   nullptr);
  if (!(err < settings.sinkhorn_tol))
    throw NonConvergenceError("Sinkhorn did not reach the marginal tolerance", err);

  // Round the plan onto the transport polytope before scoring so the value
  // is a feasible plan's cost.
  std::vector<double> plan(m * n);
  std::vector<double> row_sum(m, 0.0), col_sum(n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double p = std::exp((f[i] + g[j] - cost[i * n + j]) / settings.sinkhorn_reg);
      plan[i * n + j] = p;
      row_sum[i] += p;
    }
  for (std::size_t i = 0; i < m; ++i) {
    const double scale = std::min(1.0, std::exp(log_a[i]) / row_sum[i]);
    for (std::size_t j = 0; j < n; ++j) {
      plan[i * n + j] *= scale;
      col_sum[j] += plan[i * n + j];
    }
  }
  double missing = 0.0;
  std::vector<double> row_left(m, 0.0), col_left(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double r = std::exp(log_a[i]);
    for (std::size_t j = 0; j < n; ++j) r -= plan[i * n + j];
    row_left[i] = std::max(r, 0.0);
    missing += row_left[i];
  }
  for (std::size_t j = 0; j < n; ++j)
    col_left[j] = std::max(std::exp(log_b[j]) - col_sum[j], 0.0);
  double value = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    value += kernels::dot(plan.data() + i * n, cost.data() + i * n, n);
  if (missing > 0.0) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        value += row_left[i] * col_left[j] / missing * cost[i * n + j];
  }
  return value;
}

WassersteinResult weighted_wasserstein(const Dataset& synth, const WeightVector& w,
                                       const Dataset& real,
                                       const WassersteinSettings& settings) {
  if (w.size() != synth.rows()) throw InputError("weights must have one entry per synthetic row");
  const auto mass_synth = w.normalized();  // throws on non-finite or zero-sum weights
  const std::vector<double> mass_real(real.rows(), 1.0 / static_cast<double>(real.rows()));

  WassersteinResult result;
  if (std::max(synth.rows(), real.rows()) <= settings.exact_max_n) {
    result.value = exact_wasserstein1(synth, mass_synth, real, mass_real);
    result.method = "exact";
  } else {
    result.value = sinkhorn_wasserstein1(synth, mass_synth, real, mass_real, settings);
    result.method = "sinkhorn";
  }
  return result;
}

double auc_from_scores(std::span<const double> scores, std::span<const int> labels) {
  const std::size_t n = scores.size();
  if (labels.size() != n) throw InputError("scores and labels must have equal length");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&scores](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Average ranks across ties, then the Mann-Whitney statistic.
  std::vector<double> rank(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
    i = j + 1;
  }

  double rank_sum_pos = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (labels[k] == 1) {
      rank_sum_pos += rank[k];
      ++n_pos;
    }
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw InputError("AUC needs both classes present");
  return (rank_sum_pos - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1)) /
         (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double downstream_auc(const Dataset& synth, const WeightVector& w, const Dataset& real_test,
                      double lambda) {
  if (!synth.has_labels() || !real_test.has_labels())
    throw InputError("downstream AUC needs labelled training and test data");
  const auto model =
      ratio::fit_logistic_l2_weighted(synth, synth.labels(), w.values_mean_one(), lambda);
  std::vector<double> scores(real_test.rows());
  for (std::size_t i = 0; i < real_test.rows(); ++i) scores[i] = model.logit(real_test.row(i));
  return auc_from_scores(scores, real_test.labels());
}

double mahalanobis(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                   const Eigen::MatrixXd& cov) {
  if (a.size() != b.size() || cov.rows() != a.size() || cov.cols() != a.size())
    throw InputError("mahalanobis: dimension mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw InputError("covariance must be symmetric positive definite");
  const Eigen::VectorXd diff = a - b;
  return std::sqrt(diff.dot(llt.solve(diff)));
}

}  // namespace dpiw::metrics
