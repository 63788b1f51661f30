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

#include "dpiw/ratio/logistic.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>

#include "dpiw/core/error.hpp"
#include "dpiw/core/math_util.hpp"
#include "dpiw/kernels/kernels.hpp"

namespace dpiw::ratio {

double LogisticModel::logit(std::span<const double> x) const {
  if (x.size() + 1 != beta.size()) throw InputError("feature dimension does not match model");
  return kernels::dot(beta.data(), x.data(), x.size()) + beta.back();
}

double LogisticModel::prob(std::span<const double> x) const { return sigmoid(logit(x)); }

double LogisticModel::sensitivity() const {
  return logistic_sensitivity(beta.size(), n_private, lambda);
}

double logistic_sensitivity(std::size_t d, std::size_t n_private, double lambda) {
  if (d < 1 || n_private < 1 || !(lambda > 0.0))
    throw InputError("sensitivity requires positive d, n_private and lambda");
  return 2.0 * std::sqrt(static_cast<double>(d)) /
         (static_cast<double>(n_private) * lambda);
}

namespace {

double objective(const std::vector<double>& x_aug, std::size_t n, std::size_t p,
                 const std::vector<double>& y, const std::vector<double>& c, double lambda,
                 const Eigen::VectorXd& beta) {
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = kernels::dot(x_aug.data() + i * p, beta.data(), p);
    loss += c[i] * log1pexp(-y[i] * t);
  }
  return loss / static_cast<double>(n) + 0.5 * lambda * beta.squaredNorm();
}

}  // namespace

std::vector<double> newton_logistic(const std::vector<double>& x_aug, std::size_t n,
                                    std::size_t p, const std::vector<double>& y_pm1,
                                    const std::vector<double>& multipliers, double lambda,
                                    const NewtonOptions& opts) {
  if (x_aug.size() != n * p || y_pm1.size() != n || multipliers.size() != n)
    throw InputError("newton_logistic: inconsistent input sizes");

  const double inv_n = 1.0 / static_cast<double>(n);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  Eigen::VectorXd grad(static_cast<Eigen::Index>(p));
  Eigen::MatrixXd hess(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));

  double grad_norm = 0.0;
  for (std::size_t iter = 0; iter < opts.max_iterations; ++iter) {
    grad.setZero();
    hess.setZero();
    for (std::size_t i = 0; i < n; ++i) {
      const double* xi = x_aug.data() + i * p;
      const double t = kernels::dot(xi, beta.data(), p);
      const double s = sigmoid(t);
      // d/dt of log(1+exp(-y t)) is sigmoid(t) - (y+1)/2 for y in {-1, +1}.
      const double gi = multipliers[i] * (s - 0.5 * (y_pm1[i] + 1.0));
      const double hi = multipliers[i] * s * (1.0 - s);
      for (std::size_t a = 0; a < p; ++a) {
        grad(static_cast<Eigen::Index>(a)) += gi * xi[a];
        for (std::size_t b = a; b < p; ++b)
          hess(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) += hi * xi[a] * xi[b];
      }
    }
    grad *= inv_n;
    grad += lambda * beta;
    grad_norm = grad.norm();
    if (grad_norm <= opts.tolerance) {
      return {beta.data(), beta.data() + p};
    }

    hess *= inv_n;
    for (std::size_t a = 0; a < p; ++a) {
      for (std::size_t b = a; b < p; ++b)
        hess(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) =
            hess(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      hess(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) += lambda;
    }

    Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    Eigen::VectorXd dir = -ldlt.solve(grad);
    if (!dir.allFinite()) throw NonConvergenceError("logistic Newton step failed", grad_norm);

    const double slope = grad.dot(dir);
    const double f0 = objective(x_aug, n, p, y_pm1, multipliers, lambda, beta);
    // Inside the quadratic-convergence region the predicted decrease drops
    // below what doubles can resolve; take the full step there.
    if (std::fabs(slope) <= 1e-14 * (1.0 + std::fabs(f0))) {
      beta += dir;
      continue;
    }
    double step = 1.0;
    Eigen::VectorXd cand = beta + dir;
    for (int back = 0; back < 60; ++back) {
      if (objective(x_aug, n, p, y_pm1, multipliers, lambda, cand) <= f0 + 1e-4 * step * slope)
        break;
      step *= 0.5;
      cand = beta + step * dir;
    }
    beta = cand;
  }
  throw NonConvergenceError("logistic regression did not reach gradient tolerance", grad_norm);
}

namespace {

LogisticModel fit_impl(const std::vector<double>& x_aug, std::size_t n, std::size_t p,
                       const std::vector<double>& y, const std::vector<double>& c,
                       double lambda, std::size_t n_private) {
  LogisticModel model;
  model.beta = newton_logistic(x_aug, n, p, y, c, lambda);
  model.lambda = lambda;
  model.n_private = n_private;
  return model;
}

void append_row(std::vector<double>& x_aug, std::span<const double> row) {
  x_aug.insert(x_aug.end(), row.begin(), row.end());
  x_aug.push_back(1.0);  // constant feature, kept inside [0,1]^d
}

}  // namespace

LogisticModel fit_logistic_l2(const Dataset& real, const Dataset& synth, double lambda) {
  if (!(lambda > 0.0)) throw InputError("lambda must be positive");
  if (real.cols() != synth.cols())
    throw InputError("real and synthetic data must share feature dimensions");
  const std::size_t n = real.rows() + synth.rows();
  const std::size_t p = real.cols() + 1;
  std::vector<double> x_aug;
  x_aug.reserve(n * p);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < real.rows(); ++i) {
    append_row(x_aug, real.row(i));
    y[i] = 1.0;
  }
  for (std::size_t i = 0; i < synth.rows(); ++i) {
    append_row(x_aug, synth.row(i));
    y[real.rows() + i] = -1.0;
  }
  const std::vector<double> ones(n, 1.0);
  return fit_impl(x_aug, n, p, y, ones, lambda, real.rows());
}

LogisticModel fit_logistic_l2_weighted(const Dataset& data, const std::vector<int>& labels,
                                       const std::vector<double>& example_weights,
                                       double lambda) {
  if (!(lambda > 0.0)) throw InputError("lambda must be positive");
  if (labels.size() != data.rows() || example_weights.size() != data.rows())
    throw InputError("labels/weights must have one entry per row");
  const std::size_t n = data.rows();
  const std::size_t p = data.cols() + 1;
  std::vector<double> x_aug;
  x_aug.reserve(n * p);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    append_row(x_aug, data.row(i));
    y[i] = labels[i] == 1 ? 1.0 : -1.0;
  }
  return fit_impl(x_aug, n, p, y, example_weights, lambda, n);
}

}  // namespace dpiw::ratio
