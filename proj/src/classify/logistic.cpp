// Copyright 2026 The Issue Triage Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Multinomial logistic regression with an L2 penalty on the weights,
// minimized by limited-memory quasi-Newton steps with backtracking line
// search.

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "triage/classify.hpp"

namespace triage::classify::detail {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

LinearParams unpack(std::span<const double> theta, std::size_t n_classes,
                    std::size_t dimension) {
  LinearParams p;
  p.dimension = dimension;
  p.weights.assign(theta.begin(),
                   theta.begin() + static_cast<long>(n_classes * dimension));
  p.intercepts.assign(theta.begin() + static_cast<long>(n_classes * dimension),
                      theta.end());
  return p;
}

}  // namespace

double logistic_objective(const LinearParams& params,
                          std::span<const SparseVector> X,
                          std::span<const std::uint32_t> labels, double lambda,
                          std::vector<double>* gradient) {
  const std::size_t n_classes = params.intercepts.size();
  const std::size_t dim = params.dimension;
  if (gradient) gradient->assign(n_classes * dim + n_classes, 0.0);

  double loss = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const auto scores = params.scores(X[i]);
    const double top = *std::max_element(scores.begin(), scores.end());
    double sum = 0.0;
    for (double s : scores) sum += std::exp(s - top);
    const double log_norm = top + std::log(sum);
    loss += log_norm - scores[labels[i]];
    if (!gradient) continue;
    for (std::size_t c = 0; c < n_classes; ++c) {
      const double residual =
          std::exp(scores[c] - log_norm) - (labels[i] == c ? 1.0 : 0.0);
      double* row = gradient->data() + c * dim;
      for (const auto& e : X[i].entries()) row[e.index] += residual * e.weight;
      (*gradient)[n_classes * dim + c] += residual;
    }
  }
  double penalty = 0.0;
  for (double w : params.weights) penalty += w * w;
  loss += 0.5 * lambda * penalty;
  if (gradient) {
    for (std::size_t j = 0; j < n_classes * dim; ++j) {
      (*gradient)[j] += lambda * params.weights[j];
    }
  }
  return loss;
}

LinearParams train_logistic(std::span<const SparseVector> X,
                            std::span<const std::uint32_t> labels,
                            std::size_t n_classes, std::size_t dimension,
                            double lambda, double tol, int max_iter) {
  constexpr std::size_t kHistory = 10;
  constexpr double kArmijo = 1e-4;

  const std::size_t n_params = n_classes * dimension + n_classes;
  std::vector<double> theta(n_params, 0.0);
  std::vector<double> grad;
  double f = logistic_objective(unpack(theta, n_classes, dimension), X, labels,
                                lambda, &grad);

  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;
  std::vector<double> direction(n_params), trial(n_params), trial_grad;

  for (int iter = 0; iter < max_iter; ++iter) {
    if (max_abs(grad) <= tol) break;

    // Two-loop recursion: direction = -H * grad.
    direction = grad;
    std::vector<double> alphas(s_hist.size());
    for (std::size_t k = s_hist.size(); k-- > 0;) {
      alphas[k] = rho_hist[k] * dot(s_hist[k], direction);
      for (std::size_t j = 0; j < n_params; ++j) {
        direction[j] -= alphas[k] * y_hist[k][j];
      }
    }
    if (!s_hist.empty()) {
      const double gamma =
          dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
      for (double& d : direction) d *= gamma;
    }
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      const double beta = rho_hist[k] * dot(y_hist[k], direction);
      for (std::size_t j = 0; j < n_params; ++j) {
        direction[j] += (alphas[k] - beta) * s_hist[k][j];
      }
    }
    for (double& d : direction) d = -d;

    double slope = dot(grad, direction);
    if (slope >= 0.0) {
      // Not a descent direction; fall back to steepest descent.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      for (std::size_t j = 0; j < n_params; ++j) direction[j] = -grad[j];
      slope = dot(grad, direction);
    }

    double step = 1.0;
    if (s_hist.empty()) step = 1.0 / std::max(1.0, std::sqrt(-slope));
    double f_trial = f;
    bool accepted = false;
    for (int tries = 0; tries < 60; ++tries) {
      for (std::size_t j = 0; j < n_params; ++j) {
        trial[j] = theta[j] + step * direction[j];
      }
      f_trial = logistic_objective(unpack(trial, n_classes, dimension), X,
                                   labels, lambda, &trial_grad);
      if (f_trial <= f + kArmijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    std::vector<double> s(n_params), y(n_params);
    for (std::size_t j = 0; j < n_params; ++j) {
      s[j] = trial[j] - theta[j];
      y[j] = trial_grad[j] - grad[j];
    }
    const double sy = dot(s, y);
    theta.swap(trial);
    grad.swap(trial_grad);
    f = f_trial;
    if (sy > 1e-12) {
      if (s_hist.size() == kHistory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
    }
  }
  return unpack(theta, n_classes, dimension);
}

}  // namespace triage::classify::detail
