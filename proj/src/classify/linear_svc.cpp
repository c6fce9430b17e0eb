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

// One-vs-rest linear SVM trained in the dual by coordinate descent with
// shrinking, plus Platt's sigmoid fit for probability calibration.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "triage/parallel.hpp"
#include "triage/classify.hpp"
#include "triage/random.hpp"

namespace triage::classify::detail {

std::vector<double> solve_hinge_dual(std::span<const SparseVector> X,
                                     std::span<const int> signs,
                                     std::size_t dimension, double c,
                                     double bias, double tol, int max_epochs,
                                     std::uint64_t seed) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const std::size_t n = X.size();
  // Last slot carries the intercept through a constant feature `bias`.
  std::vector<double> w(dimension + 1, 0.0);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) {
    diag[i] = X[i].squared_norm() + bias * bias;
  }
  std::vector<std::size_t> index(n);
  std::iota(index.begin(), index.end(), 0);
  std::mt19937_64 rng(seed);

  const auto margin = [&](std::size_t i) {
    double sum = bias * w[dimension];
    for (const auto& e : X[i].entries()) sum += w[e.index] * e.weight;
    return sum;
  };

  std::size_t active = n;
  double pg_max_old = kInf;
  double pg_min_old = -kInf;
  for (int epoch = 0; epoch < max_epochs; ++epoch) {
    double pg_max = -kInf;
    double pg_min = kInf;
    std::shuffle(index.begin(), index.begin() + static_cast<long>(active), rng);

    for (std::size_t s = 0; s < active; ++s) {
      const std::size_t i = index[s];
      const double y = signs[i];
      const double g = y * margin(i) - 1.0;
      double pg = 0.0;
      if (alpha[i] == 0.0) {
        if (g > pg_max_old) {
          --active;
          std::swap(index[s], index[active]);
          --s;
          continue;
        }
        if (g < 0.0) pg = g;
      } else if (alpha[i] == c) {
        if (g < pg_min_old) {
          --active;
          std::swap(index[s], index[active]);
          --s;
          continue;
        }
        if (g > 0.0) pg = g;
      } else {
        pg = g;
      }
      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);

      if (std::fabs(pg) > 1e-12 && diag[i] > 0.0) {
        const double old = alpha[i];
        alpha[i] = std::min(std::max(old - g / diag[i], 0.0), c);
        const double step = (alpha[i] - old) * y;
        for (const auto& e : X[i].entries()) w[e.index] += step * e.weight;
        w[dimension] += step * bias;
      }
    }

    if (pg_max - pg_min <= tol) {
      if (active == n) break;
      // Converged on the shrunk set; verify on everything.
      active = n;
      pg_max_old = kInf;
      pg_min_old = -kInf;
      continue;
    }
    pg_max_old = pg_max <= 0.0 ? kInf : pg_max;
    pg_min_old = pg_min >= 0.0 ? -kInf : pg_min;
  }
  w[dimension] *= bias;
  return w;
}

LinearParams train_linear_svc(std::span<const SparseVector> X,
                              std::span<const std::uint32_t> labels,
                              std::size_t n_classes, std::size_t dimension,
                              const FitConfig& config) {
  LinearParams params;
  params.dimension = dimension;
  params.weights.assign(n_classes * dimension, 0.0);
  params.intercepts.assign(n_classes, 0.0);
  parallel_for(n_classes, [&](std::size_t c) {
    std::vector<int> signs(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      signs[i] = labels[i] == c ? 1 : -1;
    }
    const auto w = solve_hinge_dual(X, signs, dimension, config.svc_c,
                                    config.svc_bias, config.svc_tol,
                                    config.svc_max_epochs,
                                    derive_seed(config.seed, 1000 + c));
    std::copy(w.begin(), w.begin() + static_cast<long>(dimension),
              params.weights.begin() + static_cast<long>(c * dimension));
    params.intercepts[c] = w[dimension];
  });
  return params;
}

// Newton's method with backtracking on the regularized-target likelihood
// (Lin, Lin and Weng's formulation of Platt scaling).
PlattSigmoid fit_platt(std::span<const double> scores,
                       std::span<const int> signs) {
  const std::size_t n = scores.size();
  double n_pos = 0.0;
  for (int s : signs) n_pos += s > 0 ? 1.0 : 0.0;
  const double n_neg = static_cast<double>(n) - n_pos;

  const double hi_target = (n_pos + 1.0) / (n_pos + 2.0);
  const double lo_target = 1.0 / (n_neg + 2.0);
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = signs[i] > 0 ? hi_target : lo_target;
  }

  constexpr int kMaxIter = 100;
  constexpr double kMinStep = 1e-10;
  constexpr double kSigma = 1e-12;
  constexpr double kEps = 1e-5;

  double a = 0.0;
  double b = std::log((n_neg + 1.0) / (n_pos + 1.0));

  const auto objective = [&](double aa, double bb) {
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double fApB = scores[i] * aa + bb;
      if (fApB >= 0.0) {
        f += t[i] * fApB + std::log1p(std::exp(-fApB));
      } else {
        f += (t[i] - 1.0) * fApB + std::log1p(std::exp(fApB));
      }
    }
    return f;
  };

  double fval = objective(a, b);
  for (int iter = 0; iter < kMaxIter; ++iter) {
    double h11 = kSigma, h22 = kSigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double fApB = scores[i] * a + b;
      double p, q;
      if (fApB >= 0.0) {
        p = std::exp(-fApB) / (1.0 + std::exp(-fApB));
        q = 1.0 / (1.0 + std::exp(-fApB));
      } else {
        p = 1.0 / (1.0 + std::exp(fApB));
        q = std::exp(fApB) / (1.0 + std::exp(fApB));
      }
      const double d2 = p * q;
      h11 += scores[i] * scores[i] * d2;
      h22 += d2;
      h21 += scores[i] * d2;
      const double d1 = t[i] - p;
      g1 += scores[i] * d1;
      g2 += d1;
    }
    if (std::fabs(g1) < kEps && std::fabs(g2) < kEps) break;

    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;

    double step = 1.0;
    while (step >= kMinStep) {
      const double na = a + step * da;
      const double nb = b + step * db;
      const double nf = objective(na, nb);
      if (nf < fval + 1e-4 * step * gd) {
        a = na;
        b = nb;
        fval = nf;
        break;
      }
      step /= 2.0;
    }
    if (step < kMinStep) break;
  }
  return {a, b};
}

}  // namespace triage::classify::detail
