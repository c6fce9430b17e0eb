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

// CART classification trees on sparse inputs. Split search works from the
// node's nonzero entries only; the implicit zeros of each feature form one
// block whose class counts are the node totals minus the nonzero counts.

#include <algorithm>
#include <numeric>
#include <random>

#include "triage/classify.hpp"

namespace triage::classify::detail {
namespace {

struct Triple {
  std::uint32_t feature;
  double value;
  std::uint32_t label;
};

struct Split {
  std::int32_t feature = -1;
  double threshold = 0.0;
  double score = -1.0;  // sum_c L_c^2 / n_L + sum_c R_c^2 / n_R, maximized
};

double value_at(const SparseVector& x, std::uint32_t feature) {
  const auto entries = x.entries();
  const auto it = std::lower_bound(
      entries.begin(), entries.end(), feature,
      [](const text::Entry& e, std::uint32_t f) { return e.index < f; });
  return (it != entries.end() && it->index == feature) ? it->weight : 0.0;
}

class TreeBuilder {
 public:
  TreeBuilder(std::span<const SparseVector> X,
              std::span<const std::uint32_t> labels, std::size_t n_classes,
              std::size_t dimension, int max_depth, int min_leaf,
              std::size_t max_features, std::uint64_t seed)
      : X_(X),
        labels_(labels),
        n_classes_(n_classes),
        dimension_(dimension),
        max_depth_(max_depth),
        min_leaf_(static_cast<std::size_t>(std::max(1, min_leaf))),
        max_features_(max_features),
        rng_(seed),
        group_begin_(dimension, -1),
        group_end_(dimension, -1) {
    if (max_features_ > 0) {
      permutation_.resize(dimension);
      std::iota(permutation_.begin(), permutation_.end(), 0u);
    }
  }

  TreeParams build(std::vector<std::uint32_t> rows) {
    rows_ = std::move(rows);
    struct Pending {
      std::int32_t node;
      std::size_t begin, end;
      int depth;
    };
    tree_.nodes.emplace_back();
    std::vector<Pending> stack{{0, 0, rows_.size(), 0}};
    while (!stack.empty()) {
      const Pending p = stack.back();
      stack.pop_back();

      std::vector<double> counts(n_classes_, 0.0);
      for (std::size_t i = p.begin; i < p.end; ++i) counts[labels_[rows_[i]]] += 1.0;
      const std::size_t n = p.end - p.begin;
      const bool pure =
          std::count_if(counts.begin(), counts.end(),
                        [](double c) { return c > 0.0; }) <= 1;

      Split split;
      if (!pure && p.depth < max_depth_ && n >= 2 * min_leaf_) {
        split = best_split(p.begin, p.end, counts);
      }
      if (split.feature < 0) {
        make_leaf(p.node, counts, static_cast<double>(n));
        continue;
      }

      const auto f = static_cast<std::uint32_t>(split.feature);
      const auto mid = std::stable_partition(
          rows_.begin() + static_cast<long>(p.begin),
          rows_.begin() + static_cast<long>(p.end), [&](std::uint32_t r) {
            return value_at(X_[r], f) <= split.threshold;
          });
      const auto mid_index = static_cast<std::size_t>(mid - rows_.begin());

      const auto left = static_cast<std::int32_t>(tree_.nodes.size());
      tree_.nodes.emplace_back();
      const auto right = static_cast<std::int32_t>(tree_.nodes.size());
      tree_.nodes.emplace_back();
      auto& node = tree_.nodes[static_cast<std::size_t>(p.node)];
      node.feature = split.feature;
      node.threshold = split.threshold;
      node.left = left;
      node.right = right;
      stack.push_back({right, mid_index, p.end, p.depth + 1});
      stack.push_back({left, p.begin, mid_index, p.depth + 1});
    }
    return std::move(tree_);
  }

 private:
  void make_leaf(std::int32_t node, const std::vector<double>& counts,
                 double n) {
    auto& leaf = tree_.nodes[static_cast<std::size_t>(node)];
    leaf.feature = -1;
    leaf.leaf = static_cast<std::int32_t>(tree_.leaf_distributions.size() /
                                          n_classes_);
    for (double c : counts) tree_.leaf_distributions.push_back(c / n);
  }

  Split best_split(std::size_t begin, std::size_t end,
                   const std::vector<double>& counts) {
    triples_.clear();
    for (std::size_t i = begin; i < end; ++i) {
      const auto r = rows_[i];
      for (const auto& e : X_[r].entries()) {
        triples_.push_back({e.index, e.weight, labels_[r]});
      }
    }
    std::sort(triples_.begin(), triples_.end(),
              [](const Triple& a, const Triple& b) {
                return a.feature != b.feature ? a.feature < b.feature
                                              : a.value < b.value;
              });
    std::vector<std::uint32_t> features;
    for (std::size_t i = 0; i < triples_.size();) {
      std::size_t j = i;
      while (j < triples_.size() && triples_[j].feature == triples_[i].feature) ++j;
      group_begin_[triples_[i].feature] = static_cast<std::int64_t>(i);
      group_end_[triples_[i].feature] = static_cast<std::int64_t>(j);
      features.push_back(triples_[i].feature);
      i = j;
    }

    const std::size_t n = end - begin;
    Split best;
    if (max_features_ == 0) {
      for (std::uint32_t f : features) evaluate(f, n, counts, best);
    } else {
      // Visit features in random order until max_features non-constant
      // ones have been evaluated.
      std::size_t evaluated = 0;
      for (std::size_t j = 0; j < dimension_ && evaluated < max_features_; ++j) {
        std::uniform_int_distribution<std::size_t> pick(j, dimension_ - 1);
        std::swap(permutation_[j], permutation_[pick(rng_)]);
        if (evaluate(permutation_[j], n, counts, best)) ++evaluated;
      }
    }
    for (std::uint32_t f : features) {
      group_begin_[f] = -1;
      group_end_[f] = -1;
    }
    return best;
  }

  // Returns false when the feature is constant within the node.
  bool evaluate(std::uint32_t f, std::size_t n,
                const std::vector<double>& counts, Split& best) {
    if (group_begin_[f] < 0) return false;
    const auto gb = static_cast<std::size_t>(group_begin_[f]);
    const auto ge = static_cast<std::size_t>(group_end_[f]);
    const std::size_t n_nonzero = ge - gb;
    const std::size_t n_zero = n - n_nonzero;
    if (n_zero == 0 && triples_[gb].value == triples_[ge - 1].value) return false;

    zero_counts_ = counts;
    for (std::size_t i = gb; i < ge; ++i) zero_counts_[triples_[i].label] -= 1.0;

    left_.assign(n_classes_, 0.0);
    right_ = counts;
    double sq_left = 0.0;
    double sq_right = 0.0;
    for (double c : counts) sq_right += c * c;
    double n_left = 0.0;
    const double total = static_cast<double>(n);

    const auto move_one = [&](std::uint32_t c) {
      sq_left += 2.0 * left_[c] + 1.0;
      sq_right += -2.0 * right_[c] + 1.0;
      left_[c] += 1.0;
      right_[c] -= 1.0;
      n_left += 1.0;
    };
    const auto move_zeros = [&] {
      for (std::size_t c = 0; c < n_classes_; ++c) {
        const double z = zero_counts_[c];
        if (z == 0.0) continue;
        sq_left += 2.0 * left_[c] * z + z * z;
        sq_right += -2.0 * right_[c] * z + z * z;
        left_[c] += z;
        right_[c] -= z;
      }
      n_left += static_cast<double>(n_zero);
    };
    const auto consider = [&](double threshold) {
      const double n_right = total - n_left;
      if (n_left < static_cast<double>(min_leaf_) ||
          n_right < static_cast<double>(min_leaf_)) {
        return;
      }
      const double score = sq_left / n_left + sq_right / n_right;
      if (score > best.score + 1e-12) {
        best.score = score;
        best.feature = static_cast<std::int32_t>(f);
        best.threshold = threshold;
      }
    };

    // Walk distinct values in ascending order with the zero block slotted in
    // between the negative and positive entries.
    bool zeros_pending = n_zero > 0;
    std::size_t i = gb;
    while (i < ge || zeros_pending) {
      double current;
      if (zeros_pending && (i == ge || triples_[i].value > 0.0)) {
        move_zeros();
        zeros_pending = false;
        current = 0.0;
      } else {
        current = triples_[i].value;
        while (i < ge && triples_[i].value == current) move_one(triples_[i++].label);
      }
      double next;
      if (zeros_pending && (i == ge || triples_[i].value > 0.0)) {
        next = 0.0;
      } else if (i < ge) {
        next = triples_[i].value;
      } else {
        break;
      }
      consider(current + (next - current) / 2.0);
    }
    return true;
  }

  std::span<const SparseVector> X_;
  std::span<const std::uint32_t> labels_;
  std::size_t n_classes_;
  std::size_t dimension_;
  int max_depth_;
  std::size_t min_leaf_;
  std::size_t max_features_;
  std::mt19937_64 rng_;

  std::vector<std::uint32_t> rows_;
  std::vector<std::uint32_t> permutation_;
  std::vector<std::int64_t> group_begin_;
  std::vector<std::int64_t> group_end_;
  std::vector<Triple> triples_;
  std::vector<double> zero_counts_, left_, right_;
  TreeParams tree_;
};

}  // namespace

TreeParams train_tree(std::span<const SparseVector> X,
                      std::span<const std::uint32_t> labels,
                      std::span<const std::uint32_t> sample_rows,
                      std::size_t n_classes, std::size_t dimension,
                      int max_depth, int min_leaf, std::size_t max_features,
                      std::uint64_t seed) {
  TreeBuilder builder(X, labels, n_classes, dimension, max_depth, min_leaf,
                      max_features, seed);
  return builder.build({sample_rows.begin(), sample_rows.end()});
}

std::vector<double> tree_proba(const TreeParams& tree, std::size_t n_classes,
                               const SparseVector& x) {
  std::size_t node = 0;
  while (tree.nodes[node].feature >= 0) {
    const auto& n = tree.nodes[node];
    node = static_cast<std::size_t>(
        value_at(x, static_cast<std::uint32_t>(n.feature)) <= n.threshold
            ? n.left
            : n.right);
  }
  const auto offset =
      static_cast<std::size_t>(tree.nodes[node].leaf) * n_classes;
  return {tree.leaf_distributions.begin() + static_cast<long>(offset),
          tree.leaf_distributions.begin() +
              static_cast<long>(offset + n_classes)};
}

}  // namespace triage::classify::detail
