#include "pdfool/tree.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "pdfool/serialize.hpp"

namespace pdfool {

namespace {

struct SplitCandidate {
  bool found = false;
  Index column = -1;
  Scalar threshold = 0.0;
  Scalar gain = 0.0;
};

struct Builder {
  const Matrix& features;
  const Vector& target;
  SplitCriterion criterion;
  int max_depth;
  int min_leaf;
  std::vector<TreeNode> nodes;

  // Node impurity totals: sum of squared errors for Variance, n*gini for Gini.
  Scalar impurity(Scalar sum, Scalar sum_sq, Scalar n) const {
    if (criterion == SplitCriterion::Variance) return sum_sq - sum * sum / n;
    // Binary Gini from the class-1 count (targets are 0/1, so sum == count).
    const Scalar c1 = sum;
    const Scalar c0 = n - c1;
    return n - (c0 * c0 + c1 * c1) / n;
  }

  SplitCandidate best_split(const std::vector<Index>& rows) const {
    const auto n = static_cast<Index>(rows.size());
    SplitCandidate best;
    if (n < 2 * min_leaf) return best;

    std::vector<std::pair<Scalar, Scalar>> sorted(static_cast<std::size_t>(n));
    for (Index j = 0; j < features.cols(); ++j) {
      for (Index i = 0; i < n; ++i) {
        const Index row = rows[static_cast<std::size_t>(i)];
        sorted[static_cast<std::size_t>(i)] = {features(row, j), target[row]};
      }
      std::sort(sorted.begin(), sorted.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });

      Scalar total_sum = 0.0, total_sq = 0.0;
      for (const auto& [x, y] : sorted) {
        total_sum += y;
        total_sq += y * y;
      }
      const Scalar parent =
          impurity(total_sum, total_sq, static_cast<Scalar>(n));

      Scalar left_sum = 0.0, left_sq = 0.0;
      for (Index k = 1; k < n; ++k) {
        const auto& prev = sorted[static_cast<std::size_t>(k - 1)];
        left_sum += prev.second;
        left_sq += prev.second * prev.second;
        if (k < min_leaf || n - k < min_leaf) continue;
        const Scalar x_prev = prev.first;
        const Scalar x_next = sorted[static_cast<std::size_t>(k)].first;
        if (x_prev == x_next) continue;
        const Scalar gain =
            parent - impurity(left_sum, left_sq, static_cast<Scalar>(k)) -
            impurity(total_sum - left_sum, total_sq - left_sq,
                     static_cast<Scalar>(n - k));
        if (gain > best.gain + 1e-12 ||
            (!best.found && gain > 1e-12)) {
          best.found = true;
          best.gain = gain;
          best.column = j;
          best.threshold = x_prev + (x_next - x_prev) / 2.0;
        }
      }
    }
    return best;
  }

  int build(const std::vector<Index>& rows, int depth) {
    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    Scalar sum = 0.0;
    for (const Index row : rows) sum += target[row];
    nodes[static_cast<std::size_t>(id)].value =
        sum / static_cast<Scalar>(rows.size());

    if (depth >= max_depth) return id;
    const SplitCandidate split = best_split(rows);
    if (!split.found) return id;

    std::vector<Index> left_rows, right_rows;
    left_rows.reserve(rows.size());
    right_rows.reserve(rows.size());
    for (const Index row : rows) {
      if (features(row, split.column) <= split.threshold) {
        left_rows.push_back(row);
      } else {
        right_rows.push_back(row);
      }
    }
    const int left = build(left_rows, depth + 1);
    const int right = build(right_rows, depth + 1);
    TreeNode& node = nodes[static_cast<std::size_t>(id)];
    node.column = split.column;
    node.threshold = split.threshold;
    node.left = left;
    node.right = right;
    return id;
  }
};

}  // namespace

CartTree CartTree::fit(const Matrix& features, const Vector& target,
                       const std::vector<Index>& rows, const TreeSpec& spec,
                       SplitCriterion criterion) {
  if (rows.empty()) throw std::invalid_argument("CartTree::fit: no rows");
  if (spec.max_depth < 1) {
    throw std::invalid_argument("CartTree::fit: max_depth must be >= 1");
  }
  if (spec.min_samples_leaf < 1) {
    throw std::invalid_argument("CartTree::fit: min_samples_leaf must be >= 1");
  }
  Builder builder{features, target, criterion, spec.max_depth,
                  spec.min_samples_leaf, {}};
  builder.build(rows, 0);
  return CartTree(std::move(builder.nodes));
}

int CartTree::leaf_for_row(const Matrix& features, Index row) const {
  int id = 0;
  while (!nodes_[static_cast<std::size_t>(id)].is_leaf()) {
    const TreeNode& node = nodes_[static_cast<std::size_t>(id)];
    id = features(row, node.column) <= node.threshold ? node.left : node.right;
  }
  return id;
}

Scalar CartTree::predict_row(const Matrix& features, Index row) const {
  return nodes_[static_cast<std::size_t>(leaf_for_row(features, row))].value;
}

Vector CartTree::predict(const Matrix& features) const {
  Vector out(features.rows());
  for (Index i = 0; i < features.rows(); ++i) out[i] = predict_row(features, i);
  return out;
}

nlohmann::json CartTree::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const TreeNode& node : nodes_) {
    arr.push_back({{"col", node.column},
                   {"thr", node.threshold},
                   {"left", node.left},
                   {"right", node.right},
                   {"value", node.value}});
  }
  return arr;
}

CartTree CartTree::from_json(const nlohmann::json& doc) {
  std::vector<TreeNode> nodes;
  nodes.reserve(doc.size());
  for (const auto& item : doc) {
    TreeNode node;
    node.column = item.at("col").get<Index>();
    node.threshold = item.at("thr").get<Scalar>();
    node.left = item.at("left").get<int>();
    node.right = item.at("right").get<int>();
    node.value = item.at("value").get<Scalar>();
    nodes.push_back(node);
  }
  if (nodes.empty()) throw std::runtime_error("CartTree: empty node list");
  return CartTree(std::move(nodes));
}

TreeModel::TreeModel(CartTree tree, Index n_features, OutputMode mode,
                     int class_of_interest)
    : tree_(std::move(tree)),
      n_features_(n_features),
      mode_(mode),
      class_of_interest_(class_of_interest) {}

Vector TreeModel::predict_impl(const Matrix& inputs) const {
  Vector p = tree_.predict(inputs);
  if (mode_ == OutputMode::ClassProbability && class_of_interest_ == 0) {
    return Vector(1.0 - p.array());
  }
  return p;
}

nlohmann::json TreeModel::to_json() const {
  return {{"family", family()},
          {"output_mode", detail::to_string(mode_)},
          {"class_of_interest", class_of_interest_},
          {"n_features", n_features_},
          {"nodes", tree_.to_json()}};
}

std::unique_ptr<TreeModel> TreeModel::from_json(const nlohmann::json& doc) {
  return std::make_unique<TreeModel>(
      CartTree::from_json(doc.at("nodes")), doc.at("n_features").get<Index>(),
      detail::output_mode_from_string(doc.at("output_mode").get<std::string>()),
      doc.at("class_of_interest").get<int>());
}

std::unique_ptr<TreeModel> fit_tree(const LabeledData& data,
                                    const TreeSpec& spec, OutputMode mode,
                                    int class_of_interest) {
  const SplitCriterion criterion = mode == OutputMode::ClassProbability
                                       ? SplitCriterion::Gini
                                       : SplitCriterion::Variance;
  if (mode == OutputMode::ClassProbability) validate_binary_labels(data.target);
  std::vector<Index> rows(static_cast<std::size_t>(data.features.n_rows()));
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<Index>(i);
  CartTree tree =
      CartTree::fit(data.features.values(), data.target, rows, spec, criterion);
  return std::make_unique<TreeModel>(std::move(tree), data.features.n_cols(),
                                     mode, class_of_interest);
}

}  // namespace pdfool
