#pragma once

#include <memory>
#include <vector>

#include "pdfool/model.hpp"

namespace pdfool {

struct TreeSpec {
  int max_depth = 6;
  int min_samples_leaf = 2;
};

enum class SplitCriterion { Variance, Gini };

struct TreeNode {
  Index column = -1;
  Scalar threshold = 0.0;
  int left = -1;
  int right = -1;
  Scalar value = 0.0;  // leaf prediction (mean target of node samples)
  bool is_leaf() const { return left < 0; }
};

/// Binary CART structure. Splits greedily on variance reduction or Gini gain
/// with midpoint thresholds; leaves predict the mean target of their samples.
/// Rows with value <= threshold go left.
class CartTree {
 public:
  CartTree() = default;
  explicit CartTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  static CartTree fit(const Matrix& features, const Vector& target,
                      const std::vector<Index>& rows, const TreeSpec& spec,
                      SplitCriterion criterion);

  Scalar predict_row(const Matrix& features, Index row) const;
  Vector predict(const Matrix& features) const;
  int leaf_for_row(const Matrix& features, Index row) const;

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::vector<TreeNode>& nodes() { return nodes_; }

  nlohmann::json to_json() const;
  static CartTree from_json(const nlohmann::json& doc);

 private:
  std::vector<TreeNode> nodes_;
};

/// Single decision tree behind the uniform model interface.
class TreeModel : public Model {
 public:
  TreeModel(CartTree tree, Index n_features, OutputMode mode,
            int class_of_interest);

  const CartTree& tree() const { return tree_; }
  int class_of_interest() const { return class_of_interest_; }

  Index n_features() const override { return n_features_; }
  std::string family() const override { return "tree"; }
  OutputMode output_mode() const override { return mode_; }
  nlohmann::json to_json() const override;
  static std::unique_ptr<TreeModel> from_json(const nlohmann::json& doc);

 protected:
  Vector predict_impl(const Matrix& inputs) const override;

 private:
  CartTree tree_;
  Index n_features_;
  OutputMode mode_;
  int class_of_interest_;
};

std::unique_ptr<TreeModel> fit_tree(const LabeledData& data,
                                    const TreeSpec& spec,
                                    OutputMode mode = OutputMode::Regression,
                                    int class_of_interest = 0);

}  // namespace pdfool
