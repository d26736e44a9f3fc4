#include "pdfool/forest.hpp"

#include <stdexcept>

#include <nlohmann/json.hpp>

#include "pdfool/rng.hpp"
#include "pdfool/serialize.hpp"

namespace pdfool {

ForestModel::ForestModel(std::vector<CartTree> trees, Index n_features,
                         OutputMode mode, int class_of_interest)
    : trees_(std::move(trees)),
      n_features_(n_features),
      mode_(mode),
      class_of_interest_(class_of_interest) {
  if (trees_.empty()) {
    throw std::invalid_argument("ForestModel: needs at least one tree");
  }
}

Vector ForestModel::predict_impl(const Matrix& inputs) const {
  Vector sum = Vector::Zero(inputs.rows());
  for (const CartTree& tree : trees_) sum += tree.predict(inputs);
  Vector p = sum / static_cast<Scalar>(trees_.size());
  if (mode_ == OutputMode::ClassProbability && class_of_interest_ == 0) {
    return Vector(1.0 - p.array());
  }
  return p;
}

nlohmann::json ForestModel::to_json() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const CartTree& tree : trees_) trees.push_back(tree.to_json());
  return {{"family", family()},
          {"output_mode", detail::to_string(mode_)},
          {"class_of_interest", class_of_interest_},
          {"n_features", n_features_},
          {"trees", std::move(trees)}};
}

std::unique_ptr<ForestModel> ForestModel::from_json(const nlohmann::json& doc) {
  std::vector<CartTree> trees;
  for (const auto& item : doc.at("trees")) {
    trees.push_back(CartTree::from_json(item));
  }
  return std::make_unique<ForestModel>(
      std::move(trees), doc.at("n_features").get<Index>(),
      detail::output_mode_from_string(doc.at("output_mode").get<std::string>()),
      doc.at("class_of_interest").get<int>());
}

std::unique_ptr<ForestModel> fit_forest(const LabeledData& data,
                                        const ForestSpec& spec, OutputMode mode,
                                        int class_of_interest) {
  if (spec.n_trees < 1) {
    throw std::invalid_argument("fit_forest: n_trees must be >= 1");
  }
  if (mode == OutputMode::ClassProbability) validate_binary_labels(data.target);
  const SplitCriterion criterion = mode == OutputMode::ClassProbability
                                       ? SplitCriterion::Gini
                                       : SplitCriterion::Variance;
  const Index n = data.features.n_rows();
  const TreeSpec tree_spec{spec.max_depth, spec.min_samples_leaf};
  Rng rng(spec.seed);
  std::vector<CartTree> trees;
  trees.reserve(static_cast<std::size_t>(spec.n_trees));
  std::vector<Index> bag(static_cast<std::size_t>(n));
  for (int t = 0; t < spec.n_trees; ++t) {
    for (auto& row : bag) {
      row = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    }
    trees.push_back(CartTree::fit(data.features.values(), data.target, bag,
                                  tree_spec, criterion));
  }
  return std::make_unique<ForestModel>(std::move(trees), data.features.n_cols(),
                                       mode, class_of_interest);
}

}  // namespace pdfool
