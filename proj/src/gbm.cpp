#include "pdfool/gbm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "pdfool/serialize.hpp"

namespace pdfool {

namespace {

Scalar sigmoid(Scalar z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const Scalar e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

GbmModel::GbmModel(std::vector<CartTree> trees, Scalar base_score,
                   Scalar learning_rate, Index n_features, OutputMode mode,
                   int class_of_interest)
    : trees_(std::move(trees)),
      base_score_(base_score),
      learning_rate_(learning_rate),
      n_features_(n_features),
      mode_(mode),
      class_of_interest_(class_of_interest) {}

Vector GbmModel::raw_score(const Matrix& inputs) const {
  Vector score = Vector::Constant(inputs.rows(), base_score_);
  for (const CartTree& tree : trees_) {
    score += learning_rate_ * tree.predict(inputs);
  }
  return score;
}

Vector GbmModel::predict_impl(const Matrix& inputs) const {
  Vector score = raw_score(inputs);
  if (mode_ == OutputMode::Regression) return score;
  Vector p1(score.size());
  for (Index i = 0; i < score.size(); ++i) p1[i] = sigmoid(score[i]);
  return class_of_interest_ == 1 ? p1 : Vector(1.0 - p1.array());
}

nlohmann::json GbmModel::to_json() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const CartTree& tree : trees_) trees.push_back(tree.to_json());
  return {{"family", family()},
          {"output_mode", detail::to_string(mode_)},
          {"class_of_interest", class_of_interest_},
          {"n_features", n_features_},
          {"base_score", base_score_},
          {"learning_rate", learning_rate_},
          {"trees", std::move(trees)}};
}

std::unique_ptr<GbmModel> GbmModel::from_json(const nlohmann::json& doc) {
  std::vector<CartTree> trees;
  for (const auto& item : doc.at("trees")) {
    trees.push_back(CartTree::from_json(item));
  }
  return std::make_unique<GbmModel>(
      std::move(trees), doc.at("base_score").get<Scalar>(),
      doc.at("learning_rate").get<Scalar>(), doc.at("n_features").get<Index>(),
      detail::output_mode_from_string(doc.at("output_mode").get<std::string>()),
      doc.at("class_of_interest").get<int>());
}

std::unique_ptr<GbmModel> fit_gbm(const LabeledData& data, const GbmSpec& spec,
                                  OutputMode mode, int class_of_interest) {
  if (spec.n_trees < 0) {
    throw std::invalid_argument("fit_gbm: n_trees must be >= 0");
  }
  if (spec.learning_rate <= 0.0) {
    throw std::invalid_argument("fit_gbm: learning_rate must be positive");
  }
  const Matrix& features = data.features.values();
  const Vector& target = data.target;
  const Index n = features.rows();
  const TreeSpec tree_spec{spec.max_depth, spec.min_samples_leaf};
  std::vector<Index> all_rows(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < all_rows.size(); ++i) {
    all_rows[i] = static_cast<Index>(i);
  }

  const bool classify = mode == OutputMode::ClassProbability;
  if (classify) validate_binary_labels(target);

  Scalar base = 0.0;
  if (classify) {
    const Scalar p = std::clamp(target.mean(), 1e-12, 1.0 - 1e-12);
    base = std::log(p / (1.0 - p));
  } else {
    base = target.mean();
  }

  Vector score = Vector::Constant(n, base);
  std::vector<CartTree> trees;
  trees.reserve(static_cast<std::size_t>(spec.n_trees));
  Vector residual(n);
  for (int t = 0; t < spec.n_trees; ++t) {
    if (classify) {
      for (Index i = 0; i < n; ++i) residual[i] = target[i] - sigmoid(score[i]);
    } else {
      residual = target - score;
    }
    CartTree tree = CartTree::fit(features, residual, all_rows, tree_spec,
                                  SplitCriterion::Variance);
    if (classify) {
      // Newton-step leaf values: sum residual / sum p(1-p) over leaf samples.
      std::unordered_map<int, std::pair<Scalar, Scalar>> leaf_totals;
      for (Index i = 0; i < n; ++i) {
        const int leaf = tree.leaf_for_row(features, i);
        const Scalar p = sigmoid(score[i]);
        auto& [num, den] = leaf_totals[leaf];
        num += residual[i];
        den += p * (1.0 - p);
      }
      for (auto& [leaf, totals] : leaf_totals) {
        tree.nodes()[static_cast<std::size_t>(leaf)].value =
            totals.first / std::max(totals.second, 1e-12);
      }
    }
    score += spec.learning_rate * tree.predict(features);
    trees.push_back(std::move(tree));
  }
  return std::make_unique<GbmModel>(std::move(trees), base, spec.learning_rate,
                                    data.features.n_cols(), mode,
                                    class_of_interest);
}

}  // namespace pdfool
