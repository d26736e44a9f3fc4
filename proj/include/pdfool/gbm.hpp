#pragma once

#include <memory>
#include <vector>

#include "pdfool/tree.hpp"

namespace pdfool {

struct GbmSpec {
  int n_trees = 100;  // 0 is allowed: the model is just the base score
  int max_depth = 3;
  int min_samples_leaf = 2;
  Scalar learning_rate = 0.1;  // shrinkage
};

/// Gradient-boosted trees. Regression boosts squared error from a mean base
/// score; classification boosts logistic loss from a log-odds base score with
/// Newton-step leaf values, and squashes the final score through the logistic
/// function.
class GbmModel : public Model {
 public:
  GbmModel(std::vector<CartTree> trees, Scalar base_score, Scalar learning_rate,
           Index n_features, OutputMode mode, int class_of_interest);

  const std::vector<CartTree>& trees() const { return trees_; }
  Scalar base_score() const { return base_score_; }
  Scalar learning_rate() const { return learning_rate_; }

  /// Raw additive score before any probability squash.
  Vector raw_score(const Matrix& inputs) const;

  Index n_features() const override { return n_features_; }
  std::string family() const override { return "gbm"; }
  OutputMode output_mode() const override { return mode_; }
  nlohmann::json to_json() const override;
  static std::unique_ptr<GbmModel> from_json(const nlohmann::json& doc);

 protected:
  Vector predict_impl(const Matrix& inputs) const override;

 private:
  std::vector<CartTree> trees_;
  Scalar base_score_;
  Scalar learning_rate_;
  Index n_features_;
  OutputMode mode_;
  int class_of_interest_;
};

std::unique_ptr<GbmModel> fit_gbm(const LabeledData& data, const GbmSpec& spec,
                                  OutputMode mode = OutputMode::Regression,
                                  int class_of_interest = 0);

}  // namespace pdfool
