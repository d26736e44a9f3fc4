#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "pdfool/tree.hpp"

namespace pdfool {

struct ForestSpec {
  int n_trees = 100;
  int max_depth = 6;
  int min_samples_leaf = 2;
  std::uint64_t seed = 0;  // drives the bootstrap draws
};

/// Bagged ensemble of CART trees; output is the arithmetic mean of the
/// member-tree outputs.
class ForestModel : public Model {
 public:
  ForestModel(std::vector<CartTree> trees, Index n_features, OutputMode mode,
              int class_of_interest);

  const std::vector<CartTree>& trees() const { return trees_; }

  Index n_features() const override { return n_features_; }
  std::string family() const override { return "forest"; }
  OutputMode output_mode() const override { return mode_; }
  nlohmann::json to_json() const override;
  static std::unique_ptr<ForestModel> from_json(const nlohmann::json& doc);

 protected:
  Vector predict_impl(const Matrix& inputs) const override;

 private:
  std::vector<CartTree> trees_;
  Index n_features_;
  OutputMode mode_;
  int class_of_interest_;
};

std::unique_ptr<ForestModel> fit_forest(const LabeledData& data,
                                        const ForestSpec& spec,
                                        OutputMode mode = OutputMode::Regression,
                                        int class_of_interest = 0);

}  // namespace pdfool
