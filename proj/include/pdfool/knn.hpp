#pragma once

#include <memory>

#include "pdfool/model.hpp"

namespace pdfool {

struct KnnSpec {
  int k = 5;
};

/// k-nearest-neighbours on raw, unstandardized features with Euclidean
/// distance; ties resolve by training-row order. Predicts the mean target of
/// the k neighbours.
class KnnModel : public Model {
 public:
  KnnModel(Matrix train_features, Vector train_target, int k, OutputMode mode,
           int class_of_interest);

  int k() const { return k_; }

  Index n_features() const override { return train_features_.cols(); }
  std::string family() const override { return "knn"; }
  OutputMode output_mode() const override { return mode_; }
  nlohmann::json to_json() const override;
  static std::unique_ptr<KnnModel> from_json(const nlohmann::json& doc);

 protected:
  Vector predict_impl(const Matrix& inputs) const override;

 private:
  Matrix train_features_;
  Vector train_target_;
  int k_;
  OutputMode mode_;
  int class_of_interest_;
};

std::unique_ptr<KnnModel> fit_knn(const LabeledData& data, const KnnSpec& spec,
                                  OutputMode mode = OutputMode::Regression,
                                  int class_of_interest = 0);

}  // namespace pdfool
