#pragma once

#include <memory>

#include "pdfool/model.hpp"

namespace pdfool {

/// Least-squares linear model. In ClassProbability mode the linear response is
/// fit to the 0/1 labels and clamped to [0, 1] at prediction time.
class LinearModel : public DifferentiableModel {
 public:
  LinearModel(Vector coefficients, Scalar intercept, OutputMode mode,
              int class_of_interest, bool ridge_fallback_used = false);

  const Vector& coefficients() const { return coefficients_; }
  Scalar intercept() const { return intercept_; }
  int class_of_interest() const { return class_of_interest_; }
  bool ridge_fallback_used() const { return ridge_fallback_used_; }

  Index n_features() const override { return coefficients_.size(); }
  std::string family() const override { return "linear"; }
  OutputMode output_mode() const override { return mode_; }
  nlohmann::json to_json() const override;
  static std::unique_ptr<LinearModel> from_json(const nlohmann::json& doc);

 protected:
  Vector predict_impl(const Matrix& inputs) const override;
  Matrix input_gradient_impl(const Matrix& inputs) const override;

 private:
  Vector coefficients_;
  Scalar intercept_;
  OutputMode mode_;
  int class_of_interest_;
  bool ridge_fallback_used_;
};

/// Ordinary least squares with intercept. Rank-deficient systems fall back to
/// a ridge solve with the given lambda; the model records that this happened.
std::unique_ptr<LinearModel> fit_linear(const LabeledData& data,
                                        OutputMode mode = OutputMode::Regression,
                                        int class_of_interest = 0,
                                        Scalar ridge_lambda = 1e-8);

}  // namespace pdfool
