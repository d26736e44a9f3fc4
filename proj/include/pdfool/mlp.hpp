#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "pdfool/model.hpp"

namespace pdfool {

struct MlpSpec {
  int layers = 3;            // hidden layers
  int neurons = 32;          // per hidden layer
  int epochs = 500;
  Scalar learning_rate = 1e-3;
  std::uint64_t seed = 0;    // He initialization
};

/// Fully-connected ReLU network with a single linear output unit; the output
/// passes through the logistic function in ClassProbability mode. Weights are
/// frozen after fitting, so predictions are bit-stable across calls.
class MlpModel : public DifferentiableModel {
 public:
  MlpModel(std::vector<Matrix> weights, std::vector<Vector> biases,
           OutputMode mode, int class_of_interest);

  const std::vector<Matrix>& weights() const { return weights_; }
  const std::vector<Vector>& biases() const { return biases_; }

  Index n_features() const override { return weights_.front().rows(); }
  std::string family() const override { return "mlp"; }
  OutputMode output_mode() const override { return mode_; }
  nlohmann::json to_json() const override;
  static std::unique_ptr<MlpModel> from_json(const nlohmann::json& doc);

 protected:
  Vector predict_impl(const Matrix& inputs) const override;
  Matrix input_gradient_impl(const Matrix& inputs) const override;

 private:
  // Raw output-unit value per row, with hidden activations kept for backprop.
  Vector raw_forward(const Matrix& inputs,
                     std::vector<Matrix>* activations) const;

  std::vector<Matrix> weights_;  // weights_[l]: fan_in x fan_out
  std::vector<Vector> biases_;
  OutputMode mode_;
  int class_of_interest_;
};

/// Full-batch Adam on squared error (regression) or cross-entropy
/// (classification). Deterministic given MlpSpec::seed.
std::unique_ptr<MlpModel> fit_mlp(const LabeledData& data, const MlpSpec& spec,
                                  OutputMode mode = OutputMode::Regression,
                                  int class_of_interest = 0);

}  // namespace pdfool
