#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "pdfool/dataset.hpp"
#include "pdfool/types.hpp"

namespace pdfool {

enum class OutputMode { Regression, ClassProbability };

/// Frozen predictor: one finite scalar per input row. Regression models emit
/// raw values; classification models emit the probability of the configured
/// class of interest. Parameters never change after fitting, so predict is
/// pure and safe to call concurrently.
class Model {
 public:
  virtual ~Model() = default;

  Vector predict(const Matrix& inputs) const;
  Vector predict(const Dataset& data) const { return predict(data.values()); }

  virtual Index n_features() const = 0;
  virtual std::string family() const = 0;
  virtual OutputMode output_mode() const = 0;

  virtual nlohmann::json to_json() const = 0;

 protected:
  virtual Vector predict_impl(const Matrix& inputs) const = 0;
};

/// Models that additionally expose the derivative of their output with
/// respect to each input cell.
class DifferentiableModel : public Model {
 public:
  /// Entry (i, j) is d output(row i) / d inputs(i, j).
  Matrix input_gradient(const Matrix& inputs) const;

 protected:
  virtual Matrix input_gradient_impl(const Matrix& inputs) const = 0;
};

/// Downcast helper; returns nullptr for models without input gradients.
const DifferentiableModel* as_differentiable(const Model& model);

/// Same, but throws a diagnostic pointing at the genetic attack.
const DifferentiableModel& require_differentiable(const Model& model);

/// Throws unless every label is exactly 0 or 1.
void validate_binary_labels(const Vector& target);

/// Self-describing JSON round trip (family tag plus parameters).
std::unique_ptr<Model> model_from_json(const nlohmann::json& doc);
std::unique_ptr<Model> load_model(const std::filesystem::path& path);
void save_model(const Model& model, const std::filesystem::path& path);

}  // namespace pdfool
