#include "pdfool/model.hpp"

#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "pdfool/forest.hpp"
#include "pdfool/gbm.hpp"
#include "pdfool/knn.hpp"
#include "pdfool/linear.hpp"
#include "pdfool/mlp.hpp"
#include "pdfool/tree.hpp"

namespace pdfool {

Vector Model::predict(const Matrix& inputs) const {
  if (inputs.cols() != n_features()) {
    throw std::invalid_argument(
        "Model::predict: input has " + std::to_string(inputs.cols()) +
        " columns, model was fitted on " + std::to_string(n_features()));
  }
  Vector out = predict_impl(inputs);
  if (!out.allFinite()) {
    throw std::runtime_error("Model::predict: non-finite prediction from " +
                             family() + " model");
  }
  return out;
}

Matrix DifferentiableModel::input_gradient(const Matrix& inputs) const {
  if (inputs.cols() != n_features()) {
    throw std::invalid_argument(
        "Model::input_gradient: input has " + std::to_string(inputs.cols()) +
        " columns, model was fitted on " + std::to_string(n_features()));
  }
  return input_gradient_impl(inputs);
}

const DifferentiableModel* as_differentiable(const Model& model) {
  return dynamic_cast<const DifferentiableModel*>(&model);
}

const DifferentiableModel& require_differentiable(const Model& model) {
  const DifferentiableModel* differentiable = as_differentiable(model);
  if (!differentiable) {
    throw std::invalid_argument(
        "non-differentiable model '" + model.family() +
        "': input gradients are only available for linear and mlp; "
        "use the genetic attack for this model");
  }
  return *differentiable;
}

void validate_binary_labels(const Vector& target) {
  for (Index i = 0; i < target.size(); ++i) {
    if (target[i] != 0.0 && target[i] != 1.0) {
      throw std::invalid_argument(
          "classification fit: target labels must be 0 or 1 (row " +
          std::to_string(i) + " is " + std::to_string(target[i]) + ")");
    }
  }
}

std::unique_ptr<Model> model_from_json(const nlohmann::json& doc) {
  const std::string family = doc.at("family").get<std::string>();
  if (family == "linear") return LinearModel::from_json(doc);
  if (family == "tree") return TreeModel::from_json(doc);
  if (family == "forest") return ForestModel::from_json(doc);
  if (family == "gbm") return GbmModel::from_json(doc);
  if (family == "knn") return KnnModel::from_json(doc);
  if (family == "mlp") return MlpModel::from_json(doc);
  throw std::runtime_error("model_from_json: unknown family '" + family + "'");
}

std::unique_ptr<Model> load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_model: cannot open '" + path.string() + "'");
  }
  nlohmann::json doc;
  in >> doc;
  return model_from_json(doc);
}

void save_model(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("save_model: cannot write '" + path.string() +
                             "'");
  }
  out << model.to_json().dump(2) << '\n';
}

}  // namespace pdfool
