#include "pdfool/linear.hpp"

#include <stdexcept>

#include <nlohmann/json.hpp>

#include "pdfool/serialize.hpp"

namespace pdfool {

LinearModel::LinearModel(Vector coefficients, Scalar intercept, OutputMode mode,
                         int class_of_interest, bool ridge_fallback_used)
    : coefficients_(std::move(coefficients)),
      intercept_(intercept),
      mode_(mode),
      class_of_interest_(class_of_interest),
      ridge_fallback_used_(ridge_fallback_used) {
  if (coefficients_.size() < 1) {
    throw std::invalid_argument("LinearModel: needs at least one coefficient");
  }
}

Vector LinearModel::predict_impl(const Matrix& inputs) const {
  Vector raw = (inputs * coefficients_).array() + intercept_;
  if (mode_ == OutputMode::Regression) return raw;
  Vector p1 = raw.cwiseMax(0.0).cwiseMin(1.0);
  return class_of_interest_ == 1 ? p1 : Vector(1.0 - p1.array());
}

Matrix LinearModel::input_gradient_impl(const Matrix& inputs) const {
  if (mode_ == OutputMode::Regression) {
    return Vector::Ones(inputs.rows()) * coefficients_.transpose();
  }
  // Clamp makes the output piecewise linear: zero slope outside (0, 1).
  Vector raw = (inputs * coefficients_).array() + intercept_;
  Vector active =
      ((raw.array() > 0.0) && (raw.array() < 1.0)).cast<Scalar>().matrix();
  const Scalar sign = class_of_interest_ == 1 ? 1.0 : -1.0;
  return sign * active * coefficients_.transpose();
}

nlohmann::json LinearModel::to_json() const {
  nlohmann::json doc;
  doc["family"] = family();
  doc["output_mode"] = detail::to_string(mode_);
  doc["class_of_interest"] = class_of_interest_;
  doc["coefficients"] = detail::vector_to_json(coefficients_);
  doc["intercept"] = intercept_;
  doc["ridge_fallback_used"] = ridge_fallback_used_;
  return doc;
}

std::unique_ptr<LinearModel> LinearModel::from_json(const nlohmann::json& doc) {
  return std::make_unique<LinearModel>(
      detail::vector_from_json(doc.at("coefficients")),
      doc.at("intercept").get<Scalar>(),
      detail::output_mode_from_string(doc.at("output_mode").get<std::string>()),
      doc.at("class_of_interest").get<int>(),
      doc.value("ridge_fallback_used", false));
}

std::unique_ptr<LinearModel> fit_linear(const LabeledData& data, OutputMode mode,
                                        int class_of_interest,
                                        Scalar ridge_lambda) {
  const Matrix& features = data.features.values();
  const Index n = features.rows();
  const Index p = features.cols();
  Matrix design(n, p + 1);
  design.leftCols(p) = features;
  design.col(p).setOnes();

  Eigen::ColPivHouseholderQR<Matrix> qr(design);
  Vector solution;
  bool fallback = false;
  if (qr.rank() == p + 1) {
    solution = qr.solve(data.target);
  } else {
    fallback = true;
    Matrix normal = design.transpose() * design;
    normal.diagonal().array() += ridge_lambda;
    solution = normal.ldlt().solve(design.transpose() * data.target);
  }
  return std::make_unique<LinearModel>(solution.head(p), solution[p], mode,
                                       class_of_interest, fallback);
}

}  // namespace pdfool
