#include "pdfool/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "pdfool/adam.hpp"
#include "pdfool/rng.hpp"
#include "pdfool/serialize.hpp"

namespace pdfool {

namespace {

Vector sigmoid(const Vector& z) {
  Vector out(z.size());
  for (Index i = 0; i < z.size(); ++i) {
    if (z[i] >= 0.0) {
      out[i] = 1.0 / (1.0 + std::exp(-z[i]));
    } else {
      const Scalar e = std::exp(z[i]);
      out[i] = e / (1.0 + e);
    }
  }
  return out;
}

}  // namespace

MlpModel::MlpModel(std::vector<Matrix> weights, std::vector<Vector> biases,
                   OutputMode mode, int class_of_interest)
    : weights_(std::move(weights)),
      biases_(std::move(biases)),
      mode_(mode),
      class_of_interest_(class_of_interest) {
  if (weights_.empty() || weights_.size() != biases_.size()) {
    throw std::invalid_argument("MlpModel: inconsistent layer lists");
  }
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    if (weights_[l].cols() != biases_[l].size()) {
      throw std::invalid_argument("MlpModel: bias size mismatch at layer " +
                                  std::to_string(l));
    }
    if (l + 1 < weights_.size() &&
        weights_[l].cols() != weights_[l + 1].rows()) {
      throw std::invalid_argument("MlpModel: weight shape mismatch at layer " +
                                  std::to_string(l));
    }
  }
  if (weights_.back().cols() != 1) {
    throw std::invalid_argument("MlpModel: output layer must have one unit");
  }
}

Vector MlpModel::raw_forward(const Matrix& inputs,
                             std::vector<Matrix>* activations) const {
  Matrix current = inputs;
  if (activations) {
    activations->clear();
    activations->push_back(current);
  }
  const std::size_t n_hidden = weights_.size() - 1;
  for (std::size_t l = 0; l < n_hidden; ++l) {
    current = ((current * weights_[l]).rowwise() + biases_[l].transpose())
                  .cwiseMax(0.0);
    if (activations) activations->push_back(current);
  }
  return (current * weights_.back()).col(0).array() + biases_.back()[0];
}

Vector MlpModel::predict_impl(const Matrix& inputs) const {
  Vector z = raw_forward(inputs, nullptr);
  if (mode_ == OutputMode::Regression) return z;
  Vector p1 = sigmoid(z);
  return class_of_interest_ == 1 ? p1 : Vector(1.0 - p1.array());
}

Matrix MlpModel::input_gradient_impl(const Matrix& inputs) const {
  std::vector<Matrix> activations;
  Vector z = raw_forward(inputs, &activations);

  Vector delta;
  if (mode_ == OutputMode::Regression) {
    delta = Vector::Ones(inputs.rows());
  } else {
    Vector p1 = sigmoid(z);
    delta = p1.array() * (1.0 - p1.array());
    if (class_of_interest_ != 1) delta = -delta;
  }

  Matrix grad = delta * weights_.back().transpose();
  for (std::size_t l = weights_.size() - 1; l-- > 0;) {
    grad.array() *= (activations[l + 1].array() > 0.0).cast<Scalar>();
    grad = grad * weights_[l].transpose();
  }
  return grad;
}

nlohmann::json MlpModel::to_json() const {
  nlohmann::json weights = nlohmann::json::array();
  nlohmann::json biases = nlohmann::json::array();
  for (const Matrix& w : weights_) weights.push_back(detail::matrix_to_json(w));
  for (const Vector& b : biases_) biases.push_back(detail::vector_to_json(b));
  return {{"family", family()},
          {"output_mode", detail::to_string(mode_)},
          {"class_of_interest", class_of_interest_},
          {"weights", std::move(weights)},
          {"biases", std::move(biases)}};
}

std::unique_ptr<MlpModel> MlpModel::from_json(const nlohmann::json& doc) {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
  for (const auto& w : doc.at("weights")) {
    weights.push_back(detail::matrix_from_json(w));
  }
  for (const auto& b : doc.at("biases")) {
    biases.push_back(detail::vector_from_json(b));
  }
  return std::make_unique<MlpModel>(
      std::move(weights), std::move(biases),
      detail::output_mode_from_string(doc.at("output_mode").get<std::string>()),
      doc.at("class_of_interest").get<int>());
}

std::unique_ptr<MlpModel> fit_mlp(const LabeledData& data, const MlpSpec& spec,
                                  OutputMode mode, int class_of_interest) {
  if (spec.layers < 1) {
    throw std::invalid_argument("fit_mlp: layers must be >= 1");
  }
  if (spec.neurons < 1) {
    throw std::invalid_argument("fit_mlp: neurons must be >= 1");
  }
  if (spec.epochs < 0) {
    throw std::invalid_argument("fit_mlp: epochs must be >= 0");
  }
  if (spec.learning_rate <= 0.0) {
    throw std::invalid_argument("fit_mlp: learning_rate must be positive");
  }
  const bool classify = mode == OutputMode::ClassProbability;
  if (classify) validate_binary_labels(data.target);

  const Matrix& features = data.features.values();
  const Vector& target = data.target;
  const Index n = features.rows();
  const Index p = features.cols();

  Rng rng(spec.seed);
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
  auto he_layer = [&rng](Index fan_in, Index fan_out) {
    const Scalar scale = std::sqrt(2.0 / static_cast<Scalar>(fan_in));
    Matrix w(fan_in, fan_out);
    for (Index i = 0; i < fan_in; ++i) {
      for (Index j = 0; j < fan_out; ++j) w(i, j) = scale * rng.normal();
    }
    return w;
  };
  weights.push_back(he_layer(p, spec.neurons));
  biases.emplace_back(Vector::Zero(spec.neurons));
  for (int l = 1; l < spec.layers; ++l) {
    weights.push_back(he_layer(spec.neurons, spec.neurons));
    biases.emplace_back(Vector::Zero(spec.neurons));
  }
  weights.push_back(he_layer(spec.neurons, 1));
  biases.emplace_back(Vector::Zero(1));

  const AdamConfig adam_config{spec.learning_rate, 0.9, 0.999, 1e-8};
  std::vector<AdamState<Matrix>> weight_opt(weights.size(),
                                            AdamState<Matrix>(adam_config));
  std::vector<AdamState<Vector>> bias_opt(biases.size(),
                                          AdamState<Vector>(adam_config));

  const std::size_t n_layers = weights.size();
  std::vector<Matrix> activations;
  for (int epoch = 0; epoch < spec.epochs; ++epoch) {
    activations.clear();
    activations.push_back(features);
    for (std::size_t l = 0; l + 1 < n_layers; ++l) {
      activations.push_back(
          ((activations[l] * weights[l]).rowwise() + biases[l].transpose())
              .cwiseMax(0.0));
    }
    Vector z =
        (activations.back() * weights.back()).col(0).array() + biases.back()[0];

    Vector delta;
    if (classify) {
      delta = (sigmoid(z) - target) / static_cast<Scalar>(n);
    } else {
      delta = 2.0 * (z - target) / static_cast<Scalar>(n);
    }

    Matrix grad_w = activations.back().transpose() * delta;
    Vector grad_b(1);
    grad_b[0] = delta.sum();
    Matrix upstream = delta * weights.back().transpose();
    weight_opt[n_layers - 1].step(weights[n_layers - 1], grad_w);
    bias_opt[n_layers - 1].step(biases[n_layers - 1], grad_b);

    for (std::size_t l = n_layers - 1; l-- > 0;) {
      upstream.array() *= (activations[l + 1].array() > 0.0).cast<Scalar>();
      Matrix gw = activations[l].transpose() * upstream;
      Vector gb = upstream.colwise().sum().transpose();
      if (l > 0) upstream = upstream * weights[l].transpose();
      weight_opt[l].step(weights[l], gw);
      bias_opt[l].step(biases[l], gb);
    }
  }

  return std::make_unique<MlpModel>(std::move(weights), std::move(biases), mode,
                                    class_of_interest);
}

}  // namespace pdfool
