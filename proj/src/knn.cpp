#include "pdfool/knn.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "pdfool/serialize.hpp"

namespace pdfool {

KnnModel::KnnModel(Matrix train_features, Vector train_target, int k,
                   OutputMode mode, int class_of_interest)
    : train_features_(std::move(train_features)),
      train_target_(std::move(train_target)),
      k_(k),
      mode_(mode),
      class_of_interest_(class_of_interest) {
  if (k_ < 1) throw std::invalid_argument("KnnModel: k must be >= 1");
  if (static_cast<Index>(k_) > train_features_.rows()) {
    throw std::invalid_argument("KnnModel: k exceeds training rows");
  }
  if (train_target_.size() != train_features_.rows()) {
    throw std::invalid_argument("KnnModel: target length mismatch");
  }
}

Vector KnnModel::predict_impl(const Matrix& inputs) const {
  const Index n_train = train_features_.rows();
  std::vector<std::pair<Scalar, Index>> ranked(
      static_cast<std::size_t>(n_train));
  Vector out(inputs.rows());
  for (Index i = 0; i < inputs.rows(); ++i) {
    for (Index t = 0; t < n_train; ++t) {
      ranked[static_cast<std::size_t>(t)] = {
          (train_features_.row(t) - inputs.row(i)).squaredNorm(), t};
    }
    std::partial_sort(ranked.begin(), ranked.begin() + k_, ranked.end());
    Scalar sum = 0.0;
    for (int j = 0; j < k_; ++j) {
      sum += train_target_[ranked[static_cast<std::size_t>(j)].second];
    }
    out[i] = sum / static_cast<Scalar>(k_);
  }
  if (mode_ == OutputMode::ClassProbability && class_of_interest_ == 0) {
    return Vector(1.0 - out.array());
  }
  return out;
}

nlohmann::json KnnModel::to_json() const {
  return {{"family", family()},
          {"output_mode", detail::to_string(mode_)},
          {"class_of_interest", class_of_interest_},
          {"k", k_},
          {"train_features", detail::matrix_to_json(train_features_)},
          {"train_target", detail::vector_to_json(train_target_)}};
}

std::unique_ptr<KnnModel> KnnModel::from_json(const nlohmann::json& doc) {
  return std::make_unique<KnnModel>(
      detail::matrix_from_json(doc.at("train_features")),
      detail::vector_from_json(doc.at("train_target")), doc.at("k").get<int>(),
      detail::output_mode_from_string(doc.at("output_mode").get<std::string>()),
      doc.at("class_of_interest").get<int>());
}

std::unique_ptr<KnnModel> fit_knn(const LabeledData& data, const KnnSpec& spec,
                                  OutputMode mode, int class_of_interest) {
  if (mode == OutputMode::ClassProbability) validate_binary_labels(data.target);
  return std::make_unique<KnnModel>(data.features.values(), data.target, spec.k,
                                    mode, class_of_interest);
}

}  // namespace pdfool
