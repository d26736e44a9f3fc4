#pragma once

#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "pdfool/model.hpp"
#include "pdfool/types.hpp"

namespace pdfool::detail {

inline std::string to_string(OutputMode mode) {
  return mode == OutputMode::Regression ? "regression" : "class_probability";
}

inline OutputMode output_mode_from_string(const std::string& text) {
  if (text == "regression") return OutputMode::Regression;
  if (text == "class_probability") return OutputMode::ClassProbability;
  throw std::runtime_error("unknown output mode '" + text + "'");
}

inline nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

inline Vector vector_from_json(const nlohmann::json& arr) {
  Vector v(static_cast<Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    v[static_cast<Index>(i)] = arr[i].get<Scalar>();
  }
  return v;
}

inline nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const nlohmann::json& rows) {
  if (rows.empty()) throw std::runtime_error("matrix JSON: empty row list");
  const Index n = static_cast<Index>(rows.size());
  const Index p = static_cast<Index>(rows[0].size());
  Matrix m(n, p);
  for (Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (static_cast<Index>(row.size()) != p) {
      throw std::runtime_error("matrix JSON: ragged rows");
    }
    for (Index j = 0; j < p; ++j) {
      m(i, j) = row[static_cast<std::size_t>(j)].get<Scalar>();
    }
  }
  return m;
}

}  // namespace pdfool::detail
