#include "pdfool/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "pdfool/rng.hpp"

namespace pdfool {

namespace {

void validate(const Matrix& values, const std::vector<std::string>& names,
              const std::vector<ColumnKind>& kinds) {
  if (values.rows() < 1 || values.cols() < 1) {
    throw std::invalid_argument("Dataset: needs at least 1 row and 1 column");
  }
  if (static_cast<Index>(names.size()) != values.cols() ||
      static_cast<Index>(kinds.size()) != values.cols()) {
    throw std::invalid_argument(
        "Dataset: column_names/column_kinds size must match column count");
  }
  std::unordered_set<std::string> seen;
  for (const auto& name : names) {
    if (name.empty()) throw std::invalid_argument("Dataset: empty column name");
    if (!seen.insert(name).second) {
      throw std::invalid_argument("Dataset: duplicate column name '" + name + "'");
    }
  }
  for (Index j = 0; j < values.cols(); ++j) {
    for (Index i = 0; i < values.rows(); ++i) {
      const Scalar v = values(i, j);
      if (!std::isfinite(v)) {
        throw std::invalid_argument("Dataset: non-finite value at row " +
                                    std::to_string(i) + ", column '" + names[j] +
                                    "'");
      }
      if (kinds[j] == ColumnKind::CategoricalInteger &&
          v != std::floor(v)) {
        throw std::invalid_argument(
            "Dataset: categorical column '" + names[j] +
            "' holds non-integer value at row " + std::to_string(i));
      }
    }
  }
}

std::vector<std::string> default_names(Index n_cols) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(n_cols));
  for (Index j = 0; j < n_cols; ++j) names.push_back("X" + std::to_string(j + 1));
  return names;
}

}  // namespace

Dataset::Dataset(Matrix values, std::vector<std::string> column_names,
                 std::vector<ColumnKind> column_kinds)
    : values_(std::move(values)),
      names_(std::move(column_names)),
      kinds_(std::move(column_kinds)) {
  validate(values_, names_, kinds_);
}

Dataset::Dataset(Matrix values)
    : values_(std::move(values)),
      names_(default_names(values_.cols())),
      kinds_(static_cast<std::size_t>(values_.cols()), ColumnKind::Continuous) {
  validate(values_, names_, kinds_);
}

Index Dataset::column_index(const std::string& name) const {
  for (std::size_t j = 0; j < names_.size(); ++j) {
    if (names_[j] == name) return static_cast<Index>(j);
  }
  throw std::invalid_argument("Dataset: no column named '" + name + "'");
}

Dataset Dataset::with_values(Matrix values) const {
  if (values.rows() != values_.rows() || values.cols() != values_.cols()) {
    throw std::invalid_argument("Dataset::with_values: shape mismatch");
  }
  return Dataset(std::move(values), names_, kinds_);
}

ColumnStats column_stats(const Dataset& data) {
  const Matrix& values = data.values();
  const auto n = static_cast<Scalar>(values.rows());
  ColumnStats stats;
  stats.min = values.colwise().minCoeff();
  stats.max = values.colwise().maxCoeff();
  stats.mean = values.colwise().mean();
  stats.sd.resize(values.cols());
  for (Index j = 0; j < values.cols(); ++j) {
    if (stats.min[j] == stats.max[j]) {
      stats.sd[j] = 0.0;  // constant column, exact zero
      continue;
    }
    stats.sd[j] =
        std::sqrt((values.col(j).array() - stats.mean[j]).square().sum() / n);
  }
  return stats;
}

Scalar friedman_response(Scalar x1, Scalar x2, Scalar x3, Scalar x4, Scalar x5) {
  return 10.0 * std::sin(std::numbers::pi * x1 * x2) +
         20.0 * (x3 - 0.5) * (x3 - 0.5) + 10.0 * x4 + 5.0 * x5;
}

LabeledData generate_friedman(Index n_rows, Index n_noise_extra,
                              std::uint64_t seed) {
  if (n_rows < 1) {
    throw std::invalid_argument("generate_friedman: n_rows must be >= 1");
  }
  if (n_noise_extra < 0) {
    throw std::invalid_argument("generate_friedman: n_noise_extra must be >= 0");
  }
  const Index n_cols = 5 + n_noise_extra;
  Rng rng(seed);
  Matrix values(n_rows, n_cols);
  for (Index i = 0; i < n_rows; ++i) {
    for (Index j = 0; j < n_cols; ++j) values(i, j) = rng.uniform();
  }
  Vector target(n_rows);
  for (Index i = 0; i < n_rows; ++i) {
    target[i] = friedman_response(values(i, 0), values(i, 1), values(i, 2),
                                  values(i, 3), values(i, 4));
  }
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(n_cols));
  for (Index j = 0; j < 5; ++j) names.push_back("X" + std::to_string(j + 1));
  for (Index j = 0; j < n_noise_extra; ++j) {
    names.push_back("N" + std::to_string(j + 1));
  }
  std::vector<ColumnKind> kinds(static_cast<std::size_t>(n_cols),
                                ColumnKind::Continuous);
  return LabeledData{Dataset(std::move(values), std::move(names), std::move(kinds)),
                     std::move(target)};
}

LabeledData generate_heart_like(Index n_rows, std::uint64_t seed) {
  if (n_rows < 1) {
    throw std::invalid_argument("generate_heart_like: n_rows must be >= 1");
  }
  Rng rng(seed);

  const std::vector<std::string> names = {
      "age", "sex",    "cp",  "trtbps", "chol", "fbs",  "restecg",
      "thalachh", "exng", "oldpeak", "slp", "caa", "thall"};
  const std::vector<ColumnKind> kinds = {
      ColumnKind::Continuous,         ColumnKind::CategoricalInteger,
      ColumnKind::CategoricalInteger, ColumnKind::Continuous,
      ColumnKind::Continuous,         ColumnKind::CategoricalInteger,
      ColumnKind::CategoricalInteger, ColumnKind::Continuous,
      ColumnKind::CategoricalInteger, ColumnKind::Continuous,
      ColumnKind::CategoricalInteger, ColumnKind::CategoricalInteger,
      ColumnKind::CategoricalInteger};

  Matrix values(n_rows, 13);
  Vector score(n_rows);
  for (Index i = 0; i < n_rows; ++i) {
    const Scalar age = rng.uniform(29.0, 77.0);
    const Scalar sex = static_cast<Scalar>(rng.below(2));
    const Scalar cp = static_cast<Scalar>(rng.below(4));
    const Scalar trtbps = rng.uniform(94.0, 200.0);
    const Scalar chol = rng.uniform(126.0, 420.0);
    const Scalar fbs = static_cast<Scalar>(rng.below(2));
    const Scalar restecg = static_cast<Scalar>(rng.below(3));
    const Scalar thalachh = rng.uniform(71.0, 202.0);
    const Scalar exng = static_cast<Scalar>(rng.below(2));
    const Scalar oldpeak = rng.uniform(0.0, 6.2);
    const Scalar slp = static_cast<Scalar>(rng.below(3));
    const Scalar caa = static_cast<Scalar>(rng.below(5));
    const Scalar thall = static_cast<Scalar>(rng.below(4));
    values.row(i) << age, sex, cp, trtbps, chol, fbs, restecg, thalachh, exng,
        oldpeak, slp, caa, thall;

    // Nonlinear risk-like score with interactions across the continuous
    // columns; categorical terms enter additively.
    const Scalar age01 = (age - 29.0) / 48.0;
    const Scalar thal01 = (thalachh - 71.0) / 131.0;
    const Scalar bp01 = (trtbps - 94.0) / 106.0;
    score[i] = 2.2 * std::sin(std::numbers::pi * age01 * thal01) +
               1.8 * (bp01 - 0.5) * (bp01 - 0.5) * ((chol - 126.0) / 294.0) -
               1.4 * thal01 + 1.1 * oldpeak / 6.2 + 0.8 * sex + 0.35 * cp -
               0.3 * slp + 0.25 * caa + 0.2 * exng + 0.6 * age01 +
               0.4 * rng.normal();
  }

  // Threshold at the sample median for an evenly-distributed binary target.
  std::vector<Scalar> sorted(score.data(), score.data() + n_rows);
  std::sort(sorted.begin(), sorted.end());
  const Scalar median = sorted[static_cast<std::size_t>((n_rows - 1) / 2)];
  Vector target(n_rows);
  for (Index i = 0; i < n_rows; ++i) target[i] = score[i] > median ? 1.0 : 0.0;

  return LabeledData{Dataset(std::move(values), names, kinds), std::move(target)};
}

std::string format_value(Scalar value) {
  char buffer[40];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

Scalar parse_cell(const std::string& cell, std::size_t line_no,
                  const std::string& column) {
  std::size_t begin = cell.find_first_not_of(" \t\r");
  if (begin == std::string::npos) {
    throw std::runtime_error("load_csv: empty cell at line " +
                             std::to_string(line_no) + ", column '" + column +
                             "'");
  }
  std::size_t end = cell.find_last_not_of(" \t\r") + 1;
  Scalar value = 0;
  const auto [ptr, ec] =
      std::from_chars(cell.data() + begin, cell.data() + end, value);
  if (ec != std::errc() || ptr != cell.data() + end) {
    throw std::runtime_error("load_csv: cannot parse '" +
                             cell.substr(begin, end - begin) +
                             "' as a number at line " + std::to_string(line_no) +
                             ", column '" + column + "'");
  }
  return value;
}

}  // namespace

namespace {

struct ParsedCsv {
  std::vector<std::string> header;
  std::vector<std::vector<Scalar>> rows;
};

ParsedCsv parse_numeric_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_csv: cannot open file '" + path.string() +
                             "'");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("load_csv: missing header row in '" +
                             path.string() + "'");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  ParsedCsv parsed;
  parsed.header = split_line(line);
  {
    std::unordered_set<std::string> seen;
    for (const auto& name : parsed.header) {
      if (name.empty()) {
        throw std::runtime_error("load_csv: empty header name in '" +
                                 path.string() + "'");
      }
      if (!seen.insert(name).second) {
        throw std::runtime_error("load_csv: duplicate header '" + name + "'");
      }
    }
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != parsed.header.size()) {
      throw std::runtime_error(
          "load_csv: line " + std::to_string(line_no) + " has " +
          std::to_string(cells.size()) + " cells, expected " +
          std::to_string(parsed.header.size()));
    }
    std::vector<Scalar> row(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      row[j] = parse_cell(cells[j], line_no, parsed.header[j]);
    }
    parsed.rows.push_back(std::move(row));
  }
  if (parsed.rows.empty()) {
    throw std::runtime_error("load_csv: no data rows in '" + path.string() +
                             "'");
  }
  return parsed;
}

void check_categoricals_known(const std::vector<std::string>& header,
                              const std::set<std::string>& categoricals) {
  for (const auto& name : categoricals) {
    if (std::find(header.begin(), header.end(), name) == header.end()) {
      throw std::runtime_error("load_csv: declared categorical column '" + name +
                               "' not found in header");
    }
  }
}

}  // namespace

LabeledData load_csv(const std::filesystem::path& path,
                     const std::string& target_column,
                     const std::set<std::string>& categorical_columns) {
  ParsedCsv parsed = parse_numeric_csv(path);
  const std::vector<std::string>& header = parsed.header;
  const std::vector<std::vector<Scalar>>& rows = parsed.rows;

  Index target_idx = -1;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == target_column) target_idx = static_cast<Index>(j);
  }
  if (target_idx < 0) {
    throw std::runtime_error("load_csv: target column '" + target_column +
                             "' not found in header");
  }
  check_categoricals_known(header, categorical_columns);
  if (categorical_columns.count(target_column)) {
    throw std::runtime_error(
        "load_csv: target column cannot be declared categorical");
  }

  const Index n_rows = static_cast<Index>(rows.size());
  const Index n_features = static_cast<Index>(header.size()) - 1;
  if (n_features < 1) {
    throw std::runtime_error("load_csv: no feature columns besides the target");
  }
  Matrix values(n_rows, n_features);
  Vector target(n_rows);
  std::vector<std::string> names;
  std::vector<ColumnKind> kinds;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (static_cast<Index>(j) == target_idx) continue;
    names.push_back(header[j]);
    kinds.push_back(categorical_columns.count(header[j])
                        ? ColumnKind::CategoricalInteger
                        : ColumnKind::Continuous);
  }
  for (Index i = 0; i < n_rows; ++i) {
    Index col = 0;
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (static_cast<Index>(j) == target_idx) {
        target[i] = rows[static_cast<std::size_t>(i)][j];
      } else {
        values(i, col++) = rows[static_cast<std::size_t>(i)][j];
      }
    }
  }
  return LabeledData{Dataset(std::move(values), std::move(names), std::move(kinds)),
                     std::move(target)};
}

Dataset load_dataset_csv(const std::filesystem::path& path,
                         const std::set<std::string>& categorical_columns) {
  ParsedCsv parsed = parse_numeric_csv(path);
  check_categoricals_known(parsed.header, categorical_columns);
  const Index n_rows = static_cast<Index>(parsed.rows.size());
  const Index n_cols = static_cast<Index>(parsed.header.size());
  Matrix values(n_rows, n_cols);
  for (Index i = 0; i < n_rows; ++i) {
    for (Index j = 0; j < n_cols; ++j) {
      values(i, j) =
          parsed.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  std::vector<ColumnKind> kinds;
  kinds.reserve(parsed.header.size());
  for (const auto& name : parsed.header) {
    kinds.push_back(categorical_columns.count(name)
                        ? ColumnKind::CategoricalInteger
                        : ColumnKind::Continuous);
  }
  return Dataset(std::move(values), std::move(parsed.header), std::move(kinds));
}

namespace {

void write_csv(std::ostream& out, const Matrix& values,
               const std::vector<std::string>& names, const Vector* target,
               const std::string& target_name) {
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (j > 0) out << ',';
    out << names[j];
  }
  if (target) out << ',' << target_name;
  out << '\n';
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_value(values(i, j));
    }
    if (target) out << ',' << format_value((*target)[i]);
    out << '\n';
  }
}

}  // namespace

void save_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("save_csv: cannot write '" + path.string() + "'");
  }
  write_csv(out, data.values(), data.column_names(), nullptr, "");
}

void save_csv(const LabeledData& data, const std::string& target_name,
              const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("save_csv: cannot write '" + path.string() + "'");
  }
  write_csv(out, data.features.values(), data.features.column_names(),
            &data.target, target_name);
}

}  // namespace pdfool
