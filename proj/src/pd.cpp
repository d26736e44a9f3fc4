#include "pdfool/pd.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace pdfool {

void validate_grid(const Grid& grid) {
  if (grid.points.size() < 2) {
    throw std::invalid_argument("Grid: needs at least 2 points");
  }
  if (grid.column < 0) throw std::invalid_argument("Grid: negative column");
  for (Index i = 1; i < grid.points.size(); ++i) {
    if (!(grid.points[i] > grid.points[i - 1])) {
      throw std::invalid_argument("Grid: points must be strictly increasing");
    }
  }
}

Grid build_grid(const Dataset& data, Index column, Index n_points) {
  if (column < 0 || column >= data.n_cols()) {
    throw std::invalid_argument("build_grid: column index out of range");
  }
  if (data.column_kinds()[static_cast<std::size_t>(column)] !=
      ColumnKind::Continuous) {
    throw std::invalid_argument("build_grid: column '" +
                                data.column_names()[static_cast<std::size_t>(
                                    column)] +
                                "' is categorical; grids need a continuous "
                                "column");
  }
  if (n_points < 2) {
    throw std::invalid_argument("build_grid: n_points must be >= 2");
  }
  const Scalar lo = data.values().col(column).minCoeff();
  const Scalar hi = data.values().col(column).maxCoeff();
  if (lo == hi) {
    throw std::invalid_argument("build_grid: column '" +
                                data.column_names()[static_cast<std::size_t>(
                                    column)] +
                                "' is constant; grid range is empty");
  }
  Vector points(n_points);
  for (Index i = 0; i < n_points; ++i) {
    points[i] = lo + (hi - lo) * static_cast<Scalar>(i) /
                         static_cast<Scalar>(n_points - 1);
  }
  points[n_points - 1] = hi;  // exact endpoint
  Grid grid{column, std::move(points)};
  validate_grid(grid);
  return grid;
}

Scalar stable_mean(Vector values) {
  std::sort(values.data(), values.data() + values.size());
  // Pairwise reduction over the sorted values.
  std::vector<Scalar> buffer(values.data(), values.data() + values.size());
  std::size_t count = buffer.size();
  while (count > 1) {
    std::size_t out = 0;
    for (std::size_t i = 0; i + 1 < count; i += 2) {
      buffer[out++] = buffer[i] + buffer[i + 1];
    }
    if (count % 2 == 1) buffer[out++] = buffer[count - 1];
    count = out;
  }
  return buffer[0] / static_cast<Scalar>(values.size());
}

PDProfile partial_dependence(const Model& model, const Matrix& data,
                             const Grid& grid) {
  validate_grid(grid);
  if (data.rows() < 1) {
    throw std::invalid_argument("partial_dependence: empty dataset");
  }
  if (grid.column >= data.cols()) {
    throw std::invalid_argument("partial_dependence: grid column out of range");
  }
  const Index n_points = grid.points.size();
  Matrix working = data;
  Vector values(n_points);
  for (Index k = 0; k < n_points; ++k) {
    working.col(grid.column).setConstant(grid.points[k]);
    values[k] = stable_mean(model.predict(working));
  }
  PDProfile profile;
  profile.grid = grid;
  profile.centered = values.array() - stable_mean(values);
  profile.values = std::move(values);
  return profile;
}

PDProfile partial_dependence(const Model& model, const Dataset& data,
                             const Grid& grid) {
  return partial_dependence(model, data.values(), grid);
}

void save_profile(const PDProfile& profile, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("save_profile: cannot write '" + path.string() +
                             "'");
  }
  out << "z,pd,pd_centered\n";
  for (Index i = 0; i < profile.grid.points.size(); ++i) {
    out << format_value(profile.grid.points[i]) << ','
        << format_value(profile.values[i]) << ','
        << format_value(profile.centered[i]) << '\n';
  }
}

}  // namespace pdfool
