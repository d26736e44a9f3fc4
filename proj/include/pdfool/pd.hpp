#pragma once

#include <filesystem>

#include "pdfool/dataset.hpp"
#include "pdfool/model.hpp"
#include "pdfool/types.hpp"

namespace pdfool {

/// Evaluation points for one explained column; strictly increasing, at least
/// two of them.
struct Grid {
  Index column = 0;
  Vector points;
};

void validate_grid(const Grid& grid);

/// Partial dependence values over a grid, with the mean-removed variant kept
/// alongside. centered sums to zero by construction.
struct PDProfile {
  Grid grid;
  Vector values;
  Vector centered;
};

/// n_points equidistant values spanning the observed [min, max] of column c.
/// Rejects constant (zero-range) and categorical columns.
Grid build_grid(const Dataset& data, Index column, Index n_points = 40);

/// Mean that does not depend on element order: values are sorted, then summed
/// pairwise. Shuffling the input leaves the result bit-identical.
Scalar stable_mean(Vector values);

/// The standard estimator: value at z is the mean over rows of the model
/// output with column c replaced by z. The input data is never modified.
PDProfile partial_dependence(const Model& model, const Matrix& data,
                             const Grid& grid);
PDProfile partial_dependence(const Model& model, const Dataset& data,
                             const Grid& grid);

/// CSV with columns (z, pd, pd_centered).
void save_profile(const PDProfile& profile, const std::filesystem::path& path);

}  // namespace pdfool
