#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "pdfool/attack.hpp"
#include "pdfool/dataset.hpp"
#include "pdfool/mlp.hpp"
#include "pdfool/model.hpp"
#include "pdfool/pd.hpp"
#include "pdfool/rng.hpp"

namespace testutil {

using pdfool::Index;
using pdfool::Matrix;
using pdfool::Scalar;
using pdfool::Vector;

/// Independent PD oracle: the literal double loop over grid points and rows,
/// one single-row prediction at a time, plain sequential accumulation.
inline Vector brute_force_pd(const pdfool::Model& model, const Matrix& data,
                             const pdfool::Grid& grid) {
  Vector out(grid.points.size());
  for (Index k = 0; k < grid.points.size(); ++k) {
    Scalar acc = 0.0;
    for (Index i = 0; i < data.rows(); ++i) {
      Matrix row = data.row(i);
      row(0, grid.column) = grid.points[k];
      acc += model.predict(row)[0];
    }
    out[k] = acc / static_cast<Scalar>(data.rows());
  }
  return out;
}

/// Central finite difference of the attack loss for one cell.
inline Scalar fd_loss_cell(const pdfool::Model& model, Matrix x, Index i,
                           Index j, const pdfool::AttackConfig& config,
                           const Matrix& x_prime, Scalar h) {
  const Scalar base = x(i, j);
  x(i, j) = base + h;
  const Scalar up = pdfool::attack_loss(x, model, config, x_prime);
  x(i, j) = base - h;
  const Scalar down = pdfool::attack_loss(x, model, config, x_prime);
  return (up - down) / (2.0 * h);
}

struct FdCheck {
  bool passed = true;
  int checked_cells = 0;
  int skipped_cells = 0;
  Scalar worst_error = 0.0;
  Index worst_i = -1, worst_j = -1;
};

/// Compares an analytic loss gradient against central finite differences on
/// every free cell. Cells where two step sizes disagree with each other sit
/// next to a ReLU kink and are skipped.
inline FdCheck check_loss_gradient(const pdfool::Model& model, const Matrix& x,
                                   const pdfool::AttackConfig& config,
                                   const Matrix& x_prime, const Matrix& analytic,
                                   Scalar h = 1e-5, Scalar tolerance = 1e-4) {
  FdCheck result;
  for (Index j = 0; j < x.cols(); ++j) {
    if (config.constant_columns.count(j)) continue;
    for (Index i = 0; i < x.rows(); ++i) {
      const Scalar fd1 = fd_loss_cell(model, x, i, j, config, x_prime, h);
      const Scalar fd2 = fd_loss_cell(model, x, i, j, config, x_prime, h * 0.5);
      const Scalar fd_scale = std::max(std::abs(fd1), std::abs(fd2));
      if (std::abs(fd1 - fd2) > 1e-6 * std::max(fd_scale, 1e-3)) {
        ++result.skipped_cells;  // kink-adjacent
        continue;
      }
      const Scalar a = analytic(i, j);
      if (std::abs(a) < 1e-10 && std::abs(fd1) < 1e-7) {
        ++result.checked_cells;  // both zero to working precision
        continue;
      }
      const Scalar rel =
          std::abs(a - fd1) / std::max(std::max(std::abs(a), std::abs(fd1)),
                                       1e-10);
      ++result.checked_cells;
      if (rel > result.worst_error) {
        result.worst_error = rel;
        result.worst_i = i;
        result.worst_j = j;
      }
      if (rel > tolerance) result.passed = false;
    }
  }
  return result;
}

inline Matrix random_matrix(pdfool::Rng& rng, Index rows, Index cols,
                            Scalar lo = 0.0, Scalar hi = 1.0) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(lo, hi);
  }
  return m;
}

/// Small random ReLU network built directly from weights (no training).
inline std::unique_ptr<pdfool::MlpModel> random_mlp(
    pdfool::Rng& rng, Index n_features, int layers, int neurons,
    pdfool::OutputMode mode = pdfool::OutputMode::Regression,
    int class_of_interest = 0) {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
  Index fan_in = n_features;
  for (int l = 0; l < layers; ++l) {
    Matrix w(fan_in, neurons);
    for (Index i = 0; i < w.rows(); ++i) {
      for (Index j = 0; j < w.cols(); ++j) {
        w(i, j) = rng.normal(0.0, std::sqrt(2.0 / static_cast<Scalar>(fan_in)));
      }
    }
    weights.push_back(std::move(w));
    Vector b(neurons);
    for (Index j = 0; j < neurons; ++j) b[j] = rng.normal(0.0, 0.1);
    biases.push_back(std::move(b));
    fan_in = neurons;
  }
  Matrix w(fan_in, 1);
  for (Index i = 0; i < fan_in; ++i) w(i, 0) = rng.normal(0.0, 0.5);
  weights.push_back(std::move(w));
  Vector b(1);
  b[0] = rng.normal(0.0, 0.1);
  biases.push_back(std::move(b));
  return std::make_unique<pdfool::MlpModel>(std::move(weights),
                                            std::move(biases), mode,
                                            class_of_interest);
}

/// Unique scratch directory under the system temp root.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  static std::mt19937_64 engine(std::random_device{}());
  const auto dir = std::filesystem::temp_directory_path() /
                   ("pdfool_test_" + tag + "_" + std::to_string(engine()));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testutil
