#include "pdfool/attack.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pdfool {

AttackConfig make_robustness_config(Grid grid, std::set<Index> constant_columns,
                                    bool centered) {
  AttackConfig config;
  config.strategy = AttackStrategy::Robustness;
  config.centered = centered;
  config.explained_column = grid.column;
  config.constant_columns = std::move(constant_columns);
  config.constant_columns.insert(grid.column);
  config.grid = std::move(grid);
  return config;
}

AttackConfig make_targeted_config(Grid grid, std::set<Index> constant_columns,
                                  Vector target, bool centered) {
  AttackConfig config;
  config.strategy = AttackStrategy::Targeted;
  config.centered = centered;
  config.explained_column = grid.column;
  config.constant_columns = std::move(constant_columns);
  config.constant_columns.insert(grid.column);
  config.grid = std::move(grid);
  config.target = std::move(target);
  return config;
}

void validate_attack_config(const AttackConfig& config, const Dataset& x_prime) {
  validate_grid(config.grid);
  if (config.explained_column != config.grid.column) {
    throw std::invalid_argument(
        "AttackConfig: explained_column differs from grid column");
  }
  if (config.explained_column < 0 ||
      config.explained_column >= x_prime.n_cols()) {
    throw std::invalid_argument("AttackConfig: explained column out of range");
  }
  if (!config.constant_columns.count(config.explained_column)) {
    throw std::invalid_argument(
        "AttackConfig: constant_columns must contain the explained column");
  }
  for (const Index column : config.constant_columns) {
    if (column < 0 || column >= x_prime.n_cols()) {
      throw std::invalid_argument(
          "AttackConfig: constant column index out of range");
    }
  }
  for (Index j = 0; j < x_prime.n_cols(); ++j) {
    if (x_prime.column_kinds()[static_cast<std::size_t>(j)] ==
            ColumnKind::CategoricalInteger &&
        !config.constant_columns.count(j)) {
      throw std::invalid_argument(
          "AttackConfig: categorical column '" +
          x_prime.column_names()[static_cast<std::size_t>(j)] +
          "' must be held constant; the attacks perturb real values only");
    }
  }
  if (config.strategy == AttackStrategy::Targeted) {
    if (!config.target) {
      throw std::invalid_argument(
          "AttackConfig: targeted strategy requires a target");
    }
    if (config.target->size() != config.grid.points.size()) {
      throw std::invalid_argument(
          "AttackConfig: target length " + std::to_string(config.target->size()) +
          " does not match grid size " +
          std::to_string(config.grid.points.size()));
    }
  } else if (config.target) {
    throw std::invalid_argument(
        "AttackConfig: robustness strategy takes no target");
  }
}

Scalar distance(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("distance: length mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
  if (a.size() == 0) throw std::invalid_argument("distance: empty vectors");
  return (a - b).squaredNorm() / static_cast<Scalar>(a.size());
}

AttackLoss::AttackLoss(const Model& model, const AttackConfig& config,
                       const Matrix& x_prime)
    : model_(model), config_(config) {
  if (config.strategy == AttackStrategy::Targeted) {
    if (!config.target) {
      throw std::invalid_argument("AttackLoss: targeted strategy needs target");
    }
    reference_ = *config.target;
  } else {
    const PDProfile original = partial_dependence(model, x_prime, config.grid);
    reference_ = config.centered ? original.centered : original.values;
  }
  if (reference_.size() != config.grid.points.size()) {
    throw std::invalid_argument("AttackLoss: reference length mismatch");
  }
}

Scalar AttackLoss::operator()(const Matrix& x) const {
  const PDProfile profile = partial_dependence(model_, x, config_.grid);
  const Vector& candidate = config_.centered ? profile.centered : profile.values;
  const Scalar d = distance(candidate, reference_);
  return config_.strategy == AttackStrategy::Targeted ? d : -d;
}

Scalar attack_loss(const Matrix& x, const Model& model,
                   const AttackConfig& config, const Matrix& x_prime) {
  if (x.rows() != x_prime.rows() || x.cols() != x_prime.cols()) {
    throw std::invalid_argument("attack_loss: X shape differs from X'");
  }
  return AttackLoss(model, config, x_prime)(x);
}

Scalar attack_loss(const Dataset& x, const Model& model,
                   const AttackConfig& config, const Dataset& x_prime) {
  validate_attack_config(config, x_prime);
  return attack_loss(x.values(), model, config, x_prime.values());
}

Vector build_target(TargetKind kind, const Grid& grid, Scalar amplitude) {
  validate_grid(grid);
  if (!std::isfinite(amplitude)) {
    throw std::invalid_argument("build_target: amplitude must be finite");
  }
  const Index n = grid.points.size();
  Vector target = Vector::Zero(n);
  if (kind == TargetKind::Constant) return target;
  const Scalar lo = grid.points[0];
  const Scalar hi = grid.points[n - 1];
  for (Index i = 0; i < n; ++i) {
    const Scalar t = (grid.points[i] - lo) / (hi - lo);  // 0..1 over the grid
    const Scalar ramp = amplitude * (t - 0.5);
    target[i] = kind == TargetKind::IncreasingRamp ? ramp : -ramp;
  }
  return target;
}

Vector load_target(const std::filesystem::path& path, const Grid& grid) {
  validate_grid(grid);
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_target: cannot open '" + path.string() +
                             "'");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("load_target: empty file '" + path.string() + "'");
  }
  std::vector<std::pair<Scalar, Scalar>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error("load_target: line " + std::to_string(line_no) +
                               " is not 'z,target'");
    }
    Scalar z = 0.0, value = 0.0;
    const auto zr =
        std::from_chars(line.data(), line.data() + comma, z);
    const auto vr = std::from_chars(line.data() + comma + 1,
                                    line.data() + line.size(), value);
    if (zr.ec != std::errc() || vr.ec != std::errc()) {
      throw std::runtime_error("load_target: cannot parse line " +
                               std::to_string(line_no));
    }
    rows.emplace_back(z, value);
  }
  if (static_cast<Index>(rows.size()) != grid.points.size()) {
    throw std::runtime_error(
        "load_target: file has " + std::to_string(rows.size()) +
        " rows, grid has " + std::to_string(grid.points.size()) + " points");
  }
  Vector target(grid.points.size());
  for (Index i = 0; i < grid.points.size(); ++i) {
    const auto& [z, value] = rows[static_cast<std::size_t>(i)];
    const Scalar span = grid.points[grid.points.size() - 1] - grid.points[0];
    if (std::abs(z - grid.points[i]) > 1e-9 * std::max(1.0, span)) {
      throw std::runtime_error("load_target: z at row " + std::to_string(i + 1) +
                               " does not match the frozen grid");
    }
    target[i] = value;
  }
  return target;
}

void save_target(const Grid& grid, const Vector& target,
                 const std::filesystem::path& path) {
  if (target.size() != grid.points.size()) {
    throw std::invalid_argument("save_target: target length mismatch");
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("save_target: cannot write '" + path.string() +
                             "'");
  }
  out << "z,target\n";
  for (Index i = 0; i < grid.points.size(); ++i) {
    out << format_value(grid.points[i]) << ',' << format_value(target[i])
        << '\n';
  }
}

}  // namespace pdfool
