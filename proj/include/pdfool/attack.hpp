#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pdfool/dataset.hpp"
#include "pdfool/model.hpp"
#include "pdfool/pd.hpp"

namespace pdfool {

enum class AttackStrategy { Targeted, Robustness };

/// What to fool and how to compare explanations. The grid is frozen from the
/// original dataset before the attack starts, so every iteration evaluates
/// the same points.
struct AttackConfig {
  AttackStrategy strategy = AttackStrategy::Robustness;
  /// Compare mean-removed profiles. Defaults follow the strategy: robustness
  /// checks centre, targeted attacks do not.
  bool centered = true;
  Index explained_column = 0;
  /// Columns never touched by the attack; always contains explained_column.
  std::set<Index> constant_columns;
  Grid grid;
  /// Desired explanation, one value per grid point; targeted strategy only.
  std::optional<Vector> target;
};

AttackConfig make_robustness_config(Grid grid, std::set<Index> constant_columns,
                                    bool centered = true);
AttackConfig make_targeted_config(Grid grid, std::set<Index> constant_columns,
                                  Vector target, bool centered = false);

/// Throws unless the config is internally consistent and applicable to the
/// dataset: the explained column is constant, the target matches the grid,
/// and every categorical column is held constant.
void validate_attack_config(const AttackConfig& config, const Dataset& x_prime);

struct AttackResult {
  Dataset poisoned;
  std::vector<Scalar> loss_trace;
  PDProfile profile_before;
  PDProfile profile_after;
  Scalar final_loss = 0.0;
  /// Distance between the centered before/after profiles, raw and scaled by
  /// the harness factor (1 until the harness rescales).
  Scalar raw_distance = 0.0;
  Scalar scaled_distance = 0.0;
};

/// Mean squared difference: (1/I) * sum (a_i - b_i)^2.
Scalar distance(const Vector& a, const Vector& b);

/// Attack objective, minimized by both algorithms.
///   targeted:   ||profile(X) - T||
///   robustness: -||profile(X) - profile(X')||
/// Profiles are centered first when config.centered is set.
Scalar attack_loss(const Matrix& x, const Model& model,
                   const AttackConfig& config, const Matrix& x_prime);
Scalar attack_loss(const Dataset& x, const Model& model,
                   const AttackConfig& config, const Dataset& x_prime);

/// Precomputed form for evaluation loops: the comparison vector (target or
/// original profile) is fixed once.
class AttackLoss {
 public:
  AttackLoss(const Model& model, const AttackConfig& config,
             const Matrix& x_prime);

  Scalar operator()(const Matrix& x) const;

  /// Vector the candidate profile is compared against (T, or the original
  /// profile in the configured space).
  const Vector& reference() const { return reference_; }

 private:
  const Model& model_;
  const AttackConfig& config_;
  Vector reference_;
};

enum class TargetKind { IncreasingRamp, DecreasingRamp, Constant };

/// Ramp targets are affine in z and span [-amplitude/2, +amplitude/2]
/// (mean-zero across an equidistant grid); constant is all zeros.
Vector build_target(TargetKind kind, const Grid& grid, Scalar amplitude);

/// (z, target) CSV aligned to the grid; row count and z values must match.
Vector load_target(const std::filesystem::path& path, const Grid& grid);
void save_target(const Grid& grid, const Vector& target,
                 const std::filesystem::path& path);

}  // namespace pdfool
