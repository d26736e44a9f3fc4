#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pdfool/attack.hpp"
#include "pdfool/forest.hpp"
#include "pdfool/gbm.hpp"
#include "pdfool/genetic.hpp"
#include "pdfool/gradient.hpp"
#include "pdfool/knn.hpp"
#include "pdfool/linear.hpp"
#include "pdfool/mlp.hpp"
#include "pdfool/tree.hpp"

namespace pdfool {

struct LinearSpec {};

using ModelSpec =
    std::variant<LinearSpec, TreeSpec, ForestSpec, GbmSpec, KnnSpec, MlpSpec>;

std::unique_ptr<Model> fit_model(const LabeledData& data, const ModelSpec& spec,
                                 OutputMode mode, int class_of_interest = 0);
std::string model_family(const ModelSpec& spec);
std::string complexity_label(const ModelSpec& spec);

/// Where the task data comes from: a synthetic generator or a CSV on disk.
struct TaskSpec {
  enum class Kind { Friedman, HeartLike, Csv };
  Kind kind = Kind::Friedman;
  std::string label = "friedman";
  Index n_rows = 500;
  Index n_noise_extra = 0;
  std::uint64_t seed = 1;
  std::filesystem::path csv_path;
  std::string target_column;
  std::set<std::string> categorical_columns;
  OutputMode output_mode = OutputMode::Regression;
  int class_of_interest = 0;
  std::string explained_column;  // empty: first continuous column
};

LabeledData load_task(const TaskSpec& task);

struct TargetSpec {
  TargetKind kind = TargetKind::DecreasingRamp;
  /// 0 means auto: the value range of the original profile.
  Scalar amplitude = 0.0;
  std::optional<std::filesystem::path> file;
  /// Shift the ramp to sit at the original profile's mean level when the
  /// comparison is non-centered. Ramps are built in centered space.
  bool anchor_at_profile_mean = true;
};

struct AttackSpec {
  enum class Kind { Genetic, Gradient };
  Kind kind = Kind::Genetic;
  AttackStrategy strategy = AttackStrategy::Robustness;
  /// Unset: centre for robustness, compare raw for targeted.
  std::optional<bool> centered;
  TargetSpec target;
  GeneticParams genetic;
  GradientParams gradient;
};

struct ExperimentSpec {
  TaskSpec task;
  std::vector<ModelSpec> models;
  AttackSpec attack;
  Index grid_points = 40;
  int repetitions = 6;
  std::uint64_t base_seed = 0;
  Scalar scale = 1.0;
  std::filesystem::path output_dir = ".";
};

struct ExperimentCell {
  std::string task;
  std::string model;
  std::string complexity;
  std::string attack;
  std::string strategy;
  Scalar mean_scaled_distance = 0.0;
  Scalar sd_scaled_distance = 0.0;
  Scalar scale = 1.0;
  int runs = 0;
  bool failed = false;
  std::string error;
  std::vector<std::filesystem::path> run_files;
};

struct ExperimentReport {
  std::vector<ExperimentCell> cells;
};

/// Fits each model once, freezes the grid on the original data, runs
/// `repetitions` independently-seeded attacks per cell, and aggregates the
/// scaled centered-profile distance (robustness) or scaled final loss
/// (targeted) as mean +- population sd. Cell failures are recorded in the
/// report and the run continues.
ExperimentReport run_experiment(const ExperimentSpec& spec);

/// Columns: task, model, complexity, attack, strategy, mean_scaled_distance,
/// sd_scaled_distance, scale, runs.
void write_report_csv(const ExperimentReport& report,
                      const std::filesystem::path& path);

/// Writes next to each other: the before/after(/target) profile table, an SVG
/// line plot (blue original, red poisoned, grey target when present), and
/// per-column before/after histograms with histogram_bins rows per column.
void emit_profiles(const AttackResult& result, const Dataset& original,
                   const std::optional<Vector>& target,
                   const std::filesystem::path& directory,
                   int histogram_bins = 10);

ExperimentSpec experiment_from_json(const nlohmann::json& doc);
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);

}  // namespace pdfool
