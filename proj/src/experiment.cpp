#include "pdfool/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "pdfool/svg.hpp"

namespace pdfool {

std::unique_ptr<Model> fit_model(const LabeledData& data, const ModelSpec& spec,
                                 OutputMode mode, int class_of_interest) {
  return std::visit(
      [&](const auto& s) -> std::unique_ptr<Model> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LinearSpec>) {
          return fit_linear(data, mode, class_of_interest);
        } else if constexpr (std::is_same_v<T, TreeSpec>) {
          return fit_tree(data, s, mode, class_of_interest);
        } else if constexpr (std::is_same_v<T, ForestSpec>) {
          return fit_forest(data, s, mode, class_of_interest);
        } else if constexpr (std::is_same_v<T, GbmSpec>) {
          return fit_gbm(data, s, mode, class_of_interest);
        } else if constexpr (std::is_same_v<T, KnnSpec>) {
          return fit_knn(data, s, mode, class_of_interest);
        } else {
          return fit_mlp(data, s, mode, class_of_interest);
        }
      },
      spec);
}

std::string model_family(const ModelSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LinearSpec>) return "linear";
        if constexpr (std::is_same_v<T, TreeSpec>) return "tree";
        if constexpr (std::is_same_v<T, ForestSpec>) return "forest";
        if constexpr (std::is_same_v<T, GbmSpec>) return "gbm";
        if constexpr (std::is_same_v<T, KnnSpec>) return "knn";
        if constexpr (std::is_same_v<T, MlpSpec>) return "mlp";
      },
      spec);
}

std::string complexity_label(const ModelSpec& spec) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, LinearSpec>) {
          return "-";
        } else if constexpr (std::is_same_v<T, TreeSpec>) {
          return "depth=" + std::to_string(s.max_depth);
        } else if constexpr (std::is_same_v<T, ForestSpec>) {
          return "trees=" + std::to_string(s.n_trees);
        } else if constexpr (std::is_same_v<T, GbmSpec>) {
          return "trees=" + std::to_string(s.n_trees);
        } else if constexpr (std::is_same_v<T, KnnSpec>) {
          return "k=" + std::to_string(s.k);
        } else {
          return std::to_string(s.layers) + "x" + std::to_string(s.neurons);
        }
      },
      spec);
}

LabeledData load_task(const TaskSpec& task) {
  switch (task.kind) {
    case TaskSpec::Kind::Friedman:
      return generate_friedman(task.n_rows, task.n_noise_extra, task.seed);
    case TaskSpec::Kind::HeartLike:
      return generate_heart_like(task.n_rows, task.seed);
    case TaskSpec::Kind::Csv:
      return load_csv(task.csv_path, task.target_column,
                      task.categorical_columns);
  }
  throw std::logic_error("load_task: unreachable");
}

namespace {

Index resolve_explained_column(const Dataset& data, const TaskSpec& task) {
  if (!task.explained_column.empty()) {
    return data.column_index(task.explained_column);
  }
  for (Index j = 0; j < data.n_cols(); ++j) {
    if (data.column_kinds()[static_cast<std::size_t>(j)] ==
        ColumnKind::Continuous) {
      return j;
    }
  }
  throw std::invalid_argument("experiment: no continuous column to explain");
}

std::set<Index> default_constant_columns(const Dataset& data, Index explained) {
  std::set<Index> constant{explained};
  for (Index j = 0; j < data.n_cols(); ++j) {
    if (data.column_kinds()[static_cast<std::size_t>(j)] ==
        ColumnKind::CategoricalInteger) {
      constant.insert(j);
    }
  }
  return constant;
}

std::string sanitize(std::string text) {
  for (char& c : text) {
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  }
  return text;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  if (spec.repetitions < 1) {
    throw std::invalid_argument("run_experiment: repetitions must be >= 1");
  }
  std::filesystem::create_directories(spec.output_dir);
  const LabeledData data = load_task(spec.task);
  const Dataset& x_prime = data.features;
  const Index explained = resolve_explained_column(x_prime, spec.task);
  const std::set<Index> constant_columns =
      default_constant_columns(x_prime, explained);
  const Grid grid = build_grid(x_prime, explained, spec.grid_points);

  const std::string attack_name =
      spec.attack.kind == AttackSpec::Kind::Genetic ? "genetic" : "gradient";
  const std::string strategy_name =
      spec.attack.strategy == AttackStrategy::Targeted ? "targeted"
                                                       : "robustness";
  const bool centered = spec.attack.centered.value_or(
      spec.attack.strategy == AttackStrategy::Robustness);

  ExperimentReport report;
  for (const ModelSpec& model_spec : spec.models) {
    ExperimentCell cell;
    cell.task = spec.task.label;
    cell.model = model_family(model_spec);
    cell.complexity = complexity_label(model_spec);
    cell.attack = attack_name;
    cell.strategy = strategy_name;
    cell.scale = spec.scale;

    try {
      const std::unique_ptr<Model> model = fit_model(
          data, model_spec, spec.task.output_mode, spec.task.class_of_interest);

      AttackConfig config;
      if (spec.attack.strategy == AttackStrategy::Targeted) {
        const PDProfile before = partial_dependence(*model, x_prime, grid);
        Vector target;
        if (spec.attack.target.file) {
          target = load_target(*spec.attack.target.file, grid);
        } else {
          Scalar amplitude = spec.attack.target.amplitude;
          if (amplitude == 0.0) {
            amplitude = before.values.maxCoeff() - before.values.minCoeff();
            if (amplitude == 0.0) amplitude = 1.0;
          }
          target = build_target(spec.attack.target.kind, grid, amplitude);
          if (!centered && spec.attack.target.anchor_at_profile_mean) {
            target.array() += stable_mean(before.values);
          }
        }
        config = make_targeted_config(grid, constant_columns, std::move(target),
                                      centered);
      } else {
        config = make_robustness_config(grid, constant_columns, centered);
      }

      std::vector<Scalar> metrics;
      for (int run = 0; run < spec.repetitions; ++run) {
        const std::uint64_t run_seed = spec.base_seed + static_cast<std::uint64_t>(run);
        AttackResult result = [&] {
          if (spec.attack.kind == AttackSpec::Kind::Genetic) {
            GeneticParams params = spec.attack.genetic;
            params.seed = run_seed;
            return genetic_attack(*model, x_prime, config, params);
          }
          GradientParams params = spec.attack.gradient;
          params.seed = run_seed;
          return gradient_attack(require_differentiable(*model), x_prime,
                                 config, params);
        }();
        result.scaled_distance = result.raw_distance * spec.scale;

        const Scalar metric =
            spec.attack.strategy == AttackStrategy::Robustness
                ? result.scaled_distance
                : result.final_loss * spec.scale;
        metrics.push_back(metric);

        const std::filesystem::path run_file =
            spec.output_dir /
            (sanitize(cell.task) + "_" + sanitize(cell.model) + "_" +
             sanitize(cell.complexity) + "_run" + std::to_string(run) +
             "_profile.csv");
        std::ofstream out(run_file);
        if (!out) {
          throw std::runtime_error("run_experiment: cannot write '" +
                                   run_file.string() + "'");
        }
        out << "z,pd_before,pd_before_centered,pd_after,pd_after_centered\n";
        for (Index i = 0; i < grid.points.size(); ++i) {
          out << format_value(grid.points[i]) << ','
              << format_value(result.profile_before.values[i]) << ','
              << format_value(result.profile_before.centered[i]) << ','
              << format_value(result.profile_after.values[i]) << ','
              << format_value(result.profile_after.centered[i]) << '\n';
        }
        cell.run_files.push_back(run_file);
      }

      const auto n = static_cast<Scalar>(metrics.size());
      Scalar mean = 0.0;
      for (const Scalar m : metrics) mean += m;
      mean /= n;
      Scalar variance = 0.0;
      for (const Scalar m : metrics) variance += (m - mean) * (m - mean);
      variance /= n;  // population sd: one run reports sd = 0
      cell.mean_scaled_distance = mean;
      cell.sd_scaled_distance = std::sqrt(variance);
      cell.runs = static_cast<int>(metrics.size());
    } catch (const std::exception& err) {
      cell.failed = true;
      cell.error = err.what();
    }
    report.cells.push_back(std::move(cell));
  }
  return report;
}

void write_report_csv(const ExperimentReport& report,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_report_csv: cannot write '" +
                             path.string() + "'");
  }
  out << "task,model,complexity,attack,strategy,mean_scaled_distance,"
         "sd_scaled_distance,scale,runs\n";
  for (const ExperimentCell& cell : report.cells) {
    out << cell.task << ',' << cell.model << ',' << cell.complexity << ','
        << cell.attack << ',' << cell.strategy << ',';
    if (cell.failed) {
      out << ",," << format_value(cell.scale) << ",0\n";
    } else {
      out << format_value(cell.mean_scaled_distance) << ','
          << format_value(cell.sd_scaled_distance) << ','
          << format_value(cell.scale) << ',' << cell.runs << '\n';
    }
  }
}

void emit_profiles(const AttackResult& result, const Dataset& original,
                   const std::optional<Vector>& target,
                   const std::filesystem::path& directory, int histogram_bins) {
  if (histogram_bins < 1) {
    throw std::invalid_argument("emit_profiles: histogram_bins must be >= 1");
  }
  std::filesystem::create_directories(directory);
  const Grid& grid = result.profile_before.grid;

  {
    std::ofstream out(directory / "pd_profiles.csv");
    if (!out) {
      throw std::runtime_error("emit_profiles: cannot write pd_profiles.csv");
    }
    out << "z,pd_before,pd_before_centered,pd_after,pd_after_centered";
    if (target) out << ",target";
    out << '\n';
    for (Index i = 0; i < grid.points.size(); ++i) {
      out << format_value(grid.points[i]) << ','
          << format_value(result.profile_before.values[i]) << ','
          << format_value(result.profile_before.centered[i]) << ','
          << format_value(result.profile_after.values[i]) << ','
          << format_value(result.profile_after.centered[i]);
      if (target) out << ',' << format_value((*target)[i]);
      out << '\n';
    }
  }

  {
    std::vector<SvgSeries> series;
    series.push_back({"original", "blue", grid.points,
                      result.profile_before.values});
    series.push_back({"poisoned", "red", grid.points,
                      result.profile_after.values});
    if (target) series.push_back({"target", "grey", grid.points, *target});
    write_line_svg(series, "z", "partial dependence",
                   directory / "pd_plot.svg");
  }

  {
    std::ofstream out(directory / "histograms.csv");
    if (!out) {
      throw std::runtime_error("emit_profiles: cannot write histograms.csv");
    }
    out << "column,bin,lo,hi,count_before,count_after\n";
    const Matrix& before = original.values();
    const Matrix& after = result.poisoned.values();
    for (Index j = 0; j < before.cols(); ++j) {
      Scalar lo = std::min(before.col(j).minCoeff(), after.col(j).minCoeff());
      Scalar hi = std::max(before.col(j).maxCoeff(), after.col(j).maxCoeff());
      if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
      }
      const Scalar width = (hi - lo) / static_cast<Scalar>(histogram_bins);
      std::vector<int> count_before(static_cast<std::size_t>(histogram_bins), 0);
      std::vector<int> count_after(count_before);
      auto bin_of = [&](Scalar v) {
        auto b = static_cast<std::ptrdiff_t>((v - lo) / width);
        return std::clamp<std::ptrdiff_t>(b, 0, histogram_bins - 1);
      };
      for (Index i = 0; i < before.rows(); ++i) {
        ++count_before[static_cast<std::size_t>(bin_of(before(i, j)))];
        ++count_after[static_cast<std::size_t>(bin_of(after(i, j)))];
      }
      for (int b = 0; b < histogram_bins; ++b) {
        out << original.column_names()[static_cast<std::size_t>(j)] << ',' << b
            << ',' << format_value(lo + width * b) << ','
            << format_value(lo + width * (b + 1)) << ','
            << count_before[static_cast<std::size_t>(b)] << ','
            << count_after[static_cast<std::size_t>(b)] << '\n';
      }
    }
  }
}

namespace {

ModelSpec model_spec_from_json(const nlohmann::json& doc) {
  const std::string family = doc.at("family").get<std::string>();
  if (family == "linear") return LinearSpec{};
  if (family == "tree") {
    TreeSpec s;
    s.max_depth = doc.value("max_depth", s.max_depth);
    s.min_samples_leaf = doc.value("min_samples_leaf", s.min_samples_leaf);
    return s;
  }
  if (family == "forest") {
    ForestSpec s;
    s.n_trees = doc.value("trees", s.n_trees);
    s.max_depth = doc.value("max_depth", s.max_depth);
    s.min_samples_leaf = doc.value("min_samples_leaf", s.min_samples_leaf);
    s.seed = doc.value("seed", s.seed);
    return s;
  }
  if (family == "gbm") {
    GbmSpec s;
    s.n_trees = doc.value("trees", s.n_trees);
    s.max_depth = doc.value("max_depth", s.max_depth);
    s.min_samples_leaf = doc.value("min_samples_leaf", s.min_samples_leaf);
    s.learning_rate = doc.value("learning_rate", s.learning_rate);
    return s;
  }
  if (family == "knn") {
    KnnSpec s;
    s.k = doc.value("k", s.k);
    return s;
  }
  if (family == "mlp") {
    MlpSpec s;
    s.layers = doc.value("layers", s.layers);
    s.neurons = doc.value("neurons", s.neurons);
    s.epochs = doc.value("epochs", s.epochs);
    s.learning_rate = doc.value("learning_rate", s.learning_rate);
    s.seed = doc.value("seed", s.seed);
    return s;
  }
  throw std::runtime_error("experiment config: unknown model family '" +
                           family + "'");
}

}  // namespace

ExperimentSpec experiment_from_json(const nlohmann::json& doc) {
  ExperimentSpec spec;

  const auto& task = doc.at("task");
  const std::string kind = task.at("kind").get<std::string>();
  if (kind == "friedman") {
    spec.task.kind = TaskSpec::Kind::Friedman;
    spec.task.label = "friedman";
    spec.task.output_mode = OutputMode::Regression;
  } else if (kind == "heart_like") {
    spec.task.kind = TaskSpec::Kind::HeartLike;
    spec.task.label = "heart_like";
    spec.task.n_rows = 303;
    spec.task.output_mode = OutputMode::ClassProbability;
    spec.task.explained_column = "age";
  } else if (kind == "csv") {
    spec.task.kind = TaskSpec::Kind::Csv;
    spec.task.label = "csv";
    spec.task.csv_path = task.at("path").get<std::string>();
    spec.task.target_column = task.at("target_column").get<std::string>();
    if (task.contains("categorical_columns")) {
      for (const auto& name : task.at("categorical_columns")) {
        spec.task.categorical_columns.insert(name.get<std::string>());
      }
    }
    spec.task.output_mode =
        task.value("output", std::string("regression")) == "classification"
            ? OutputMode::ClassProbability
            : OutputMode::Regression;
  } else {
    throw std::runtime_error("experiment config: unknown task kind '" + kind +
                             "'");
  }
  spec.task.label = task.value("label", spec.task.label);
  if (task.contains("rows")) spec.task.n_rows = task.at("rows").get<Index>();
  if (task.contains("noise")) {
    spec.task.n_noise_extra = task.at("noise").get<Index>();
  }
  spec.task.seed = task.value("seed", spec.task.seed);
  spec.task.explained_column =
      task.value("explained_column", spec.task.explained_column);
  spec.task.class_of_interest =
      task.value("class_of_interest", spec.task.class_of_interest);

  for (const auto& model : doc.at("models")) {
    spec.models.push_back(model_spec_from_json(model));
  }

  const auto& attack = doc.at("attack");
  spec.attack.kind = attack.at("kind").get<std::string>() == "gradient"
                         ? AttackSpec::Kind::Gradient
                         : AttackSpec::Kind::Genetic;
  spec.attack.strategy =
      attack.value("strategy", std::string("robustness")) == "targeted"
          ? AttackStrategy::Targeted
          : AttackStrategy::Robustness;
  if (attack.contains("centered")) {
    spec.attack.centered = attack.at("centered").get<bool>();
  }
  if (attack.contains("target")) {
    const auto& target = attack.at("target");
    const std::string target_kind =
        target.value("kind", std::string("decreasing"));
    if (target_kind == "increasing") {
      spec.attack.target.kind = TargetKind::IncreasingRamp;
    } else if (target_kind == "decreasing") {
      spec.attack.target.kind = TargetKind::DecreasingRamp;
    } else if (target_kind == "constant") {
      spec.attack.target.kind = TargetKind::Constant;
    } else {
      throw std::runtime_error("experiment config: unknown target kind '" +
                               target_kind + "'");
    }
    spec.attack.target.amplitude =
        target.value("amplitude", spec.attack.target.amplitude);
    if (target.contains("file")) {
      spec.attack.target.file = target.at("file").get<std::string>();
    }
    spec.attack.target.anchor_at_profile_mean =
        target.value("anchor", spec.attack.target.anchor_at_profile_mean);
  }
  if (attack.contains("genetic")) {
    const auto& g = attack.at("genetic");
    GeneticParams& p = spec.attack.genetic;
    p.pop_count = g.value("pop_count", p.pop_count);
    p.crossover_ratio = g.value("crossover_ratio", p.crossover_ratio);
    p.std_ratio = g.value("std_ratio", p.std_ratio);
    p.init_std_multiplier = g.value("init_std_multiplier", p.init_std_multiplier);
    p.mutation_with_constraints =
        g.value("mutation_with_constraints", p.mutation_with_constraints);
    p.elitism_count = g.value("elitism_count", p.elitism_count);
    p.max_iterations = g.value("max_iterations", p.max_iterations);
  }
  if (attack.contains("gradient")) {
    const auto& g = attack.at("gradient");
    GradientParams& p = spec.attack.gradient;
    p.learning_rate = g.value("learning_rate", p.learning_rate);
    p.max_iterations = g.value("max_iterations", p.max_iterations);
    p.init_noise_ratio = g.value("init_noise_ratio", p.init_noise_ratio);
  }

  spec.grid_points = doc.value("grid_points", spec.grid_points);
  spec.repetitions = doc.value("repetitions", spec.repetitions);
  spec.base_seed = doc.value("seed", spec.base_seed);
  spec.scale = doc.value("scale", spec.scale);
  if (doc.contains("output_dir")) {
    spec.output_dir = doc.at("output_dir").get<std::string>();
  }
  return spec;
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_experiment_spec: cannot open '" +
                             path.string() + "'");
  }
  nlohmann::json doc;
  in >> doc;
  return experiment_from_json(doc);
}

}  // namespace pdfool
