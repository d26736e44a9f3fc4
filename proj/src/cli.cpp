#include "pdfool/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pdfool/experiment.hpp"
#include "pdfool/svg.hpp"

namespace pdfool {

namespace {

std::set<std::string> split_names(const std::string& text) {
  std::set<std::string> names;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item = text.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) names.insert(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return names;
}

std::filesystem::path default_out_dir() {
  if (const char* env = std::getenv("PDFOOL_OUT_DIR")) return env;
  return ".";
}

LabeledData load_labeled(const std::string& data_path,
                         const std::string& target,
                         const std::string& categorical) {
  return load_csv(data_path, target, split_names(categorical));
}

Dataset load_features(const std::string& data_path, const std::string& target,
                      const std::string& categorical) {
  if (target.empty()) {
    return load_dataset_csv(data_path, split_names(categorical));
  }
  return load_labeled(data_path, target, categorical).features;
}

struct FitOptions {
  std::string data_path;
  std::string target;
  std::string categorical;
  std::string task = "regression";
  std::string family;
  int class_of_interest = 0;
  std::uint64_t seed = 0;
  // family knobs
  int max_depth = 6;
  int trees = 100;
  Scalar learning_rate = -1.0;  // family default when negative
  int k = 5;
  int layers = 3;
  int neurons = 32;
  int epochs = 500;
  std::string out = "model.json";
};

int run_fit(const FitOptions& opt) {
  const OutputMode mode = opt.task == "classification"
                              ? OutputMode::ClassProbability
                              : OutputMode::Regression;
  const LabeledData data =
      load_labeled(opt.data_path, opt.target, opt.categorical);

  std::unique_ptr<Model> model;
  if (opt.family == "linear") {
    auto linear = fit_linear(data, mode, opt.class_of_interest);
    if (linear->ridge_fallback_used()) {
      std::cerr << "note: singular least-squares system, ridge fallback used\n";
    }
    model = std::move(linear);
  } else if (opt.family == "tree") {
    model = fit_tree(data, TreeSpec{opt.max_depth, 2}, mode,
                     opt.class_of_interest);
  } else if (opt.family == "forest") {
    model = fit_forest(data, ForestSpec{opt.trees, opt.max_depth, 2, opt.seed},
                       mode, opt.class_of_interest);
  } else if (opt.family == "gbm") {
    const Scalar lr = opt.learning_rate < 0.0 ? 0.1 : opt.learning_rate;
    model = fit_gbm(data, GbmSpec{opt.trees, opt.max_depth, 2, lr}, mode,
                    opt.class_of_interest);
  } else if (opt.family == "knn") {
    model = fit_knn(data, KnnSpec{opt.k}, mode, opt.class_of_interest);
  } else if (opt.family == "mlp") {
    const Scalar lr = opt.learning_rate < 0.0 ? 1e-3 : opt.learning_rate;
    model = fit_mlp(data, MlpSpec{opt.layers, opt.neurons, opt.epochs, lr,
                                  opt.seed},
                    mode, opt.class_of_interest);
  } else {
    throw std::runtime_error("fit: unknown family '" + opt.family +
                             "' (linear|tree|forest|gbm|knn|mlp)");
  }
  save_model(*model, opt.out);
  std::cout << "saved " << opt.family << " model to " << opt.out << '\n';
  return 0;
}

struct AttackOptions {
  std::string algorithm = "genetic";
  std::string strategy = "robustness";
  int centered = -1;  // -1: strategy default
  std::string model_path;
  std::string data_path;
  std::string target;  // target column to drop, optional
  std::string categorical;
  std::string column;
  std::string constant_cols;
  Index grid_points = 40;
  std::string target_kind = "decreasing";
  Scalar target_amplitude = 0.0;
  std::string target_file;
  bool no_anchor = false;
  GeneticParams genetic;
  GradientParams gradient;
  int iterations = -1;
  std::uint64_t seed = 0;
  Scalar scale = 1.0;
  int bins = 10;
  std::string out_dir;
};

int run_attack(const AttackOptions& opt) {
  const Dataset x_prime =
      load_features(opt.data_path, opt.target, opt.categorical);
  const std::unique_ptr<Model> model = load_model(opt.model_path);
  const Index explained = x_prime.column_index(opt.column);

  std::set<Index> constant{explained};
  if (opt.constant_cols == "all") {
    for (Index j = 0; j < x_prime.n_cols(); ++j) constant.insert(j);
  } else {
    for (const std::string& name : split_names(opt.constant_cols)) {
      constant.insert(x_prime.column_index(name));
    }
  }
  for (Index j = 0; j < x_prime.n_cols(); ++j) {
    if (x_prime.column_kinds()[static_cast<std::size_t>(j)] ==
        ColumnKind::CategoricalInteger) {
      constant.insert(j);
    }
  }

  Grid grid = build_grid(x_prime, explained, opt.grid_points);
  const bool targeted = opt.strategy == "targeted";
  const bool centered = opt.centered < 0 ? !targeted : opt.centered != 0;

  std::optional<Vector> target;
  AttackConfig config;
  if (targeted) {
    if (!opt.target_file.empty()) {
      target = load_target(opt.target_file, grid);
    } else {
      TargetKind kind = TargetKind::DecreasingRamp;
      if (opt.target_kind == "increasing") kind = TargetKind::IncreasingRamp;
      else if (opt.target_kind == "decreasing") kind = TargetKind::DecreasingRamp;
      else if (opt.target_kind == "constant") kind = TargetKind::Constant;
      else {
        throw std::runtime_error("attack: unknown target kind '" +
                                 opt.target_kind +
                                 "' (increasing|decreasing|constant)");
      }
      const PDProfile before = partial_dependence(*model, x_prime, grid);
      Scalar amplitude = opt.target_amplitude;
      if (amplitude == 0.0) {
        amplitude = before.values.maxCoeff() - before.values.minCoeff();
        if (amplitude == 0.0) amplitude = 1.0;
      }
      target = build_target(kind, grid, amplitude);
      if (!centered && !opt.no_anchor) {
        target->array() += stable_mean(before.values);
      }
    }
    config = make_targeted_config(grid, constant, *target, centered);
  } else {
    config = make_robustness_config(grid, constant, centered);
  }

  AttackResult result = [&] {
    if (opt.algorithm == "genetic") {
      GeneticParams params = opt.genetic;
      params.seed = opt.seed;
      if (opt.iterations >= 0) params.max_iterations = opt.iterations;
      return genetic_attack(*model, x_prime, config, params);
    }
    if (opt.algorithm != "gradient") {
      throw std::runtime_error("attack: unknown algorithm '" + opt.algorithm +
                               "' (genetic|gradient)");
    }
    GradientParams params = opt.gradient;
    params.seed = opt.seed;
    if (opt.iterations >= 0) params.max_iterations = opt.iterations;
    return gradient_attack(require_differentiable(*model), x_prime, config,
                           params);
  }();
  result.scaled_distance = result.raw_distance * opt.scale;

  const std::filesystem::path dir =
      opt.out_dir.empty() ? default_out_dir()
                          : std::filesystem::path(opt.out_dir);
  std::filesystem::create_directories(dir);
  save_csv(result.poisoned, dir / "poisoned.csv");
  emit_profiles(result, x_prime, target, dir, opt.bins);
  if (target) save_target(grid, *target, dir / "target.csv");
  {
    std::ofstream out(dir / "loss_trace.csv");
    out << "iteration,loss\n";
    for (std::size_t i = 0; i < result.loss_trace.size(); ++i) {
      out << i << ',' << format_value(result.loss_trace[i]) << '\n';
    }
  }

  std::cout << "final_loss=" << format_value(result.final_loss)
            << " raw_distance=" << format_value(result.raw_distance)
            << " scaled_distance=" << format_value(result.scaled_distance)
            << " outputs=" << dir.string() << '\n';
  return 0;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv) {
  CLI::App app{"Partial dependence explanations and data-poisoning attacks"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand(
      "generate", "Write a synthetic dataset (features + target) as CSV");
  std::string gen_kind = "friedman";
  Index gen_rows = 500;
  Index gen_noise = 0;
  std::uint64_t gen_seed = 1;
  std::string gen_target_name;
  std::string gen_out = "data.csv";
  generate->add_option("--kind", gen_kind, "friedman|heart_like");
  generate->add_option("--rows", gen_rows, "number of rows");
  generate->add_option("--noise", gen_noise, "extra noise columns (friedman)");
  generate->add_option("--seed", gen_seed, "generator seed");
  generate->add_option("--target-name", gen_target_name,
                       "target column name (default y / output)");
  generate->add_option("--out", gen_out, "output CSV path");

  // fit
  auto* fit = app.add_subcommand("fit", "Train a model and save it as JSON");
  FitOptions fit_opt;
  fit->add_option("--data", fit_opt.data_path, "training CSV")->required();
  fit->add_option("--target", fit_opt.target, "target column")->required();
  fit->add_option("--categorical", fit_opt.categorical,
                  "comma-separated categorical columns");
  fit->add_option("--task", fit_opt.task, "regression|classification");
  fit->add_option("--family", fit_opt.family,
                  "linear|tree|forest|gbm|knn|mlp")
      ->required();
  fit->add_option("--class-of-interest", fit_opt.class_of_interest,
                  "class whose probability is predicted (default 0)");
  fit->add_option("--seed", fit_opt.seed, "fit seed (forest bootstrap, mlp init)");
  fit->add_option("--max-depth", fit_opt.max_depth, "tree depth");
  fit->add_option("--trees", fit_opt.trees, "ensemble size");
  fit->add_option("--learning-rate", fit_opt.learning_rate,
                  "gbm shrinkage / mlp learning rate");
  fit->add_option("--k", fit_opt.k, "knn neighbours");
  fit->add_option("--layers", fit_opt.layers, "mlp hidden layers");
  fit->add_option("--neurons", fit_opt.neurons, "mlp neurons per layer");
  fit->add_option("--epochs", fit_opt.epochs, "mlp training epochs");
  fit->add_option("--out", fit_opt.out, "model JSON path");

  // pd
  auto* pd = app.add_subcommand("pd", "Compute a partial dependence profile");
  std::string pd_model, pd_data, pd_target, pd_categorical, pd_column;
  std::string pd_out = "profile.csv";
  std::string pd_svg;
  Index pd_grid_points = 40;
  pd->add_option("--model", pd_model, "model JSON")->required();
  pd->add_option("--data", pd_data, "dataset CSV")->required();
  pd->add_option("--target", pd_target, "target column to drop, if present");
  pd->add_option("--categorical", pd_categorical,
                 "comma-separated categorical columns");
  pd->add_option("--column", pd_column, "explained column")->required();
  pd->add_option("--grid-points", pd_grid_points, "grid size (default 40)");
  pd->add_option("--out", pd_out, "profile CSV path");
  pd->add_option("--svg", pd_svg, "optional SVG plot path");

  // attack
  auto* attack = app.add_subcommand(
      "attack", "Poison a dataset to fool its partial dependence profile");
  AttackOptions atk;
  attack->add_option("--algorithm", atk.algorithm, "genetic|gradient");
  attack->add_option("--strategy", atk.strategy, "robustness|targeted");
  attack->add_option("--centered", atk.centered,
                     "compare centered profiles (default: 1 for robustness, "
                     "0 for targeted)");
  attack->add_option("--model", atk.model_path, "model JSON")->required();
  attack->add_option("--data", atk.data_path, "dataset CSV")->required();
  attack->add_option("--target", atk.target, "target column to drop, if present");
  attack->add_option("--categorical", atk.categorical,
                     "comma-separated categorical columns");
  attack->add_option("--column", atk.column, "explained column")->required();
  attack->add_option("--constant-cols", atk.constant_cols,
                     "columns kept constant: names or 'all'");
  attack->add_option("--grid-points", atk.grid_points, "grid size (default 40)");
  attack->add_option("--target-kind", atk.target_kind,
                     "increasing|decreasing|constant");
  attack->add_option("--target-amplitude", atk.target_amplitude,
                     "ramp amplitude; 0 = profile value range");
  attack->add_option("--target-file", atk.target_file, "(z,target) CSV");
  attack->add_flag("--no-anchor-target", atk.no_anchor,
                   "keep ramp targets mean-zero instead of anchoring at the "
                   "original profile level");
  attack->add_option("--pop-count", atk.genetic.pop_count, "population size");
  attack->add_option("--crossover-ratio", atk.genetic.crossover_ratio,
                     "parent fraction (0,1]");
  attack->add_option("--std-ratio", atk.genetic.std_ratio,
                     "mutation noise sd as fraction of column sd");
  attack->add_option("--init-std-multiplier", atk.genetic.init_std_multiplier,
                     "initial mutation boost");
  attack->add_option("--elitism", atk.genetic.elitism_count, "elite count");
  bool no_constraints = false;
  attack->add_flag("--no-mutation-constraints", no_constraints,
                   "allow mutations outside the original column range");
  attack->add_option("--learning-rate", atk.gradient.learning_rate,
                     "gradient attack step size (default 0.01)");
  attack->add_option("--init-noise-ratio", atk.gradient.init_noise_ratio,
                     "init noise sd as fraction of column sd (default 0.05)");
  attack->add_option("--iterations", atk.iterations,
                     "iterations (default: 200 genetic, 1000 gradient)");
  attack->add_option("--seed", atk.seed, "attack seed");
  attack->add_option("--scale", atk.scale, "distance scale factor");
  attack->add_option("--bins", atk.bins, "histogram bins per column");
  attack->add_option("--out-dir", atk.out_dir,
                     "output directory (default $PDFOOL_OUT_DIR or .)");

  // experiment
  auto* experiment = app.add_subcommand(
      "experiment", "Run a repeated-attack experiment from a JSON config");
  std::string exp_config;
  std::string exp_output_dir;
  int exp_repetitions = -1;
  Scalar exp_scale = -1.0;
  long long exp_seed = -1;
  Index exp_grid_points = -1;
  std::string exp_report = "report.csv";
  experiment->add_option("--config", exp_config, "experiment JSON")->required();
  experiment->add_option("--output-dir", exp_output_dir,
                         "overrides the config output_dir");
  experiment->add_option("--repetitions", exp_repetitions,
                         "overrides the config repetitions");
  experiment->add_option("--scale", exp_scale, "overrides the config scale");
  experiment->add_option("--seed", exp_seed, "overrides the config seed");
  experiment->add_option("--grid-points", exp_grid_points,
                         "overrides the config grid_points");
  experiment->add_option("--report", exp_report,
                         "report CSV name inside the output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (generate->parsed()) {
      LabeledData data = gen_kind == "heart_like"
                             ? generate_heart_like(gen_rows, gen_seed)
                             : generate_friedman(gen_rows, gen_noise, gen_seed);
      if (gen_kind != "heart_like" && gen_kind != "friedman") {
        throw std::runtime_error("generate: unknown kind '" + gen_kind +
                                 "' (friedman|heart_like)");
      }
      std::string target_name = gen_target_name;
      if (target_name.empty()) {
        target_name = gen_kind == "heart_like" ? "output" : "y";
      }
      save_csv(data, target_name, gen_out);
      std::cout << "wrote " << data.features.n_rows() << " rows to " << gen_out
                << '\n';
      return 0;
    }
    if (fit->parsed()) return run_fit(fit_opt);
    if (pd->parsed()) {
      const Dataset data = load_features(pd_data, pd_target, pd_categorical);
      const std::unique_ptr<Model> model = load_model(pd_model);
      const Grid grid =
          build_grid(data, data.column_index(pd_column), pd_grid_points);
      const PDProfile profile = partial_dependence(*model, data, grid);
      save_profile(profile, pd_out);
      if (!pd_svg.empty()) {
        write_line_svg({{"pd", "blue", grid.points, profile.values}}, pd_column,
                       "partial dependence", pd_svg);
      }
      std::cout << "wrote profile to " << pd_out << '\n';
      return 0;
    }
    if (attack->parsed()) {
      atk.genetic.mutation_with_constraints = !no_constraints;
      return run_attack(atk);
    }
    if (experiment->parsed()) {
      ExperimentSpec spec = load_experiment_spec(exp_config);
      if (!exp_output_dir.empty()) spec.output_dir = exp_output_dir;
      if (exp_repetitions > 0) spec.repetitions = exp_repetitions;
      if (exp_scale >= 0.0) spec.scale = exp_scale;
      if (exp_seed >= 0) spec.base_seed = static_cast<std::uint64_t>(exp_seed);
      if (exp_grid_points > 1) spec.grid_points = exp_grid_points;
      const ExperimentReport report = run_experiment(spec);
      write_report_csv(report, spec.output_dir / exp_report);
      for (const ExperimentCell& cell : report.cells) {
        if (cell.failed) {
          std::cout << cell.task << ' ' << cell.model << ' ' << cell.complexity
                    << " FAILED: " << cell.error << '\n';
        } else {
          std::cout << cell.task << ' ' << cell.model << ' ' << cell.complexity
                    << ' ' << cell.attack << '/' << cell.strategy << " -> "
                    << format_value(cell.mean_scaled_distance) << " +- "
                    << format_value(cell.sd_scaled_distance) << " (" << cell.runs
                    << " runs)\n";
        }
      }
      std::cout << "report: " << (spec.output_dir / exp_report).string() << '\n';
      return 0;
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace pdfool
