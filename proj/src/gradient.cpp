#include "pdfool/gradient.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "pdfool/adam.hpp"
#include "pdfool/rng.hpp"

namespace pdfool {

namespace {

/// Per-grid-point model evaluations on X with the explained column
/// substituted: the profile value and the input gradient at each point.
struct GridEvaluation {
  Vector pd;                  // |Z|
  std::vector<Matrix> grads;  // |Z| matrices, N x P each
};

GridEvaluation evaluate_grid(const DifferentiableModel& model, const Matrix& x,
                             const Grid& grid) {
  const Index n_points = grid.points.size();
  GridEvaluation eval;
  eval.pd.resize(n_points);
  eval.grads.reserve(static_cast<std::size_t>(n_points));
  Matrix working = x;
  for (Index k = 0; k < n_points; ++k) {
    working.col(grid.column).setConstant(grid.points[k]);
    eval.pd[k] = stable_mean(model.predict(working));
    eval.grads.push_back(model.input_gradient(working));
  }
  return eval;
}

void zero_constant_columns(Matrix& grad, const std::set<Index>& constant) {
  for (const Index column : constant) grad.col(column).setZero();
}

/// Accumulates sum_z grads[z] * factor[z], optionally replacing each grads[z]
/// by its deviation from the across-grid mean gradient (centered form).
Matrix weighted_gradient_sum(const GridEvaluation& eval, const Vector& factor,
                             bool centered) {
  const Index n_points = eval.pd.size();
  Matrix sum = Matrix::Zero(eval.grads[0].rows(), eval.grads[0].cols());
  for (Index k = 0; k < n_points; ++k) {
    sum += eval.grads[static_cast<std::size_t>(k)] * factor[k];
  }
  if (centered) {
    Matrix mean_grad = Matrix::Zero(sum.rows(), sum.cols());
    for (const Matrix& g : eval.grads) mean_grad += g;
    mean_grad /= static_cast<Scalar>(n_points);
    sum -= mean_grad * factor.sum();
  }
  return sum;
}

Matrix loss_gradient_from_eval(const GridEvaluation& eval,
                               const Vector& reference,
                               const AttackConfig& config) {
  const Index n_points = eval.pd.size();
  const Scalar n_rows = static_cast<Scalar>(eval.grads[0].rows());
  Vector candidate = eval.pd;
  if (config.centered) candidate = candidate.array() - stable_mean(candidate);
  const Vector factor = candidate - reference;
  Matrix grad = weighted_gradient_sum(eval, factor, config.centered);
  grad *= 2.0 / (n_rows * static_cast<Scalar>(n_points));
  if (config.strategy == AttackStrategy::Robustness) grad = -grad;
  zero_constant_columns(grad, config.constant_columns);
  return grad;
}

}  // namespace

void validate_gradient_params(const GradientParams& params,
                              const AttackConfig& config) {
  if (!(params.learning_rate > 0.0)) {
    throw std::invalid_argument("GradientParams: learning_rate must be > 0");
  }
  if (params.max_iterations < 0) {
    throw std::invalid_argument("GradientParams: max_iterations must be >= 0");
  }
  if (params.init_noise_ratio < 0.0) {
    throw std::invalid_argument("GradientParams: init_noise_ratio must be >= 0");
  }
  if (config.strategy == AttackStrategy::Robustness &&
      params.init_noise_ratio == 0.0) {
    throw std::invalid_argument(
        "GradientParams: robustness strategy requires init_noise_ratio > 0; "
        "starting exactly at the original data gives a zero gradient");
  }
}

Matrix targeted_loss_gradient(const DifferentiableModel& model, const Matrix& x,
                              const AttackConfig& config) {
  if (config.strategy != AttackStrategy::Targeted || !config.target) {
    throw std::invalid_argument(
        "targeted_loss_gradient: config must be targeted with a target");
  }
  const GridEvaluation eval = evaluate_grid(model, x, config.grid);
  return loss_gradient_from_eval(eval, *config.target, config);
}

Matrix robustness_loss_gradient(const DifferentiableModel& model,
                                const Matrix& x, const Matrix& x_prime,
                                const AttackConfig& config) {
  if (config.strategy != AttackStrategy::Robustness) {
    throw std::invalid_argument(
        "robustness_loss_gradient: config must use the robustness strategy");
  }
  const PDProfile original = partial_dependence(model, x_prime, config.grid);
  const Vector& reference = config.centered ? original.centered : original.values;
  const GridEvaluation eval = evaluate_grid(model, x, config.grid);
  return loss_gradient_from_eval(eval, reference, config);
}

AttackResult gradient_attack(const DifferentiableModel& model,
                             const Dataset& x_prime, const AttackConfig& config,
                             const GradientParams& params) {
  validate_attack_config(config, x_prime);
  validate_gradient_params(params, config);

  const Matrix& original = x_prime.values();
  const PDProfile profile_before =
      partial_dependence(model, original, config.grid);
  const Vector reference = config.strategy == AttackStrategy::Targeted
                               ? *config.target
                               : (config.centered ? profile_before.centered
                                                  : profile_before.values);

  // Masked Gaussian initialization scaled by each free column's sd.
  Rng rng(params.seed);
  Matrix x = original;
  const ColumnStats stats = column_stats(x_prime);
  for (Index j = 0; j < x.cols(); ++j) {
    if (config.constant_columns.count(j)) continue;
    const Scalar sd = stats.sd[j] * params.init_noise_ratio;
    for (Index i = 0; i < x.rows(); ++i) x(i, j) += rng.normal(0.0, sd);
  }

  AdamState<Matrix> adam(AdamConfig{params.learning_rate, params.beta1,
                                    params.beta2, params.epsilon});
  std::vector<Scalar> trace;
  trace.reserve(static_cast<std::size_t>(params.max_iterations) + 1);

  auto loss_from_pd = [&](const Vector& pd) {
    Vector candidate = pd;
    if (config.centered) candidate = candidate.array() - stable_mean(candidate);
    const Scalar d = distance(candidate, reference);
    return config.strategy == AttackStrategy::Targeted ? d : -d;
  };

  for (int iteration = 0; iteration < params.max_iterations; ++iteration) {
    const GridEvaluation eval = evaluate_grid(model, x, config.grid);
    const Scalar loss = loss_from_pd(eval.pd);
    if (!std::isfinite(loss)) {
      throw std::runtime_error(
          "gradient_attack: loss diverged to a non-finite value at iteration " +
          std::to_string(iteration) + " of " +
          std::to_string(params.max_iterations));
    }
    trace.push_back(loss);
    Matrix grad = loss_gradient_from_eval(eval, reference, config);
    if (!grad.allFinite()) {
      throw std::runtime_error(
          "gradient_attack: gradient diverged at iteration " +
          std::to_string(iteration));
    }
    adam.step(x, grad);
  }

  const PDProfile profile_after = partial_dependence(model, x, config.grid);
  const Scalar final_loss = loss_from_pd(profile_after.values);
  trace.push_back(final_loss);

  AttackResult result{
      .poisoned = x_prime.with_values(x),
      .loss_trace = std::move(trace),
      .profile_before = profile_before,
      .profile_after = profile_after,
      .final_loss = final_loss,
  };
  result.raw_distance =
      distance(result.profile_after.centered, result.profile_before.centered);
  result.scaled_distance = result.raw_distance;
  return result;
}

}  // namespace pdfool
