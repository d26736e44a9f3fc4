#pragma once

#include <cstdint>

#include "pdfool/attack.hpp"

namespace pdfool {

struct GradientParams {
  Scalar learning_rate = 0.01;
  int max_iterations = 1000;
  /// Gaussian init noise as a fraction of each free column's sd. Must be
  /// positive for the robustness strategy: starting at X' exactly puts the
  /// loss at a stationary zero.
  Scalar init_noise_ratio = 0.05;
  Scalar beta1 = 0.9;
  Scalar beta2 = 0.999;
  Scalar epsilon = 1e-8;
  std::uint64_t seed = 0;
};

void validate_gradient_params(const GradientParams& params,
                              const AttackConfig& config);

/// Analytic gradient of the targeted attack loss with respect to every free
/// dataset cell; columns in constant_columns are identically zero. Honors
/// config.centered.
Matrix targeted_loss_gradient(const DifferentiableModel& model, const Matrix& x,
                              const AttackConfig& config);

/// Same for the robustness loss, comparing against the original dataset's
/// profile (centered comparison when config.centered is set).
Matrix robustness_loss_gradient(const DifferentiableModel& model,
                                const Matrix& x, const Matrix& x_prime,
                                const AttackConfig& config);

/// Adam descent on the attack loss, starting from X' plus masked Gaussian
/// noise. Aborts with a diagnostic if the loss turns non-finite.
AttackResult gradient_attack(const DifferentiableModel& model,
                             const Dataset& x_prime, const AttackConfig& config,
                             const GradientParams& params);

}  // namespace pdfool
