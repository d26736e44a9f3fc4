#pragma once

#include <cmath>

#include "pdfool/types.hpp"

namespace pdfool {

struct AdamConfig {
  Scalar learning_rate = 1e-3;
  Scalar beta1 = 0.9;
  Scalar beta2 = 0.999;
  Scalar epsilon = 1e-8;
};

/// First/second-moment state for one parameter block. Moments are lazily
/// sized on the first step.
template <typename Block>
class AdamState {
 public:
  explicit AdamState(const AdamConfig& config) : config_(config) {}

  void step(Block& param, const Block& grad) {
    if (moment1_.size() == 0) {
      moment1_ = Block::Zero(grad.rows(), grad.cols());
      moment2_ = Block::Zero(grad.rows(), grad.cols());
    }
    ++t_;
    moment1_ = config_.beta1 * moment1_ + (1.0 - config_.beta1) * grad;
    moment2_.array() = config_.beta2 * moment2_.array() +
                       (1.0 - config_.beta2) * grad.array().square();
    const Scalar c1 = 1.0 - std::pow(config_.beta1, static_cast<Scalar>(t_));
    const Scalar c2 = 1.0 - std::pow(config_.beta2, static_cast<Scalar>(t_));
    param.array() -= config_.learning_rate * (moment1_.array() / c1) /
                     ((moment2_.array() / c2).sqrt() + config_.epsilon);
  }

 private:
  AdamConfig config_;
  Block moment1_;
  Block moment2_;
  long t_ = 0;
};

}  // namespace pdfool
