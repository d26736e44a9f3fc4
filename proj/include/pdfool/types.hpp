#pragma once

#include <Eigen/Dense>

namespace pdfool {

using Scalar = double;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

}  // namespace pdfool
