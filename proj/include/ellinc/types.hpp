#pragma once

#include <Eigen/Dense>

namespace ellinc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Relative singular-value threshold used for every rank decision.
inline constexpr double kDefaultTol = 1e-10;

}  // namespace ellinc
