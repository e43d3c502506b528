#pragma once

#include <Eigen/Dense>

namespace mtw {

/// Largest supported configuration-space dimension. Vectors and matrices use
/// inline storage of this size so the integrators never touch the heap.
inline constexpr int kMaxDim = 6;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

}  // namespace mtw
