#pragma once

#include <Eigen/Dense>

#include <string>

namespace relproj {

// Dense Eigen aliases used across the library. Row-major storage keeps
// per-token vectors contiguous, which is the access pattern of every
// nearest-neighbor scan.
template <typename S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;

using Scalar = double;
using Mat = MatX<Scalar>;
using Vec = VecX<Scalar>;

// Normalized surface form of a vocabulary entry ("south::sudan").
using Token = std::string;

}  // namespace relproj
