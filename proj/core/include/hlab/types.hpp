#pragma once

#include <Eigen/Dense>

namespace hlab {

// Points live in a fixed 4-slot embedding buffer: slot 0 carries the extra
// embedding coordinate of the curved models (hyperboloid / round sphere) and
// is identically zero for the flat model; slots 1..n hold the Cartesian part.
// Dimension n is 2 or 3 throughout, so tangent-space objects use dynamic
// Eigen types with compile-time capacity 3 -- no heap traffic on the hot paths.
using Vec = Eigen::Vector4d;
using VecN = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
using MatN = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;
using FrameMat = Eigen::Matrix<double, 4, Eigen::Dynamic, 0, 4, 3>;

}  // namespace hlab
