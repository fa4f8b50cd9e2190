#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>

namespace bira {

using Vec3 = Eigen::Vector3d;
using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double four_pi = 4.0 * std::numbers::pi;

}  // namespace bira
