#pragma once

#include <complex>

#include <Eigen/Dense>

namespace parax {

using cplx = std::complex<double>;
using Mat4 = Eigen::Matrix4cd;
using Vec4c = Eigen::Vector4cd;
using Vec3c = Eigen::Vector3cd;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

// 4-component complex amplitude; components 1 and 4 carry the two
// circular polarization channels, 2 and 3 the longitudinal field.
using Spinor4 = Vec4c;

inline constexpr cplx iu{0.0, 1.0};

}  // namespace parax
