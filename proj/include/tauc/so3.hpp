#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>

namespace tauc {

/// Quaternion exponential of a rotation vector w (axis * angle, radians).
template <typename Scalar>
Eigen::Quaternion<Scalar> so3_exp(const Eigen::Matrix<Scalar, 3, 1>& w) {
    const Scalar theta2 = w.squaredNorm();
    const Scalar theta = std::sqrt(theta2);
    Scalar re, im;  // cos(theta/2), sin(theta/2)/theta
    if (theta2 < Scalar(1e-16)) {
        // 4th-order series keeps the small-angle branch smooth
        re = Scalar(1) - theta2 / Scalar(8);
        im = Scalar(0.5) - theta2 / Scalar(48);
    } else {
        re = std::cos(theta / Scalar(2));
        im = std::sin(theta / Scalar(2)) / theta;
    }
    return Eigen::Quaternion<Scalar>(re, im * w.x(), im * w.y(), im * w.z());
}

/// Rotation vector of q (inverse of so3_exp), angle in [0, pi].
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> so3_log(const Eigen::Quaternion<Scalar>& q) {
    Eigen::Quaternion<Scalar> qn = q;
    if (qn.w() < Scalar(0)) qn.coeffs() = -qn.coeffs();
    const Scalar vnorm = qn.vec().norm();
    if (vnorm < Scalar(1e-12)) return Scalar(2) * qn.vec();
    const Scalar angle = Scalar(2) * std::atan2(vnorm, qn.w());
    return (angle / vnorm) * qn.vec();
}

/// Angle of the relative rotation between a and b, radians.
template <typename Scalar>
Scalar rotation_distance(const Eigen::Quaternion<Scalar>& a,
                         const Eigen::Quaternion<Scalar>& b) {
    return so3_log(Eigen::Quaternion<Scalar>(a.conjugate() * b)).norm();
}

}  // namespace tauc
