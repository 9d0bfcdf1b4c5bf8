#pragma once

#include <Eigen/Core>

namespace tauc {

/// Cumulative trapezoidal integral of uniformly sampled f, spacing dt.
/// out[0] = 0, out[k] = out[k-1] + dt/2 (f[k-1] + f[k]). Exact for signals
/// affine in t; O(dt^2) otherwise.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> cumtrapz(
    const Eigen::MatrixBase<Derived>& f, typename Derived::Scalar dt) {
    using Scalar = typename Derived::Scalar;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(f.size());
    if (f.size() == 0) return out;
    out(0) = Scalar(0);
    for (Eigen::Index k = 1; k < f.size(); ++k)
        out(k) = out(k - 1) + (dt / Scalar(2)) * (f(k - 1) + f(k));
    return out;
}

/// Iterated double integral from 0: cumtrapz applied twice.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> double_integral(
    const Eigen::MatrixBase<Derived>& f, typename Derived::Scalar dt) {
    return cumtrapz(cumtrapz(f, dt).eval(), dt);
}

/// dt-weighted inner product <f, g> over a uniform grid (trapezoidal weights).
/// The end weights keep the value a quadrature of the continuous L2 product,
/// so thresholds on it stay meaningful across sample rates.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar inner_l2(const Eigen::MatrixBase<DerivedA>& f,
                                   const Eigen::MatrixBase<DerivedB>& g,
                                   typename DerivedA::Scalar dt) {
    using Scalar = typename DerivedA::Scalar;
    eigen_assert(f.size() == g.size());
    if (f.size() < 2) return Scalar(0);
    Scalar s = f.dot(g);
    s -= (f(0) * g(0) + f(f.size() - 1) * g(g.size() - 1)) / Scalar(2);
    return s * dt;
}

}  // namespace tauc
