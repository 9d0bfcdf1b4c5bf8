#pragma once

// Analytic window generators shared by the solver tests and the acceptance
// suite. Everything here is closed form; quadrature only ever happens inside
// the code under test.

#include "tauc/tau_solver.hpp"
#include "tauc/types.hpp"

#include <cmath>
#include <numbers>

namespace tauc::testutil {

/// Axial (Z-only) window with scene-point acceleration
/// Xdd_z(t) = amp sin(2 pi f t), Z(0) = z0, zero initial point velocity, and
/// accelerometer reading a_z = -Xdd_z + g_z. Exact samples on the grid.
struct AxialSineWindow {
    Eigen::Matrix3Xd foc;
    Eigen::Matrix3Xd accel;
    double dt;

    double z0, amp, freq, g_z;

    AxialSineWindow(double z0_in, double amp_in, double freq_in, double g_in,
                    double window_s, double rate_hz)
        : z0(z0_in), amp(amp_in), freq(freq_in), g_z(g_in) {
        const auto n = static_cast<Eigen::Index>(std::llround(window_s * rate_hz)) + 1;
        dt = 1.0 / rate_hz;
        foc.setZero(3, n);
        accel.setZero(3, n);
        for (Eigen::Index k = 0; k < n; ++k) {
            const double t = dt * static_cast<double>(k);
            foc(2, k) = z_dot(t) / z(t);
            accel(2, k) = -xdd(t) + g_z;
        }
    }

    double xdd(double t) const {
        return amp * std::sin(2 * std::numbers::pi * freq * t);
    }
    double z_dot(double t) const {
        const double w = 2 * std::numbers::pi * freq;
        return amp * (1 - std::cos(w * t)) / w;
    }
    double z(double t) const {
        const double w = 2 * std::numbers::pi * freq;
        return z0 + amp * (t / w - std::sin(w * t) / (w * w));
    }
};

/// Window whose depth follows a polynomial: Z(t) = z0 + v t + sum c_j t^{j+2}
/// so the acceleration is a polynomial with coefficients (j+2)(j+1) c_j.
/// Constant acceleration (all c_j beyond j=0 zero) has zero jerk.
struct PolyWindow {
    Eigen::Matrix3Xd foc;
    Eigen::Matrix3Xd accel;
    double dt;

    PolyWindow(double z0, double v, const std::vector<double>& c, double g_z,
               double window_s, double rate_hz) {
        const auto n = static_cast<Eigen::Index>(std::llround(window_s * rate_hz)) + 1;
        dt = 1.0 / rate_hz;
        foc.setZero(3, n);
        accel.setZero(3, n);
        for (Eigen::Index k = 0; k < n; ++k) {
            const double t = dt * static_cast<double>(k);
            double z = z0 + v * t, zd = v, zdd = 0;
            for (std::size_t j = 0; j < c.size(); ++j) {
                const double p = static_cast<double>(j) + 2.0;
                z += c[j] * std::pow(t, p);
                zd += c[j] * p * std::pow(t, p - 1.0);
                zdd += c[j] * p * (p - 1.0) * std::pow(t, p - 2.0);
            }
            foc(2, k) = zd / z;
            accel(2, k) = -zdd + g_z;
        }
    }
};

inline WindowSolution solve_axis(const Eigen::Matrix3Xd& foc,
                                 const Eigen::Matrix3Xd& accel, double dt,
                                 int axis, const SolveOptions& opts = {}) {
    const ActionEffect act = action_effect(foc, dt);
    const NormalSystem sys = assemble_normal_system(
        act.E.row(axis).transpose(), accel.row(axis).transpose(), dt);
    WindowSolution sol = solve_window(sys, opts);
    sol.axis = axis;
    return sol;
}

}  // namespace tauc::testutil
