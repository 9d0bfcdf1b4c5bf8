#pragma once

#include "tauc/types.hpp"

namespace tauc {

/// Uniform resampling grid covering exactly [t_end - window, t_end], holding
/// the frequency-of-contact and fixed-frame acceleration series consumed by
/// the window solver. Columns are grid samples.
struct WindowGrid {
    Timestamp t0;             // window start
    double dt = 0.01;         // grid spacing (s)
    Eigen::Matrix3Xd foc;     // F(t), 1/s
    Eigen::Matrix3Xd accel;   // a^m(t), fixed frame, m/s^2

    Eigen::Index size() const { return foc.cols(); }
    double duration() const { return dt * static_cast<double>(size() - 1); }
};

/// Resample both streams onto a uniform grid ending at t_end. Throws a range
/// error when either stream does not cover the window.
WindowGrid make_window_grid(const TimedSeries<Vec3>& foc,
                            const TimedSeries<Vec3>& accel, Timestamp t_end,
                            double window_s, double rate_hz);

/// E(t), Phi(t) and F(0) evaluated over one window. Phi is the running depth
/// ratio Z(t)/Z(0); E is the acceleration-induced position change divided by
/// the window-start depth.
struct ActionEffect {
    Eigen::Matrix3Xd E;
    Eigen::VectorXd phi;
    Vec3 F0;
};

ActionEffect action_effect(const Eigen::Matrix3Xd& foc, double dt);

/// Normal equations of the per-axis window least squares
///   min_{Z0, g} || E Z0 - DD1 g + DDa ||^2
/// where DDa, DD1 are double integrals of the axis acceleration and of the
/// window indicator. Solution recovers the window-start depth and the
/// gravity reading component along the axis.
struct NormalSystem {
    Eigen::Matrix2d Q = Eigen::Matrix2d::Zero();
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
    double rhs_norm2 = 0;  // ||DDa||^2, completes the residual evaluation
};

NormalSystem assemble_normal_system(const Eigen::VectorXd& e_axis,
                                    const Eigen::VectorXd& accel_axis,
                                    double dt);

struct SolveOptions {
    double detq_rel = 1e-8;  // posedness: det Q > detq_rel * max(Q00*Q11, eps)
    double z_min = 0.05;     // m; posed solutions at or below are invalid
};

struct WindowSolution {
    int axis = 0;          // 0 = X, 1 = Y, 2 = Z excitation source
    double z0 = 0;         // depth at window start (m)
    double g_axis = 0;     // gravity reading component (m/s^2)
    double det_q = 0;
    double cond = 0;       // condition estimate of Q
    double residual = 0;   // least-squares residual at the solution
    bool posed = false;    // Q numerically positive definite
    bool valid = false;    // posed and z0 above z_min
};

/// Closed-form 2x2 solve; ill-posedness is reported, never thrown.
WindowSolution solve_window(const NormalSystem& sys,
                            const SolveOptions& opts = {});

/// Excitation gate: true iff the mean-removed RMS of the axis acceleration
/// over the window reaches the threshold (2 m/s^2 default).
bool gate_axis(const Eigen::VectorXd& accel_axis, double threshold = 2.0);

struct DepthNow {
    double z = 0;      // depth at window end (m)
    double z_dot = 0;  // depth rate at window end (m/s)
};

/// Propagate a window solution to the window end through Phi:
/// Z(t) = Z(0) Phi(t), Zdot(t) = F_z(t) Z(t). Requires a posed solution.
DepthNow window_depth_now(const WindowSolution& sol, double phi_end,
                          double f_z_now);

}  // namespace tauc
