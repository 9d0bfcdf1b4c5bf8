#include "tauc/tau_solver.hpp"

#include "tauc/quadrature.hpp"

#include <cmath>
#include <limits>

namespace tauc {

WindowGrid make_window_grid(const TimedSeries<Vec3>& foc,
                            const TimedSeries<Vec3>& accel, Timestamp t_end,
                            double window_s, double rate_hz) {
    if (window_s <= 0 || rate_hz <= 0)
        throw std::invalid_argument("make_window_grid: window and rate must be > 0");
    const auto dt_ns = static_cast<std::int64_t>(std::llround(1e9 / rate_hz));
    const auto n = static_cast<Eigen::Index>(std::llround(window_s * rate_hz)) + 1;

    WindowGrid grid;
    grid.t0 = Timestamp{t_end.ns - (n - 1) * dt_ns};
    grid.dt = static_cast<double>(dt_ns) * 1e-9;
    grid.foc.resize(3, n);
    grid.accel.resize(3, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Timestamp tk{grid.t0.ns + k * dt_ns};
        grid.foc.col(k) = interp_linear(foc, tk);
        grid.accel.col(k) = interp_linear(accel, tk);
    }
    return grid;
}

ActionEffect action_effect(const Eigen::Matrix3Xd& foc, double dt) {
    const Eigen::Index n = foc.cols();
    ActionEffect out;
    out.F0 = foc.col(0);
    out.phi = cumtrapz(foc.row(2).transpose().eval(), dt).array().exp();
    if (!out.phi.allFinite())
        throw std::runtime_error("action_effect: Phi overflow");

    out.E.resize(3, n);
    const Eigen::VectorXd ex =
        cumtrapz((foc.row(0).transpose().array() * out.phi.array())
                     .matrix()
                     .eval(),
                 dt);
    const Eigen::VectorXd ey =
        cumtrapz((foc.row(1).transpose().array() * out.phi.array())
                     .matrix()
                     .eval(),
                 dt);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double t = dt * static_cast<double>(k);
        out.E(0, k) = ex(k) - t * out.F0.x();
        out.E(1, k) = ey(k) - t * out.F0.y();
        out.E(2, k) = out.phi(k) - 1.0 - t * out.F0.z();
    }
    return out;
}

NormalSystem assemble_normal_system(const Eigen::VectorXd& e_axis,
                                    const Eigen::VectorXd& accel_axis,
                                    double dt) {
    const Eigen::VectorXd dd_one =
        double_integral(Eigen::VectorXd::Ones(e_axis.size()).eval(), dt);
    const Eigen::VectorXd dd_a = double_integral(accel_axis, dt);

    NormalSystem sys;
    sys.Q(0, 0) = inner_l2(e_axis, e_axis, dt);
    sys.Q(0, 1) = -inner_l2(e_axis, dd_one, dt);
    sys.Q(1, 0) = sys.Q(0, 1);
    sys.Q(1, 1) = inner_l2(dd_one, dd_one, dt);
    sys.c(0) = 2.0 * inner_l2(e_axis, dd_a, dt);
    sys.c(1) = -2.0 * inner_l2(dd_one, dd_a, dt);
    sys.rhs_norm2 = inner_l2(dd_a, dd_a, dt);
    return sys;
}

WindowSolution solve_window(const NormalSystem& sys, const SolveOptions& opts) {
    WindowSolution sol;
    const double q00 = sys.Q(0, 0), q11 = sys.Q(1, 1), q01 = sys.Q(0, 1);
    sol.det_q = q00 * q11 - q01 * q01;

    const double tr = q00 + q11;
    const double disc = std::sqrt(std::max(tr * tr - 4.0 * sol.det_q, 0.0));
    const double lmax = (tr + disc) / 2.0, lmin = (tr - disc) / 2.0;
    sol.cond = lmin > 0 ? lmax / lmin : std::numeric_limits<double>::infinity();

    if (sol.det_q <= opts.detq_rel * std::max(q00 * q11, 1e-30)) return sol;

    const Eigen::Vector2d y =
        -0.5 * Eigen::Vector2d(q11 * sys.c(0) - q01 * sys.c(1),
                               -q01 * sys.c(0) + q00 * sys.c(1)) /
        sol.det_q;
    sol.posed = true;
    sol.z0 = y(0);
    sol.g_axis = y(1);
    sol.residual =
        std::max(y.dot(sys.Q * y) + sys.c.dot(y) + sys.rhs_norm2, 0.0);
    sol.valid = sol.z0 > opts.z_min;
    return sol;
}

bool gate_axis(const Eigen::VectorXd& accel_axis, double threshold) {
    if (accel_axis.size() == 0) return false;
    const double mean = accel_axis.mean();
    const double rms = std::sqrt((accel_axis.array() - mean).square().mean());
    return rms >= threshold;
}

DepthNow window_depth_now(const WindowSolution& sol, double phi_end,
                          double f_z_now) {
    if (!sol.posed)
        throw std::logic_error("window_depth_now: solution is not posed");
    DepthNow out;
    out.z = sol.z0 * phi_end;
    out.z_dot = f_z_now * out.z;
    return out;
}

}  // namespace tauc
