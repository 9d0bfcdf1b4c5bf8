#include "tauc/observer.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace tauc {

ObserverGain::ObserverGain(double l1_, double l2_) : l1(l1_), l2(l2_) {
    Eigen::Matrix2d closed_loop;
    closed_loop << -l1, 1.0, 0.0, -l2;
    const auto eig = closed_loop.eigenvalues();
    if (eig(0).real() >= 0 || eig(1).real() >= 0)
        throw std::invalid_argument("ObserverGain: closed loop is not stable");
}

ObserverState observer_step(const ObserverState& state, double dt,
                            double a_z_fixed,
                            const std::optional<DepthMeasurement>& meas,
                            double g_z, const ObserverGain& gain) {
    if (dt <= 0) throw std::invalid_argument("observer_step: dt must be > 0");

    ObserverState next = state;
    double dz = state.z_dot;
    double dz_dot = g_z - a_z_fixed;
    if (meas) {
        dz += gain.l1 * (meas->z - state.z);
        dz_dot += gain.l2 * (meas->z_dot - state.z_dot);
        next.mode = ObserverState::Mode::measured;
    }
    next.z = state.z + dt * dz;
    next.z_dot = state.z_dot + dt * dz_dot;
    next.t = Timestamp{state.t.ns + Timestamp::from_seconds(dt).ns};
    if (!(next.z > 0))
        throw std::runtime_error("observer_step: depth estimate left (0, inf)");
    return next;
}

ObserverState dead_reckon(const ObserverState& state, double f_z, double dt) {
    ObserverState next = state;
    next.z = state.z * std::exp(f_z * dt);
    next.z_dot = f_z * next.z;
    next.t = Timestamp{state.t.ns + Timestamp::from_seconds(dt).ns};
    next.mode = ObserverState::Mode::dead_reckoning;
    return next;
}

std::optional<DepthMeasurement> fuse_axes(
    const std::vector<WindowSolution>& solutions,
    const std::array<bool, 3>& gated, double phi_end, double f_z_now) {
    double z_sum = 0, zd_sum = 0;
    int n = 0;
    for (const auto& sol : solutions) {
        if (!sol.posed || !sol.valid || !gated[static_cast<std::size_t>(sol.axis)])
            continue;
        const DepthNow now = window_depth_now(sol, phi_end, f_z_now);
        z_sum += now.z;
        zd_sum += now.z_dot;
        ++n;
    }
    if (n == 0) return std::nullopt;
    return DepthMeasurement{z_sum / n, zd_sum / n};
}

Vec3 reconstruct_xyz(const ObserverState& state, const Vec2& point) {
    return {point.x() * state.z, point.y() * state.z, state.z};
}

}  // namespace tauc
