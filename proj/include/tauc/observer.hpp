#pragma once

#include "tauc/tau_solver.hpp"
#include "tauc/types.hpp"

#include <array>
#include <optional>
#include <vector>

namespace tauc {

/// Injection gain L = diag(l1, l2) of the depth observer. The error dynamics
/// matrix must be Hurwitz, which is checked at construction.
struct ObserverGain {
    double l1 = 2.0;
    double l2 = 20.0;

    ObserverGain() = default;
    ObserverGain(double l1_, double l2_);

    /// Slowest continuous-time error decay rate (both eigenvalues are real
    /// for the diagonal-gain, full-state-measurement form).
    double slowest_decay() const { return std::min(l1, l2); }
};

struct DepthMeasurement {
    double z = 0;      // m
    double z_dot = 0;  // m/s
};

struct ObserverState {
    double z = 0;              // depth estimate (m)
    double z_dot = 0;          // depth rate estimate (m/s)
    Vec3 g = Vec3::Zero();     // latched per-axis gravity reading (m/s^2)
    Timestamp t;
    enum class Mode { measured, dead_reckoning } mode = Mode::measured;
};

/// One explicit-Euler observer step. Prediction integrates the depth-axis
/// kinematics (the depth acceleration is g_z - a_z for an accelerometer that
/// reports -Xdd + g); the correction injects L times the innovation when a
/// measurement is present. Depth positivity is enforced, never silently lost.
ObserverState observer_step(const ObserverState& state, double dt,
                            double a_z_fixed,
                            const std::optional<DepthMeasurement>& meas,
                            double g_z, const ObserverGain& gain = {});

/// Forward-propagate depth through frequency-of-contact alone:
/// Z <- Z exp(F_z dt), the exact solution of Zdot = F_z Z over the step.
ObserverState dead_reckon(const ObserverState& state, double f_z, double dt);

/// Average the window-end depth over axes whose solutions are posed, valid
/// and excitation-gated; empty when none qualify.
std::optional<DepthMeasurement> fuse_axes(
    const std::vector<WindowSolution>& solutions,
    const std::array<bool, 3>& gated, double phi_end, double f_z_now);

/// Back-project the depth estimate through the current image location of the
/// fixated point: (x Z, y Z, Z) in the fixed orientation frame.
Vec3 reconstruct_xyz(const ObserverState& state, const Vec2& point);

}  // namespace tauc
