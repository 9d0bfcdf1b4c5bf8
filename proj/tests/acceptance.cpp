// Acceptance suite: one line per criterion, every tolerance pinned in code.
// Criteria 7 and 8 share a rendered dataset that is cached on disk next to
// the test binary (delete acceptance_cache/ to force a re-render).

#include "tauc/evaluation.hpp"
#include "tauc/observer.hpp"
#include "tauc/pipeline.hpp"
#include "tauc/quadrature.hpp"
#include "tauc/rng.hpp"
#include "tauc/tau_solver.hpp"
#include "tauc/tracker.hpp"

#include "test_util.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace tauc;
namespace fs = std::filesystem;

namespace {

struct Failure {
    std::string detail;
};

using CheckFn = std::function<std::string()>;

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), format, args...);
    return buf;
}

void require(bool ok, const std::string& detail) {
    if (!ok) throw Failure{detail};
}

// ---------------------------------------------------------------------------
// shared fixtures

const fs::path kCacheDir = "acceptance_cache";

std::string scenario_fingerprint(const Scenario& sc) {
    std::ostringstream out;
    out.precision(17);
    out << "v2 ";  // dataset format revision
    out << sc.spec.duration << ' ' << sc.spec.seed << ' ' << sc.spec.accel_noise
        << ' ' << sc.spec.gyro_noise << ' ' << sc.scene.n.transpose() << ' '
        << sc.scene.texture.octaves << ' ' << sc.scene.texture.scale << ' '
        << sc.rates.frame_hz << ' ' << sc.intrinsics.width;
    for (const auto& axis : sc.spec.axis)
        for (const auto& term : axis.terms)
            out << ' ' << term.amp << ' ' << term.freq_hz << ' ' << term.phase;
    return out.str();
}

/// Render a builtin scenario to disk once; reuse while its parameters match.
fs::path cached_dataset(const std::string& scenario_name) {
    const Scenario sc = builtin_scenario(scenario_name);
    const std::string print = scenario_fingerprint(sc);
    const fs::path dir = kCacheDir / scenario_name;
    const fs::path marker = dir / ".complete";

    std::string cached;
    if (std::ifstream in(marker); in) std::getline(in, cached);
    if (cached != print) {
        fs::remove_all(dir);
        fs::create_directories(dir);
        PlanarSimulator sim(sc.scene, sc.spec, sc.rates, sc.intrinsics,
                            sc.patch_center_px);
        write_dataset(sim, dir);
        std::ofstream(marker) << print << "\n";
    }
    return dir;
}

PlanarSimulator scenario_sim(const std::string& name) {
    const Scenario sc = builtin_scenario(name);
    return PlanarSimulator(sc.scene, sc.spec, sc.rates, sc.intrinsics,
                           sc.patch_center_px);
}

double dataset_ate_cm(const fs::path& dir, const RunConfig& cfg) {
    const EstimateResult result = run_estimate_on_dataset(dir, cfg);
    require(!result.tracking_lost,
            fmt("tracking lost at t = %.2f s", result.lost_at.seconds()));
    require(result.trajectory.points.size() > 100, "estimate too short");
    const Trajectory truth =
        read_trajectory_csv(dir / "groundtruth.csv", "ground_truth");
    return ate(align_rigid(result.trajectory, truth)).ate_cm;
}

// ---------------------------------------------------------------------------
// criteria

std::string criterion_1() {
    using namespace std::chrono;
    testutil::AxialSineWindow win(2.0, 3.0, 1.0, 0.0, 2.0, 100.0);
    const WindowSolution sol = testutil::solve_axis(win.foc, win.accel, win.dt, 2);
    require(sol.posed, "window not posed");
    const double z_rel = std::abs(sol.z0 - 2.0) / 2.0;
    const double g_err = std::abs(sol.g_axis - 0.0);
    require(z_rel < 1e-3, fmt("|Z*-Z0|/Z0 = %.3e >= 1e-3", z_rel));
    require(g_err < 0.02, fmt("|g*-g| = %.3e >= 0.02", g_err));

    // gravity folded into the reading
    testutil::AxialSineWindow grav(2.0, 3.0, 1.0, 9.81, 2.0, 100.0);
    const WindowSolution sol_g =
        testutil::solve_axis(grav.foc, grav.accel, grav.dt, 2);
    require(sol_g.posed, "gravity window not posed");
    const double g_err2 = std::abs(sol_g.g_axis - 9.81);
    require(g_err2 < 0.02, fmt("|g*-9.81| = %.3e >= 0.02", g_err2));

    // runtime: one full window evaluation (action effect + 3 axis solves)
    const auto t0 = steady_clock::now();
    constexpr int kReps = 200;
    for (int rep = 0; rep < kReps; ++rep) {
        const ActionEffect act = action_effect(win.foc, win.dt);
        for (int axis = 0; axis < 3; ++axis) {
            const NormalSystem sys = assemble_normal_system(
                act.E.row(axis).transpose(), win.accel.row(axis).transpose(),
                win.dt);
            (void)solve_window(sys);
        }
    }
    const double ms =
        duration<double, std::milli>(steady_clock::now() - t0).count() / kReps;
    require(ms < 1.0, fmt("window solve took %.3f ms >= 1 ms", ms));
    return fmt("|Z*-Z0|/Z0 = %.2e, |g*-g| = %.2e (free) / %.2e (9.81), %.3f ms/window",
               z_rel, g_err, g_err2, ms);
}

std::string criterion_2() {
    // three-axis sinusoid + drift trajectory, exact samples, trapezoid ops
    auto residual = [](double rate) {
        constexpr double kHalfPi = std::numbers::pi / 2.0;
        TrajectorySpec spec;
        spec.duration = 2.0;
        spec.axis[0].terms.push_back({0.0, 2.0, 2.5, 0.9, kHalfPi});
        spec.axis[1].terms.push_back({0.0, 2.0, 1.5, 1.3, kHalfPi});
        spec.axis[2].terms.push_back({0.0, 2.0, 3.0, 1.0, 0.0});
        spec.axis[0].vel0 = 0.05;
        PlanarSimulator sim({}, spec, {}, {400.0, 400.0, 424.0, 240.0, 848, 480},
                            Vec2(424, 240));
        const auto n = static_cast<Eigen::Index>(std::llround(2.0 * rate)) + 1;
        const double dt = 1.0 / rate;
        Eigen::Matrix3Xd foc(3, n), xdd(3, n);
        for (Eigen::Index k = 0; k < n; ++k) {
            const double t = dt * static_cast<double>(k);
            foc.col(k) = sim.foc(t);
            xdd.col(k) = -sim.acceleration(t);  // scene-point acceleration
        }
        const ActionEffect act = action_effect(foc, dt);
        const double z0 = sim.depth(0.0);
        double worst = 0;
        for (int axis = 0; axis < 3; ++axis) {
            const Eigen::VectorXd dd =
                double_integral(xdd.row(axis).transpose().eval(), dt);
            worst = std::max(worst, (z0 * act.E.row(axis).transpose() - dd)
                                        .cwiseAbs()
                                        .maxCoeff());
        }
        return worst;
    };
    const double coarse = residual(100.0);
    const double fine = residual(200.0);
    const double ratio = coarse / fine;
    require(ratio > 3.5 && ratio < 4.5,
            fmt("contraction ratio %.2f outside [3.5, 4.5]", ratio));
    return fmt("residual %.2e @100Hz -> %.2e @200Hz, ratio %.2f", coarse, fine,
               ratio);
}

std::string criterion_3() {
    std::uint64_t rng = 0xACCE97;
    int correct = 0, total = 0;
    int constant_count = 0, jerky_count = 0;
    while (constant_count < 100 || jerky_count < 100) {
        const double z0 = 1.0 + 3.0 * uniform01(rng);
        const double v = 0.4 * uniform01(rng) - 0.2;
        const bool constant = constant_count < 100 &&
                              (jerky_count >= 100 || uniform01(rng) < 0.5);
        std::vector<double> coeffs;
        const double sign = uniform01(rng) < 0.5 ? -1.0 : 1.0;
        coeffs.push_back(sign * (0.15 + 0.35 * uniform01(rng)));
        if (!constant) coeffs.push_back(0.1 + 0.25 * uniform01(rng));
        testutil::PolyWindow win(z0, v, coeffs, 0.0, 2.0, 100.0);
        if (win.foc.row(2).cwiseAbs().maxCoeff() > 5.0) continue;
        const WindowSolution sol =
            testutil::solve_axis(win.foc, win.accel, win.dt, 2);
        ++total;
        if (constant) {
            ++constant_count;
            if (!sol.posed) ++correct;
        } else {
            ++jerky_count;
            if (sol.posed) ++correct;
        }
    }
    require(correct == total, fmt("%d/%d windows classified", correct, total));
    return fmt("%d/%d windows classified correctly (100 constant, 100 jerky)",
               correct, total);
}

std::string criterion_4() {
    std::uint64_t rng = 0xE9 * 2024;
    auto draw = [&rng](double lo, double hi) {
        return lo + (hi - lo) * uniform01(rng);
    };
    double worst_f = 0, worst_eta = 0;
    int tested = 0;
    while (tested < 1000) {
        const Vec3 xdot(draw(-2, 2), draw(-2, 2), draw(-2, 2));
        const Vec3 n(draw(-0.3, 0.3), draw(-0.3, 0.3), draw(0.2, 1.0));
        AffineFlow flow;
        flow.a << xdot.x() * n.x() - xdot.z() * n.z(), xdot.x() * n.y(),
            xdot.x() * n.z(), xdot.y() * n.x(),
            xdot.y() * n.y() - xdot.z() * n.z(), xdot.y() * n.z();
        if (std::abs(flow.a(0, 2)) < 1e-3 || std::abs(flow.a(1, 2)) < 1e-3)
            continue;
        ++tested;
        const Vec2 x(draw(-0.8, 0.8), draw(-0.5, 0.5));
        const FocSample s = flow_to_foc(flow, x);
        const double inv_z = n.dot(Vec3(x.x(), x.y(), 1.0));
        worst_f = std::max(worst_f, (s.F - xdot * inv_z).norm());

        const double eta1 =
            flow.a(1, 0) * flow.a(0, 2) / flow.a(1, 2) - flow.a(0, 0);
        const double eta2 =
            flow.a(0, 1) * flow.a(1, 2) / flow.a(0, 2) - flow.a(1, 1);
        worst_eta = std::max(worst_eta, std::abs(eta1 - eta2));
    }
    require(worst_f <= 1e-9, fmt("F inversion error %.2e > 1e-9", worst_f));
    require(worst_eta <= 1e-9, fmt("eta identity error %.2e > 1e-9", worst_eta));
    return fmt("1000 draws: max F error %.1e, max eta mismatch %.1e", worst_f,
               worst_eta);
}

std::string criterion_5() {
    const fs::path dir = cached_dataset("approach-2m");
    const PlanarSimulator sim = scenario_sim("approach-2m");

    // the per-frame finite difference has occasional isolated spikes; the
    // median-of-3 flow filter is the documented suppression for them
    RunConfig cfg;
    cfg.median_filter = true;
    const EstimateResult result = run_estimate_on_dataset(dir, cfg);
    require(!result.tracking_lost, "tracking lost on the approach sequence");

    double worst_rel = 0;
    std::size_t checked = 0;
    for (std::size_t i = 0; i < result.foc.size(); ++i) {
        if (i < 10) continue;  // settle-in frames
        const double t = result.foc.time(i).seconds();
        const double truth = sim.foc(t).z();
        const double rel = std::abs(result.foc.value(i).z() - truth) /
                           std::abs(truth);
        worst_rel = std::max(worst_rel, rel);
        ++checked;
    }
    require(checked > 300, "too few F samples");
    require(worst_rel < 0.05,
            fmt("F_z relative error %.3f >= 0.05", worst_rel));
    require(result.tracker_fps >= 300.0,
            fmt("tracker at %.0f fps < 300 fps", result.tracker_fps));
    return fmt("max |F_z err| %.1f%% over %zu frames (median-of-3 on), "
               "tracker %.0f fps single-threaded",
               worst_rel * 100, checked, result.tracker_fps);
}

std::string criterion_6() {
    const ObserverGain gain(2.0, 20.0);
    const double dt = 0.01;
    ObserverState s;
    s.z = 1.5;  // 50% error against the 3 m truth
    s.z_dot = 0.0;
    const double e0 = std::abs(s.z - 3.0);
    double err_at_5s = 0;
    double t_fold = 0;
    const double fold_target = e0 * std::exp(-4.0);
    bool folded = false;
    for (int k = 0; k < 800; ++k) {
        s = observer_step(s, dt, 9.81, DepthMeasurement{3.0, 0.0}, 9.81, gain);
        const double t = (k + 1) * dt;
        const double err = std::abs(s.z - 3.0);
        if (!folded && err < fold_target) {
            folded = true;
            t_fold = t;
        }
        if (std::abs(t - 5.0) < dt / 2) err_at_5s = err;
    }
    require(err_at_5s < 0.01 * e0,
            fmt("error at 5 s is %.2f%% of initial", 100 * err_at_5s / e0));
    require(folded, "error never contracted by e^-4");
    const double rate = 4.0 / t_fold;
    const double predicted = gain.slowest_decay();
    const double rate_err = std::abs(rate - predicted) / predicted;
    require(rate_err < 0.10,
            fmt("decay rate %.2f vs predicted %.2f (%.1f%% off)", rate,
                predicted, 100 * rate_err));
    return fmt("error at 5 s = %.3f%% of initial, decay rate %.2f /s vs %.2f "
               "predicted (%.1f%% off)",
               100 * err_at_5s / e0, rate, predicted, 100 * rate_err);
}

std::string criterion_7() {
    const fs::path dir = cached_dataset("excite-xz-20s");

    // scenario sanity: two axes excited above the 2 m/s^2 gate
    const auto accel = read_imu_csv(dir / "accel.csv");
    Eigen::VectorXd ax(static_cast<Eigen::Index>(accel.size())),
        az(static_cast<Eigen::Index>(accel.size()));
    for (std::size_t i = 0; i < accel.size(); ++i) {
        ax(static_cast<Eigen::Index>(i)) = accel[i].accel.x();
        az(static_cast<Eigen::Index>(i)) = accel[i].accel.z();
    }
    require(gate_axis(ax) && gate_axis(az), "excitation below the gate");

    const Trajectory truth =
        read_trajectory_csv(dir / "groundtruth.csv", "ground_truth");
    const double path_m = path_length(truth);
    require(path_m > 10.0 && path_m < 25.0,
            fmt("path length %.1f m outside the ~15 m envelope", path_m));

    const double ate_cm = dataset_ate_cm(dir, RunConfig{});
    require(ate_cm <= 10.0, fmt("ATE %.2f cm > 10 cm", ate_cm));
    return fmt("ATE %.2f cm <= 10 cm over %.1f m path (rendered frames, "
               "full tracker)",
               ate_cm, path_m);
}

std::string criterion_8() {
    const fs::path dir = cached_dataset("excite-xz-20s");
    const double ate_90 = dataset_ate_cm(dir, RunConfig{});
    RunConfig cfg30;
    cfg30.decimate_hz = 30.0;
    const double ate_30 = dataset_ate_cm(dir, cfg30);
    RunConfig cfg15;
    cfg15.decimate_hz = 15.0;
    const double ate_15 = dataset_ate_cm(dir, cfg15);
    require(ate_30 <= 2.0 * ate_90,
            fmt("30 Hz ATE %.2f cm > 2x %.2f cm", ate_30, ate_90));
    require(ate_15 <= 2.0 * ate_90,
            fmt("15 Hz ATE %.2f cm > 2x %.2f cm", ate_15, ate_90));
    return fmt("ATE %.2f cm @90Hz, %.2f cm @30Hz, %.2f cm @15Hz", ate_90,
               ate_30, ate_15);
}

std::string criterion_9() {
    const PlanarSimulator sim = scenario_sim("coast-xz");
    TimedSeries<Vec3> oracle;
    for (const Timestamp t : sim.frame_times())
        oracle.push_back(t, sim.foc(t.seconds()));

    SensorData sensors;
    sensors.intrinsics = sim.intrinsics();
    sensors.gyro = sim.gyro_stream();
    sensors.accel = sim.accel_stream();
    sensors.patch_center_px = sim.patch_center_px();

    RunConfig cfg;
    cfg.oracle_foc = true;
    struct NullFrames final : FrameSource {
        std::size_t count() const override { return 0; }
        Timestamp time(std::size_t) const override { return {}; }
        Image frame(std::size_t) const override { return {}; }
    } frames;
    const EstimateResult result = run_estimate(frames, sensors, cfg, &oracle);

    // excitation stops on [6, 9]; the 2 s window smears each edge forward
    const double coast_on = 6.0, coast_off = 9.0, window = cfg.window_s;
    double first_dr = -1, last_dr = -1;
    double e_pre = -1, e_end = -1;
    for (const auto& d : result.diagnostics) {
        if (d.mode == '-') continue;
        const double t = d.t.seconds();
        if (t < 15.0 && d.mode == 'd') {
            if (first_dr < 0) first_dr = t;
            last_dr = t;
            e_end = std::abs(d.z - sim.depth(t));
        }
        if (d.mode == 'm' && first_dr < 0) e_pre = std::abs(d.z - sim.depth(t));
        // the span core must be dead reckoning; well before/after, measured
        if (t > coast_on + window + 0.05 && t < coast_off - 0.05)
            require(d.mode == 'd', fmt("mode '%c' at t = %.2f inside the coast",
                                       d.mode, t));
        if ((t > 3.0 && t < coast_on - 0.05) ||
            (t > coast_off + window + 0.05 && t < 15.0))
            require(d.mode == 'm', fmt("mode '%c' at t = %.2f outside the coast",
                                       d.mode, t));
    }
    require(first_dr >= coast_on && first_dr <= coast_on + window + 0.05,
            fmt("dead reckoning started at %.2f s", first_dr));
    require(last_dr >= coast_off && last_dr <= coast_off + window + 0.05,
            fmt("dead reckoning ended at %.2f s", last_dr));
    require(e_pre >= 0 && e_end >= 0, "missing mode transitions");
    require(e_end <= e_pre + 0.005,
            fmt("depth error grew %.4f m -> %.4f m across the coast", e_pre,
                e_end));
    return fmt("dead reckoning on [%.2f, %.2f] s (coast [6, 9] + window), "
               "depth error %.1f mm -> %.1f mm",
               first_dr, last_dr, 1e3 * e_pre, 1e3 * e_end);
}

std::string criterion_10() {
    AlignedPair hand;
    hand.truth.push_back(Timestamp{0}, Vec3::Zero());
    hand.truth.push_back(Timestamp{1000}, Vec3::Zero());
    hand.aligned_estimate.push_back(Timestamp{0}, Vec3(0.03, 0, 0));
    hand.aligned_estimate.push_back(Timestamp{1000}, Vec3(0, 0.04, 0));
    const double hand_ate = ate(hand).ate_cm;
    require(std::abs(hand_ate - 3.54) <= 0.01,
            fmt("two-sample ATE %.4f cm != 3.54 +- 0.01", hand_ate));

    // rigid-transform invariance
    Trajectory truth, est;
    truth.label = "ground_truth";
    est.label = "estimate";
    NormalSampler noise(17);
    for (int k = 0; k <= 300; ++k) {
        const double t = k * 0.05;
        const Vec3 p(std::cos(t), std::sin(t), 0.25 * t);
        truth.points.push_back(Timestamp::from_seconds(t), p);
        est.points.push_back(Timestamp::from_seconds(t), p + 0.01 * noise.vec3());
    }
    const double base = ate(align_rigid(est, truth)).ate_cm;
    const Mat3 r =
        Eigen::AngleAxisd(1.1, Vec3(0.3, -0.5, 0.8).normalized()).matrix();
    Trajectory moved;
    moved.label = "estimate";
    for (std::size_t i = 0; i < est.points.size(); ++i)
        moved.points.push_back(est.points.time(i),
                               r * est.points.value(i) + Vec3(5, -3, 12));
    const double after = ate(align_rigid(moved, truth)).ate_cm;
    const double drift = std::abs(after - base);
    require(drift <= 1e-9, fmt("ATE changed by %.2e cm under a rigid move", drift));
    return fmt("two-sample ATE %.3f cm, rigid-invariance drift %.1e cm",
               hand_ate, drift);
}

}  // namespace

int main() {
    struct Entry {
        int id;
        const char* label;
        CheckFn fn;
    };
    const std::vector<Entry> criteria = {
        {1, "closed-form depth recovery", criterion_1},
        {2, "theorem residual convergence", criterion_2},
        {3, "well-posedness tracks jerk", criterion_3},
        {4, "flow inversion property", criterion_4},
        {5, "tracker and flow accuracy", criterion_5},
        {6, "observer convergence", criterion_6},
        {7, "end-to-end synthetic ATE", criterion_7},
        {8, "decimation robustness", criterion_8},
        {9, "gating and dead reckoning", criterion_9},
        {10, "evaluation correctness", criterion_10},
    };

    int failures = 0;
    for (const auto& entry : criteria) {
        std::string detail;
        bool ok = true;
        try {
            detail = entry.fn();
        } catch (const Failure& f) {
            ok = false;
            detail = f.detail;
        } catch (const std::exception& e) {
            ok = false;
            detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] criterion %2d (%s): %s\n", ok ? "PASS" : "FAIL",
                    entry.id, entry.label, detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    if (failures) std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
