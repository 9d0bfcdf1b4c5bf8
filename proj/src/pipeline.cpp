#include "tauc/pipeline.hpp"

#include "tauc/derotation.hpp"
#include "tauc/observer.hpp"
#include "tauc/tau_solver.hpp"
#include "tauc/tracker.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>

namespace tauc {

RunConfig load_run_config(const std::filesystem::path& path, RunConfig cfg) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path.string());
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) continue;

        if (key == "window_s") cfg.window_s = std::stod(value);
        else if (key == "fusion_hz") cfg.fusion_hz = std::stod(value);
        else if (key == "gate_threshold") cfg.gate_threshold = std::stod(value);
        else if (key == "observer_l1") cfg.observer_l1 = std::stod(value);
        else if (key == "observer_l2") cfg.observer_l2 = std::stod(value);
        else if (key == "patch_px") cfg.patch_px = std::stod(value);
        else if (key == "subsample") cfg.subsample = std::stoi(value);
        else if (key == "decimate_hz") cfg.decimate_hz = std::stod(value);
        else if (key == "detq_min") cfg.detq_min = std::stod(value);
        else if (key == "ratio_eps") cfg.ratio_eps = std::stod(value);
        else if (key == "z_min") cfg.z_min = std::stod(value);
        else if (key == "seed") cfg.seed = std::stoull(value);
        else if (key == "oracle_foc") cfg.oracle_foc = value == "true" || value == "1";
        else if (key == "estimate_gyro_bias")
            cfg.estimate_gyro_bias = value == "true" || value == "1";
        else if (key == "bias_window_s") cfg.bias_window_s = std::stod(value);
        else if (key == "median_filter")
            cfg.median_filter = value == "true" || value == "1";
        else if (key == "prefilter")
            cfg.prefilter = value == "true" || value == "1";
        else if (key == "tracker_det_min") cfg.tracker_det_min = std::stod(value);
        else
            throw std::runtime_error("unknown config key '" + key + "' at " +
                                     path.string() + ":" + std::to_string(lineno));
    }
    return cfg;
}

DatasetFrameSource::DatasetFrameSource(const std::filesystem::path& dataset_dir)
    : dir_(dataset_dir), index_(read_frame_index(dataset_dir / "frames.csv")) {}

Image DatasetFrameSource::frame(std::size_t i) const {
    return load_pgm((dir_ / index_.files[i]).string());
}

namespace {

struct FocStreams {
    TimedSeries<Vec3> foc;
    TimedSeries<Vec2> fixation;
    double tracker_fps = 0;
    bool lost = false;
    Timestamp lost_at;
};

int decimation_stride(double frame_hz, double decimate_hz) {
    if (decimate_hz <= 0) return 1;
    const double ratio = frame_hz / decimate_hz;
    const int stride = static_cast<int>(std::lround(ratio));
    if (stride < 1 || std::abs(ratio - stride) > 1e-6)
        throw std::invalid_argument("decimation rate must divide the frame rate");
    return stride;
}

/// Track every frame; emit F at the decimated cadence with the decimation
/// interval as the finite-difference baseline.
FocStreams run_tracker(FrameSource& frames, const SensorData& sensors,
                       const OrientationTrack& track, const RunConfig& cfg) {
    FocStreams out;
    if (frames.count() < 2)
        throw std::invalid_argument("run_estimate: need at least 2 frames");

    const double frame_dt =
        (frames.time(1) - frames.time(0)).seconds();
    const int stride = decimation_stride(1.0 / frame_dt, cfg.decimate_hz);

    const Vec2 center_px = sensors.patch_center_px == Vec2::Zero()
                               ? Vec2(sensors.intrinsics.cx, sensors.intrinsics.cy)
                               : sensors.patch_center_px;
    const Image frame0 =
        cfg.prefilter ? binomial_blur3(frames.frame(0)) : frames.frame(0);
    PatchTemplateOptions tpl_opts;
    tpl_opts.patch_px = cfg.patch_px;
    tpl_opts.subsample = cfg.subsample;
    tpl_opts.seed = cfg.seed;
    const PatchTemplate tpl =
        build_template(frame0, sensors.intrinsics, center_px, tpl_opts);

    TrackOptions track_opts;
    track_opts.det_min = cfg.tracker_det_min;

    std::deque<AffineWarp> history;  // last stride+1 warps
    history.push_back(AffineWarp::identity(frames.time(0)));
    FlowMedianFilter median;

    Mat3 k_h;
    k_h << sensors.intrinsics.fx, 0, sensors.intrinsics.cx, 0,
        sensors.intrinsics.fy, sensors.intrinsics.cy, 0, 0, 1;
    const Vec2 center_cal = to_calibrated(center_px, sensors.intrinsics);
    const double half_cal_x = cfg.patch_px / 2.0 / sensors.intrinsics.fx;
    const double half_cal_y = cfg.patch_px / 2.0 / sensors.intrinsics.fy;

    // pixel neighborhood the tracker will sample, predicted from the warm
    // start; blurring just this region in place skips the full-frame pass
    auto prefilter_patch = [&](Image& raw, const AffineWarp& prev,
                               const Quat& r) {
        const Mat3 chain =
            k_h * derotation_homography(r) * prev.homogeneous();
        double lo_x = 1e300, lo_y = 1e300, hi_x = -1e300, hi_y = -1e300;
        for (const double sx : {-1.0, 1.0}) {
            for (const double sy : {-1.0, 1.0}) {
                const Vec3 h = chain * Vec3(center_cal.x() + sx * half_cal_x,
                                            center_cal.y() + sy * half_cal_y,
                                            1.0);
                if (h.z() <= 0) {  // degenerate warm start, blur everything
                    binomial_blur3_region(raw, 0, 0, raw.width - 1,
                                          raw.height - 1);
                    return;
                }
                lo_x = std::min(lo_x, h.x() / h.z());
                hi_x = std::max(hi_x, h.x() / h.z());
                lo_y = std::min(lo_y, h.y() / h.z());
                hi_y = std::max(hi_y, h.y() / h.z());
            }
        }
        constexpr int kMargin = 40;
        binomial_blur3_region(raw, static_cast<int>(lo_x) - kMargin,
                              static_cast<int>(lo_y) - kMargin,
                              static_cast<int>(hi_x) + kMargin,
                              static_cast<int>(hi_y) + kMargin);
    };

    double tracked_seconds = 0;
    std::size_t tracked_frames = 0;
    for (std::size_t i = 1; i < frames.count(); ++i) {
        const Timestamp t = frames.time(i);
        Image img = frames.frame(i);
        AffineWarp w;
        try {
            // the prefilter counts as tracking work for throughput purposes
            const auto t_begin = std::chrono::steady_clock::now();
            const Quat r = track.at(t);
            if (cfg.prefilter) prefilter_patch(img, history.back(), r);
            w = track_frame(tpl, img, sensors.intrinsics, r, history.back(), t,
                            track_opts);
            tracked_seconds +=
                std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              t_begin)
                    .count();
            ++tracked_frames;
        } catch (const tracking_lost_error& err) {
            out.lost = true;
            out.lost_at = err.t;
            break;
        }
        history.push_back(w);
        while (history.size() > static_cast<std::size_t>(stride) + 1)
            history.pop_front();

        if (i % static_cast<std::size_t>(stride) != 0) continue;
        const AffineWarp& base = history.front();
        AffineFlow flow = warp_to_flow(w, base, (w.t - base.t).seconds());
        if (cfg.median_filter) flow = median.push(flow);
        // the backward difference is most accurate at the interval midpoint;
        // stamp F and the fixation point there
        const Timestamp t_mid{(w.t.ns + base.t.ns) / 2};
        flow.t = t_mid;
        const Vec2 point = 0.5 * (w.apply(tpl.center) + base.apply(tpl.center));
        FocOptions foc_opts;
        foc_opts.ratio_eps = cfg.ratio_eps;
        try {
            const FocSample f = flow_to_foc(flow, point, foc_opts);
            out.foc.push_back(t_mid, f.F);
            out.fixation.push_back(t_mid, f.point);
        } catch (const std::runtime_error&) {
            // transient flow degeneracy: drop the sample, the window
            // resampling bridges the gap
        }
    }
    out.tracker_fps = tracked_seconds > 0
                          ? static_cast<double>(tracked_frames) / tracked_seconds
                          : 0.0;
    return out;
}

/// Oracle bypass: F comes in directly; the fixation point track is recovered
/// by integrating xdot = F_xy - x F_z (Heun steps) from the patch center.
FocStreams expand_oracle(const TimedSeries<Vec3>& oracle,
                         const SensorData& sensors, const RunConfig& cfg) {
    FocStreams out;
    if (oracle.size() < 2)
        throw std::invalid_argument("oracle F stream needs at least 2 samples");

    const double dt0 = (oracle.time(1) - oracle.time(0)).seconds();
    const int stride = decimation_stride(1.0 / dt0, cfg.decimate_hz);

    const Vec2 center_px = sensors.patch_center_px == Vec2::Zero()
                               ? Vec2(sensors.intrinsics.cx, sensors.intrinsics.cy)
                               : sensors.patch_center_px;
    Vec2 x = to_calibrated(center_px, sensors.intrinsics);

    auto flow_at = [&oracle](std::size_t i, const Vec2& pt) {
        const Vec3& f = oracle.value(i);
        return Vec2(f.x() - pt.x() * f.z(), f.y() - pt.y() * f.z());
    };

    out.foc.push_back(oracle.time(0), oracle.value(0));
    out.fixation.push_back(oracle.time(0), x);
    for (std::size_t i = 1; i < oracle.size(); ++i) {
        const double h = (oracle.time(i) - oracle.time(i - 1)).seconds();
        const Vec2 k1 = flow_at(i - 1, x);
        const Vec2 k2 = flow_at(i, x + h * k1);
        x += h / 2.0 * (k1 + k2);
        if (i % static_cast<std::size_t>(stride) != 0) continue;
        out.foc.push_back(oracle.time(i), oracle.value(i));
        out.fixation.push_back(oracle.time(i), x);
    }
    return out;
}

}  // namespace

EstimateResult run_estimate(FrameSource& frames, const SensorData& sensors,
                            const RunConfig& cfg,
                            const TimedSeries<Vec3>* oracle) {
    GyroIntegrationOptions gyro_opts;
    gyro_opts.estimate_bias = cfg.estimate_gyro_bias;
    gyro_opts.bias_window_s = cfg.bias_window_s;
    const OrientationTrack track = integrate_gyro(sensors.gyro, gyro_opts);
    const TimedSeries<Vec3> accel_fixed = derotate_accel(sensors.accel, track);

    FocStreams streams;
    if (cfg.oracle_foc) {
        if (!oracle)
            throw std::invalid_argument("run_estimate: oracle mode without oracle F");
        streams = expand_oracle(*oracle, sensors, cfg);
    } else {
        streams = run_tracker(frames, sensors, track, cfg);
    }

    EstimateResult result;
    result.trajectory.label = "estimate";
    result.foc = streams.foc;
    result.fixation = streams.fixation;
    result.tracker_fps = streams.tracker_fps;
    result.tracking_lost = streams.lost;
    result.lost_at = streams.lost_at;
    if (streams.foc.size() < 2) return result;

    const auto fusion_dt_ns =
        static_cast<std::int64_t>(std::llround(1e9 / cfg.fusion_hz));
    const double dt = static_cast<double>(fusion_dt_ns) * 1e-9;
    const std::int64_t window_ns =
        static_cast<std::int64_t>(std::llround(cfg.window_s * 1e9));

    const std::int64_t start_ns =
        std::max(streams.foc.front_time().ns, accel_fixed.front_time().ns) +
        window_ns;
    const std::int64_t end_ns =
        std::min(streams.foc.back_time().ns, accel_fixed.back_time().ns);

    const ObserverGain gain(cfg.observer_l1, cfg.observer_l2);
    const SolveOptions solve_opts{cfg.detq_min, cfg.z_min};
    ObserverState state;
    bool initialized = false;
    std::array<bool, 3> g_latched{false, false, false};
    Vec3 g_latch = Vec3::Zero();

    for (std::int64_t k = (start_ns + fusion_dt_ns - 1) / fusion_dt_ns;
         k * fusion_dt_ns <= end_ns; ++k) {
        const Timestamp t_now{k * fusion_dt_ns};
        const WindowGrid grid = make_window_grid(streams.foc, accel_fixed, t_now,
                                                 cfg.window_s, cfg.fusion_hz);
        const ActionEffect act = action_effect(grid.foc, grid.dt);
        const Eigen::Index last = grid.size() - 1;
        const double phi_end = act.phi(last);
        const double f_z_now = grid.foc(2, last);

        WindowDiagnostics diag;
        diag.t = t_now;
        std::array<bool, 3> gated{};
        std::vector<WindowSolution> sols;
        for (int a = 0; a < 3; ++a) {
            gated[a] = gate_axis(grid.accel.row(a).transpose(), cfg.gate_threshold);
            const NormalSystem sys = assemble_normal_system(
                act.E.row(a).transpose(), grid.accel.row(a).transpose(), grid.dt);
            WindowSolution sol = solve_window(sys, solve_opts);
            sol.axis = a;
            diag.det_q[a] = sol.det_q;
            diag.posed[a] = sol.posed;
            diag.gated[a] = gated[a];
            if (sol.posed && sol.valid && gated[a]) {
                g_latch(a) = sol.g_axis;
                g_latched[a] = true;
            }
            sols.push_back(sol);
        }

        const auto meas = fuse_axes(sols, gated, phi_end, f_z_now);
        // without a Z-axis solve yet, the window mean doubles as the gravity
        // reading along Z (the axis is unexcited whenever that happens)
        const double g_z =
            g_latched[2] ? g_latch.z() : grid.accel.row(2).mean();

        if (!initialized) {
            if (meas) {
                state.z = meas->z;
                state.z_dot = meas->z_dot;
                state.t = t_now;
                state.g = g_latch;
                state.mode = ObserverState::Mode::measured;
                initialized = true;
            }
        } else {
            if (meas) {
                const double a_z_start = grid.accel(2, last - 1);
                state = observer_step(state, dt, a_z_start, meas, g_z, gain);
            } else {
                const double f_z_mid = (grid.foc(2, last - 1) + f_z_now) / 2.0;
                state = dead_reckon(state, f_z_mid, dt);
            }
            state.g = g_latch;
        }

        if (initialized) {
            diag.mode = state.mode == ObserverState::Mode::measured ? 'm' : 'd';
            diag.z = state.z;
            diag.z_dot = state.z_dot;
            diag.g = g_latch;
            const Vec2 point = interp_linear(streams.fixation, t_now);
            // camera position relative to the (constant) fixated scene point
            result.trajectory.points.push_back(
                t_now, -reconstruct_xyz(state, point));
        }
        result.diagnostics.push_back(diag);
    }
    return result;
}

EstimateResult run_estimate_on_dataset(const std::filesystem::path& dataset_dir,
                                       const RunConfig& cfg) {
    DatasetPaths paths{dataset_dir};
    SensorData sensors;
    sensors.intrinsics = read_intrinsics(paths.intrinsics());
    sensors.gyro = read_imu_csv(paths.gyro());
    sensors.accel = read_imu_csv(paths.accel());

    if (cfg.oracle_foc) {
        // frames are bypassed entirely; the dataset may omit them
        struct NullFrames final : FrameSource {
            std::size_t count() const override { return 0; }
            Timestamp time(std::size_t) const override { return {}; }
            Image frame(std::size_t) const override { return {}; }
        } no_frames;
        const TimedSeries<Vec3> oracle = read_foc_csv(paths.oracle_foc());
        return run_estimate(no_frames, sensors, cfg, &oracle);
    }
    DatasetFrameSource frames(dataset_dir);
    return run_estimate(frames, sensors, cfg);
}

void write_diagnostics_csv(const std::filesystem::path& path,
                           const std::vector<WindowDiagnostics>& rows) {
    std::ofstream out(path.string() + ".tmp", std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << "t_ns,mode,z,z_dot,detq_x,detq_y,detq_z,posed_x,posed_y,posed_z,"
           "gated_x,gated_y,gated_z,gx,gy,gz\n";
    char buf[64];
    auto fmt = [&buf](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    for (const auto& r : rows) {
        out << r.t.ns << ',' << r.mode << ',' << fmt(r.z) << ',' << fmt(r.z_dot);
        for (double d : r.det_q) out << ',' << fmt(d);
        for (bool b : r.posed) out << ',' << (b ? 1 : 0);
        for (bool b : r.gated) out << ',' << (b ? 1 : 0);
        for (int a = 0; a < 3; ++a) out << ',' << fmt(r.g(a));
        out << '\n';
    }
    out.close();
    if (!out) throw std::runtime_error("write failed: " + path.string());
    std::filesystem::rename(path.string() + ".tmp", path);
}

}  // namespace tauc
