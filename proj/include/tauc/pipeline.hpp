#pragma once

#include "tauc/image.hpp"
#include "tauc/io.hpp"
#include "tauc/simulator.hpp"
#include "tauc/types.hpp"

#include <filesystem>
#include <memory>
#include <vector>

namespace tauc {

/// Full pipeline configuration. Defaults mirror the reference parameter set:
/// 2 s window, 100 Hz fusion, 2 m/s^2 gate, L = diag(2, 20), 100 px patch
/// subsampled to 4000 pixels.
struct RunConfig {
    double window_s = 2.0;
    double fusion_hz = 100.0;
    double gate_threshold = 2.0;  // m/s^2
    double observer_l1 = 2.0;
    double observer_l2 = 20.0;
    double patch_px = 100.0;
    int subsample = 4000;
    double decimate_hz = 0;  // tracker output rate; 0 keeps the frame rate
    double detq_min = 1e-8;  // scale-relative posedness threshold
    // Flow-ratio guard. The recovery divides by a3 and a6; with a tracked
    // (noisy) warp the threshold has to sit at the differentiation noise
    // floor, well above the 1e-8 that suffices for exact flow fields.
    double ratio_eps = 0.02;
    double z_min = 0.05;  // m
    std::uint64_t seed = 1;
    bool oracle_foc = false;
    bool estimate_gyro_bias = false;
    double bias_window_s = 0.5;
    bool median_filter = false;     // median-of-3 on the affine flow
    bool prefilter = true;          // binomial blur ahead of the tracker
    double tracker_det_min = 1e-6;
};

/// Apply `key = value` lines from a config file on top of the defaults.
RunConfig load_run_config(const std::filesystem::path& path,
                          RunConfig base = {});

/// Sequential frame access; datasets load lazily, tests render on demand.
class FrameSource {
  public:
    virtual ~FrameSource() = default;
    virtual std::size_t count() const = 0;
    virtual Timestamp time(std::size_t i) const = 0;
    virtual Image frame(std::size_t i) const = 0;
};

class DatasetFrameSource final : public FrameSource {
  public:
    explicit DatasetFrameSource(const std::filesystem::path& dataset_dir);
    std::size_t count() const override { return index_.times.size(); }
    Timestamp time(std::size_t i) const override { return index_.times[i]; }
    Image frame(std::size_t i) const override;

  private:
    std::filesystem::path dir_;
    FrameIndex index_;
};

class SimulatorFrameSource final : public FrameSource {
  public:
    explicit SimulatorFrameSource(const PlanarSimulator& sim)
        : sim_(sim), times_(sim.frame_times()) {}
    std::size_t count() const override { return times_.size(); }
    Timestamp time(std::size_t i) const override { return times_[i]; }
    Image frame(std::size_t i) const override {
        return sim_.render(times_[i].seconds());
    }

  private:
    const PlanarSimulator& sim_;
    std::vector<Timestamp> times_;
};

struct WindowDiagnostics {
    Timestamp t;
    double det_q[3] = {0, 0, 0};
    bool posed[3] = {false, false, false};
    bool gated[3] = {false, false, false};
    char mode = '-';  // 'm' measured, 'd' dead reckoning
    double z = 0;
    double z_dot = 0;
    Vec3 g = Vec3::Zero();
};

struct EstimateResult {
    Trajectory trajectory;  // estimated camera positions
    std::vector<WindowDiagnostics> diagnostics;
    TimedSeries<Vec3> foc;       // F stream fed to the solver
    TimedSeries<Vec2> fixation;  // calibrated fixation-point track
    double tracker_fps = 0;
    bool tracking_lost = false;
    Timestamp lost_at;
};

struct SensorData {
    CameraIntrinsics intrinsics;
    std::vector<ImuSample> gyro;
    std::vector<ImuSample> accel;
    Vec2 patch_center_px = Vec2::Zero();  // zero means principal point
};

/// De-rotation, patch tracking (or the oracle F bypass), sliding-window
/// solves and observer fusion, end to end.
EstimateResult run_estimate(FrameSource& frames, const SensorData& sensors,
                            const RunConfig& cfg,
                            const TimedSeries<Vec3>* oracle = nullptr);

/// Dataset-directory front end for run_estimate.
EstimateResult run_estimate_on_dataset(const std::filesystem::path& dataset_dir,
                                       const RunConfig& cfg);

void write_diagnostics_csv(const std::filesystem::path& path,
                           const std::vector<WindowDiagnostics>& rows);

}  // namespace tauc
