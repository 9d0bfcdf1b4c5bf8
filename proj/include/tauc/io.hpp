#pragma once

#include "tauc/affine.hpp"
#include "tauc/simulator.hpp"
#include "tauc/types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace tauc {

// Dataset layout inside a directory:
//   gyro.csv, accel.csv       t_ns,gx,gy,gz,ax,ay,az
//   frames/ *.pgm             8-bit grayscale
//   frames.csv                t_ns,filename
//   intrinsics.txt            fx fy cx cy width height
//   groundtruth.csv           t_ns,x,y,z
//   oracle_foc.csv            t_ns,fx,fy,fz        (simulated data only)
//   oracle_warp.csv           t_ns,w1,...,w6       (simulated data only)
struct DatasetPaths {
    std::filesystem::path dir;

    std::filesystem::path gyro() const { return dir / "gyro.csv"; }
    std::filesystem::path accel() const { return dir / "accel.csv"; }
    std::filesystem::path frames_dir() const { return dir / "frames"; }
    std::filesystem::path frames_index() const { return dir / "frames.csv"; }
    std::filesystem::path intrinsics() const { return dir / "intrinsics.txt"; }
    std::filesystem::path groundtruth() const { return dir / "groundtruth.csv"; }
    std::filesystem::path oracle_foc() const { return dir / "oracle_foc.csv"; }
    std::filesystem::path oracle_warp() const { return dir / "oracle_warp.csv"; }
};

void write_imu_csv(const std::filesystem::path& path,
                   const std::vector<ImuSample>& samples);
std::vector<ImuSample> read_imu_csv(const std::filesystem::path& path);

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_trajectory_csv(const std::filesystem::path& path,
                               const std::string& label);

void write_foc_csv(const std::filesystem::path& path, const TimedSeries<Vec3>& foc);
TimedSeries<Vec3> read_foc_csv(const std::filesystem::path& path);

void write_warp_csv(const std::filesystem::path& path,
                    const std::vector<AffineWarp>& warps);
std::vector<AffineWarp> read_warp_csv(const std::filesystem::path& path);

void write_error_csv(const std::filesystem::path& path,
                     const TimedSeries<double>& errors_cm);
TimedSeries<double> read_error_csv(const std::filesystem::path& path);

void write_intrinsics(const std::filesystem::path& path, const CameraIntrinsics& k);
CameraIntrinsics read_intrinsics(const std::filesystem::path& path);

struct FrameIndex {
    std::vector<Timestamp> times;
    std::vector<std::string> files;  // relative to the dataset directory
};
void write_frame_index(const std::filesystem::path& path, const FrameIndex& index);
FrameIndex read_frame_index(const std::filesystem::path& path);

/// Scenario: everything the simulator needs for one sequence.
struct Scenario {
    PlanarScene scene;
    TrajectorySpec spec;
    SampleRates rates;
    CameraIntrinsics intrinsics;
    Vec2 patch_center_px = Vec2::Zero();  // zero means principal point
};

/// Parse a `key = value` scenario file.
Scenario load_scenario(const std::filesystem::path& path);

/// Compiled-in scenarios usable by name (approach-2m, excite-xz-20s, ...).
Scenario builtin_scenario(const std::string& name);
std::vector<std::string> builtin_scenario_names();

/// Render the full dataset (frames in parallel) plus oracle files to dir.
void write_dataset(const PlanarSimulator& sim, const std::filesystem::path& dir);

}  // namespace tauc
