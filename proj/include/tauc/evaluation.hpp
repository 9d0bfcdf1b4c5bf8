#pragma once

#include "tauc/types.hpp"

#include <optional>

namespace tauc {

struct TimeWindow {
    Timestamp start;
    Timestamp end;
};

/// Estimate rigidly aligned to ground truth and resampled onto the truth
/// clock over the evaluation window.
struct AlignedPair {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();
    TimedSeries<Vec3> aligned_estimate;
    TimedSeries<Vec3> truth;
    TimeWindow window;
};

/// Least-squares rigid (rotation + translation, unit scale) alignment of the
/// estimate onto ground truth. The estimate is linearly resampled at truth
/// timestamps; the window defaults to the overlap of both streams.
AlignedPair align_rigid(const Trajectory& estimate, const Trajectory& truth,
                        const std::optional<TimeWindow>& window = std::nullopt);

struct AteResult {
    double ate_cm = 0;
    TimedSeries<double> errors_cm;  // per-sample l2 error series
};

/// Root-mean-square l2 position error over the ground-truth samples, in cm.
AteResult ate(const AlignedPair& pair);

/// Polyline length of a trajectory, meters.
double path_length(const Trajectory& traj);

}  // namespace tauc
