#pragma once

#include "tauc/types.hpp"

namespace tauc {

/// Orientation history R(t) from open-loop gyro integration, camera-to-fixed.
/// R(0) is the identity; the fixed frame is the camera orientation at start
/// of service.
struct OrientationTrack {
    TimedSeries<Quat> samples;

    /// Spherically interpolated orientation; range error outside the span.
    Quat at(Timestamp t) const;
    Timestamp front_time() const { return samples.front_time(); }
    Timestamp back_time() const { return samples.back_time(); }
};

struct GyroIntegrationOptions {
    bool estimate_bias = false;    // subtract mean over the initial window
    double bias_window_s = 0.5;    // assumed-stationary interval
    double max_rate = 10.0;        // rad/s sanity bound on per-step rotation
};

/// Integrate gyro samples into an orientation track with midpoint
/// (zero-order-hold average of adjacent samples) steps on SO(3).
OrientationTrack integrate_gyro(const std::vector<ImuSample>& gyro,
                                const GyroIntegrationOptions& opts = {});

/// Rotate accelerometer samples into the fixed orientation frame,
/// a_fixed(t) = R(t) a_sensor(t). Timestamps must lie within the track span.
TimedSeries<Vec3> derotate_accel(const std::vector<ImuSample>& accel,
                                 const OrientationTrack& track);

/// Lookup matrix used to de-rotate a frame on calibrated coordinates:
/// fixed-orientation homogeneous coordinates map through it to the rotated
/// camera for sampling (x_lookup ~ R^T x_fixed for camera-to-fixed R).
Mat3 derotation_homography(const Quat& R);

}  // namespace tauc
