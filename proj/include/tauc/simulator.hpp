#pragma once

#include "tauc/affine.hpp"
#include "tauc/image.hpp"
#include "tauc/types.hpp"

#include <cstdint>
#include <vector>

namespace tauc {

/// One windowed sinusoidal acceleration burst along an axis:
/// a(t) = amp sin(2 pi freq (t - t0) + phase) for t in [t0, t1).
/// freq = 0 gives the constant burst amp * sin(phase).
struct AccelTerm {
    double t0 = 0, t1 = 0;  // s
    double amp = 0;         // m/s^2
    double freq_hz = 0;
    double phase = 0;       // rad
};

/// Piecewise-analytic scalar motion: position, velocity and acceleration all
/// have closed forms, so every oracle derived from them is exact.
struct AxisMotion {
    double pos0 = 0;  // m
    double vel0 = 0;  // m/s
    std::vector<AccelTerm> terms;

    double accel(double t) const;
    double vel(double t) const;
    double pos(double t) const;
};

/// Fixed-axis rotation with a closed-form angle profile:
/// theta(t) = rate0 t + sum amp_j sin(2 pi f_j t + phase_j).
struct AngleTerm {
    double amp = 0;  // rad
    double freq_hz = 0;
    double phase = 0;
};

struct RotationSpec {
    Vec3 axis = Vec3::UnitZ();
    double rate0 = 0;  // rad/s drift
    std::vector<AngleTerm> terms;

    double angle(double t) const;
    double rate(double t) const;
};

struct TextureSpec {
    enum class Kind { value_noise, checker };
    Kind kind = Kind::value_noise;
    std::uint64_t seed = 1;
    // the finest octave stays a few pixels wide at desk-scale depths; going
    // finer aliases under bilinear lookup and shows up as tracker jitter
    int octaves = 3;
    double contrast = 0.9;    // amplitude of the intensity swing around 0.5
    double scale = 8.0;       // base lattice cells per meter
    double checker_m = 0.10;  // checkerboard square size
};

/// Plane 1/Z = n^T [x y 1] in the start-of-service camera frame, with the
/// procedural texture painted on it.
struct PlanarScene {
    Vec3 n = Vec3(0, 0, 0.5);  // fronto-parallel at 2 m by default
    TextureSpec texture;
};

struct TrajectorySpec {
    AxisMotion axis[3];  // camera position per world axis
    RotationSpec rotation;
    double duration = 20.0;               // s
    Vec3 gravity = Vec3(0, -9.81, 0);     // accelerometer reading at rest
    double accel_noise = 0;               // m/s^2, white
    double gyro_noise = 0;                // rad/s, white
    Vec3 accel_bias = Vec3::Zero();       // m/s^2, sensor frame
    Vec3 gyro_bias = Vec3::Zero();        // rad/s, sensor frame
    double z_margin = 0.3;                // m, required depth clearance
    std::uint64_t seed = 1;
};

struct SampleRates {
    double frame_hz = 90.0;
    double gyro_hz = 400.0;
    double accel_hz = 250.0;
    double truth_hz = 200.0;
};

/// Analytic planar-scene simulator. Camera trajectory, plane geometry and the
/// induced image motion are all closed-form, which makes every derived
/// quantity (F, tau, warps, IMU specifics) an exact oracle. Frames are
/// rendered on demand by inverse-homography sampling of the plane texture.
class PlanarSimulator {
  public:
    PlanarSimulator(PlanarScene scene, TrajectorySpec spec, SampleRates rates,
                    CameraIntrinsics intrinsics, Vec2 patch_center_px);

    // camera kinematics in the fixed (start-of-service) frame
    Vec3 position(double t) const;
    Vec3 velocity(double t) const;
    Vec3 acceleration(double t) const;
    Quat orientation(double t) const;  // camera-to-fixed
    Vec3 body_rate(double t) const;

    // fixation-point oracles
    double depth(double t) const;
    Vec3 foc(double t) const;            // F = Xdot / Z
    double tau(double t) const;          // -1 / F_z
    Vec2 fixation_point(double t) const; // calibrated image location
    Vec3 fixation_scene_point() const { return fix_point_; }

    /// Plane-induced homography, frame-0 calibrated -> de-rotated calibrated.
    Mat3 homography(double t) const;
    /// Affinization of the homography about the fixation point; exact for
    /// fronto-parallel scenes.
    AffineWarp warp(double t) const;
    /// Exact affine flow of the de-rotated patch motion at time t.
    AffineFlow flow(double t) const;

    /// Noise-free fixed-frame accelerometer signal -Xdd + g.
    Vec3 accel_fixed_true(double t) const;

    // sensor streams (deterministic seeded noise)
    std::vector<Timestamp> frame_times() const;
    std::vector<ImuSample> gyro_stream() const;
    std::vector<ImuSample> accel_stream() const;
    Trajectory truth_trajectory() const;

    /// Render the raw camera view at time t (4x supersampled then
    /// box-downsampled). Pixels whose rays miss the plane are mid-gray.
    Image render(double t) const;

    const CameraIntrinsics& intrinsics() const { return intrinsics_; }
    const PlanarScene& scene() const { return scene_; }
    const TrajectorySpec& spec() const { return spec_; }
    const SampleRates& rates() const { return rates_; }
    Vec2 patch_center_px() const { return patch_center_px_; }
    double texture_intensity(const Vec2& plane_uv) const;

  private:
    void validate() const;
    Vec3 plane_point(const Vec3& origin, const Vec3& dir) const;

    PlanarScene scene_;
    TrajectorySpec spec_;
    SampleRates rates_;
    CameraIntrinsics intrinsics_;
    Vec2 patch_center_px_;
    Vec3 fix_point_;   // fixated scene point, fixed frame
    Vec3 plane_u_, plane_v_;  // in-plane texture basis
};

}  // namespace tauc
