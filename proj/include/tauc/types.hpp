#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tauc {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

/// Integer nanoseconds since sequence start. Streams over 40 s stay exact;
/// conversion to floating seconds happens only where integrals are evaluated.
struct Timestamp {
    std::int64_t ns = 0;

    static Timestamp from_seconds(double s) {
        return Timestamp{static_cast<std::int64_t>(std::llround(s * 1e9))};
    }
    double seconds() const { return static_cast<double>(ns) * 1e-9; }

    friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

inline Timestamp operator+(Timestamp a, Timestamp b) { return {a.ns + b.ns}; }
inline Timestamp operator-(Timestamp a, Timestamp b) { return {a.ns - b.ns}; }

/// Pinhole intrinsics. Pixels exist only at I/O boundaries; everything
/// downstream works in calibrated coordinates (unit focal length).
struct CameraIntrinsics {
    double fx = 0, fy = 0;  // focal lengths (px)
    double cx = 0, cy = 0;  // principal point (px)
    int width = 0, height = 0;

    bool valid() const {
        return fx > 0 && fy > 0 && width > 0 && height > 0 && cx > 0 &&
               cx < width && cy > 0 && cy < height;
    }
};

inline Vec2 to_calibrated(const Vec2& px, const CameraIntrinsics& k) {
    return {(px.x() - k.cx) / k.fx, (px.y() - k.cy) / k.fy};
}

inline Vec2 to_pixel(const Vec2& xy, const CameraIntrinsics& k) {
    return {xy.x() * k.fx + k.cx, xy.y() * k.fy + k.cy};
}

/// Raw IMU reading in the sensor frame. The accelerometer reports -Xdd + g
/// for a scene point X expressed in camera coordinates.
struct ImuSample {
    Timestamp t;
    Vec3 gyro = Vec3::Zero();   // rad/s
    Vec3 accel = Vec3::Zero();  // m/s^2
};

/// Frequency-of-contact measurement: F = Xdot / Z of the fixated scene point,
/// in the fixed start-of-service orientation frame. point is the current
/// calibrated image location of that scene point.
struct FocSample {
    Timestamp t;
    Vec3 F = Vec3::Zero();  // 1/s
    Vec2 point = Vec2::Zero();
};

/// Timestamped sample stream. Construction and append enforce strictly
/// increasing timestamps.
template <typename T>
class TimedSeries {
  public:
    TimedSeries() = default;
    TimedSeries(std::vector<Timestamp> times, std::vector<T> values)
        : t_(std::move(times)), v_(std::move(values)) {
        if (t_.size() != v_.size())
            throw std::invalid_argument("TimedSeries: size mismatch");
        for (std::size_t i = 1; i < t_.size(); ++i)
            if (t_[i].ns <= t_[i - 1].ns)
                throw std::invalid_argument("TimedSeries: non-monotone timestamps");
    }

    void push_back(Timestamp t, T value) {
        if (!t_.empty() && t.ns <= t_.back().ns)
            throw std::invalid_argument("TimedSeries: non-monotone timestamps");
        t_.push_back(t);
        v_.push_back(std::move(value));
    }

    std::size_t size() const { return t_.size(); }
    bool empty() const { return t_.empty(); }
    Timestamp time(std::size_t i) const { return t_[i]; }
    const T& value(std::size_t i) const { return v_[i]; }
    T& value(std::size_t i) { return v_[i]; }
    Timestamp front_time() const { return t_.front(); }
    Timestamp back_time() const { return t_.back(); }
    const std::vector<Timestamp>& times() const { return t_; }
    const std::vector<T>& values() const { return v_; }

    /// Index of the last sample with time <= t. Requires t within range.
    std::size_t lower_index(Timestamp t) const {
        if (empty() || t < t_.front() || t > t_.back())
            throw std::out_of_range("TimedSeries: query outside stream span");
        auto it = std::upper_bound(t_.begin(), t_.end(), t);
        return static_cast<std::size_t>(it - t_.begin()) - 1;
    }

  private:
    std::vector<Timestamp> t_;
    std::vector<T> v_;
};

/// Componentwise linear interpolation; exact at sample times and for signals
/// affine in t. Out-of-span queries are a range error.
template <typename T>
T interp_linear(const TimedSeries<T>& s, Timestamp t) {
    const std::size_t i = s.lower_index(t);
    if (s.time(i).ns == t.ns || i + 1 == s.size()) return s.value(i);
    const double span = static_cast<double>(s.time(i + 1).ns - s.time(i).ns);
    const double a = static_cast<double>(t.ns - s.time(i).ns) / span;
    return s.value(i) * (1.0 - a) + s.value(i + 1) * a;
}

/// Timestamped 3D positions, either an estimate or ground truth.
struct Trajectory {
    TimedSeries<Vec3> points;  // meters
    std::string label;         // "estimate" | "ground_truth"
};

}  // namespace tauc
