#include "tauc/derotation.hpp"

#include "tauc/so3.hpp"

namespace tauc {

Quat OrientationTrack::at(Timestamp t) const {
    const std::size_t i = samples.lower_index(t);
    if (samples.time(i).ns == t.ns || i + 1 == samples.size())
        return samples.value(i);
    const double span =
        static_cast<double>(samples.time(i + 1).ns - samples.time(i).ns);
    const double a = static_cast<double>(t.ns - samples.time(i).ns) / span;
    return samples.value(i).slerp(a, samples.value(i + 1));
}

OrientationTrack integrate_gyro(const std::vector<ImuSample>& gyro,
                                const GyroIntegrationOptions& opts) {
    if (gyro.size() < 2)
        throw std::invalid_argument("integrate_gyro: need at least 2 samples");

    Vec3 bias = Vec3::Zero();
    if (opts.estimate_bias) {
        const Timestamp limit =
            gyro.front().t + Timestamp::from_seconds(opts.bias_window_s);
        Vec3 sum = Vec3::Zero();
        int n = 0;
        for (const auto& s : gyro) {
            if (s.t > limit) break;
            sum += s.gyro;
            ++n;
        }
        if (n > 0) bias = sum / n;
    }

    OrientationTrack track;
    Quat r = Quat::Identity();
    track.samples.push_back(gyro.front().t, r);
    for (std::size_t k = 1; k < gyro.size(); ++k) {
        const double dt = (gyro[k].t - gyro[k - 1].t).seconds();
        if (dt <= 0)
            throw std::invalid_argument("integrate_gyro: non-monotone timestamps");
        const Vec3 w_mid =
            0.5 * (gyro[k - 1].gyro + gyro[k].gyro) - bias;
        const Vec3 step = w_mid * dt;
        if (step.norm() > opts.max_rate * dt)
            throw std::runtime_error("integrate_gyro: rate exceeds sanity bound");
        r = r * so3_exp(step);
        r.normalize();
        track.samples.push_back(gyro[k].t, r);
    }
    return track;
}

TimedSeries<Vec3> derotate_accel(const std::vector<ImuSample>& accel,
                                 const OrientationTrack& track) {
    TimedSeries<Vec3> out;
    for (const auto& s : accel) out.push_back(s.t, track.at(s.t) * s.accel);
    return out;
}

Mat3 derotation_homography(const Quat& R) {
    return R.toRotationMatrix().transpose();
}

}  // namespace tauc
