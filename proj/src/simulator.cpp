#include "tauc/simulator.hpp"

#include "tauc/rng.hpp"
#include "tauc/so3.hpp"

#include <cmath>
#include <numbers>

namespace tauc {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double AxisMotion::accel(double t) const {
    double a = 0;
    for (const auto& term : terms) {
        if (t < term.t0 || t >= term.t1) continue;
        a += term.freq_hz == 0.0
                 ? term.amp * std::sin(term.phase)
                 : term.amp * std::sin(kTwoPi * term.freq_hz * (t - term.t0) +
                                       term.phase);
    }
    return a;
}

double AxisMotion::vel(double t) const {
    double v = vel0;
    for (const auto& term : terms) {
        if (t <= term.t0) continue;
        const double s = std::min(t, term.t1) - term.t0;
        if (term.freq_hz == 0.0) {
            v += term.amp * std::sin(term.phase) * s;
        } else {
            const double w = kTwoPi * term.freq_hz;
            v += term.amp / w * (std::cos(term.phase) - std::cos(w * s + term.phase));
        }
    }
    return v;
}

double AxisMotion::pos(double t) const {
    double p = pos0 + vel0 * t;
    for (const auto& term : terms) {
        if (t <= term.t0) continue;
        const double s = std::min(t, term.t1) - term.t0;
        double p_term, v_end;
        if (term.freq_hz == 0.0) {
            const double a = term.amp * std::sin(term.phase);
            p_term = 0.5 * a * s * s;
            v_end = a * s;
        } else {
            const double w = kTwoPi * term.freq_hz;
            p_term = term.amp / w *
                     (s * std::cos(term.phase) -
                      (std::sin(w * s + term.phase) - std::sin(term.phase)) / w);
            v_end = term.amp / w * (std::cos(term.phase) - std::cos(w * s + term.phase));
        }
        p += p_term;
        if (t > term.t1) p += v_end * (t - term.t1);
    }
    return p;
}

double RotationSpec::angle(double t) const {
    double a = rate0 * t;
    for (const auto& term : terms)
        a += term.amp * std::sin(kTwoPi * term.freq_hz * t + term.phase);
    return a;
}

double RotationSpec::rate(double t) const {
    double r = rate0;
    for (const auto& term : terms)
        r += term.amp * kTwoPi * term.freq_hz *
             std::cos(kTwoPi * term.freq_hz * t + term.phase);
    return r;
}

PlanarSimulator::PlanarSimulator(PlanarScene scene, TrajectorySpec spec,
                                 SampleRates rates, CameraIntrinsics intrinsics,
                                 Vec2 patch_center_px)
    : scene_(std::move(scene)),
      spec_(std::move(spec)),
      rates_(rates),
      intrinsics_(intrinsics),
      patch_center_px_(patch_center_px) {
    if (!intrinsics_.valid())
        throw std::invalid_argument("PlanarSimulator: invalid intrinsics");
    if (spec_.duration <= 0)
        throw std::invalid_argument("PlanarSimulator: duration must be > 0");

    const Vec2 c = to_calibrated(patch_center_px_, intrinsics_);
    const Vec3 ray(c.x(), c.y(), 1.0);
    const double ndotr = scene_.n.dot(ray);
    if (ndotr <= 0)
        throw std::invalid_argument("PlanarSimulator: plane not in front of camera");
    fix_point_ = ray / ndotr;  // depth 1/(n^T x) along the fixation ray

    // orthonormal texture basis in the plane, anchored at the fixation point
    const Vec3 normal = scene_.n.normalized();
    Vec3 u = Vec3::UnitX() - Vec3::UnitX().dot(normal) * normal;
    if (u.norm() < 1e-6) u = Vec3::UnitY() - Vec3::UnitY().dot(normal) * normal;
    plane_u_ = u.normalized();
    plane_v_ = normal.cross(plane_u_);

    validate();
}

void PlanarSimulator::validate() const {
    // depth clearance, sampled densely
    const double dt = 1e-3;
    for (double t = 0; t <= spec_.duration + 1e-12; t += dt) {
        if (depth(t) < spec_.z_margin)
            throw std::runtime_error(
                "PlanarSimulator: depth fell below z_margin at t=" +
                std::to_string(t));
    }
    // the fixation point must stay inside the rendered frame at every frame
    // time; rotation moves its camera-frame pixel even when fixed-frame
    // coordinates do not change
    for (const Timestamp ts : frame_times()) {
        const double t = ts.seconds();
        const Vec2 fixed_pt = fixation_point(t);
        const Vec3 cam = orientation(t).conjugate() *
                         Vec3(fixed_pt.x(), fixed_pt.y(), 1.0);
        if (cam.z() <= 0)
            throw std::runtime_error(
                "PlanarSimulator: fixation point behind the camera at t=" +
                std::to_string(t));
        const Vec2 px =
            to_pixel(Vec2(cam.x() / cam.z(), cam.y() / cam.z()), intrinsics_);
        if (px.x() < 8 || px.y() < 8 || px.x() > intrinsics_.width - 9 ||
            px.y() > intrinsics_.height - 9)
            throw std::runtime_error(
                "PlanarSimulator: fixation point left the field of view at t=" +
                std::to_string(t));
    }
}

Vec3 PlanarSimulator::position(double t) const {
    return {spec_.axis[0].pos(t), spec_.axis[1].pos(t), spec_.axis[2].pos(t)};
}

Vec3 PlanarSimulator::velocity(double t) const {
    return {spec_.axis[0].vel(t), spec_.axis[1].vel(t), spec_.axis[2].vel(t)};
}

Vec3 PlanarSimulator::acceleration(double t) const {
    return {spec_.axis[0].accel(t), spec_.axis[1].accel(t),
            spec_.axis[2].accel(t)};
}

Quat PlanarSimulator::orientation(double t) const {
    // start-of-service convention: the camera frame at t = 0 is the fixed
    // frame, so the angle profile is referenced to its initial value
    const double angle = spec_.rotation.angle(t) - spec_.rotation.angle(0.0);
    return so3_exp<double>(spec_.rotation.axis.normalized() * angle);
}

Vec3 PlanarSimulator::body_rate(double t) const {
    // the rotation axis is invariant under its own rotation, so the body and
    // fixed-frame angular velocities coincide
    return spec_.rotation.axis.normalized() * spec_.rotation.rate(t);
}

double PlanarSimulator::depth(double t) const {
    return fix_point_.z() - position(t).z();
}

Vec3 PlanarSimulator::foc(double t) const {
    return -velocity(t) / depth(t);
}

double PlanarSimulator::tau(double t) const { return -1.0 / foc(t).z(); }

Vec2 PlanarSimulator::fixation_point(double t) const {
    const Vec3 rel = fix_point_ - position(t);
    return {rel.x() / rel.z(), rel.y() / rel.z()};
}

Mat3 PlanarSimulator::homography(double t) const {
    return Mat3::Identity() - position(t) * scene_.n.transpose();
}

AffineWarp PlanarSimulator::warp(double t) const {
    // first-order expansion of the homography about the frame-0 fixation
    // point; exact whenever the bottom homography row is constant
    const Mat3 h = homography(t);
    const Vec2 x0 = fixation_point(0.0);
    const Vec3 x0h(x0.x(), x0.y(), 1.0);
    const Vec3 num_x = h.row(0), num_y = h.row(1), den = h.row(2);
    const double d = den.dot(x0h);
    const double px = num_x.dot(x0h) / d;
    const double py = num_y.dot(x0h) / d;

    Eigen::Matrix2d jac;
    jac << (num_x.x() - px * den.x()) / d, (num_x.y() - px * den.y()) / d,
        (num_y.x() - py * den.x()) / d, (num_y.y() - py * den.y()) / d;

    AffineWarp w;
    w.t = Timestamp::from_seconds(t);
    w.w.leftCols<2>() = jac;
    w.w.col(2) = Vec2(px, py) - jac * x0;
    return w;
}

AffineFlow PlanarSimulator::flow(double t) const {
    // plane parameters relative to the current camera position
    const Vec3 n_t = scene_.n / (1.0 - scene_.n.dot(position(t)));
    const Vec3 v = -velocity(t);  // scene-point velocity in the fixed frame
    AffineFlow f;
    f.t = Timestamp::from_seconds(t);
    f.a << v.x() * n_t.x() - v.z() * n_t.z(), v.x() * n_t.y(), v.x() * n_t.z(),
        v.y() * n_t.x(), v.y() * n_t.y() - v.z() * n_t.z(), v.y() * n_t.z();
    return f;
}

Vec3 PlanarSimulator::accel_fixed_true(double t) const {
    return acceleration(t) + spec_.gravity;
}

std::vector<Timestamp> PlanarSimulator::frame_times() const {
    // frame_hz * duration frames on [0, duration); IMU streams run inclusive
    std::vector<Timestamp> out;
    const auto n = static_cast<std::size_t>(std::llround(spec_.duration * rates_.frame_hz));
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k)
        out.push_back(Timestamp::from_seconds(static_cast<double>(k) / rates_.frame_hz));
    return out;
}

std::vector<ImuSample> PlanarSimulator::gyro_stream() const {
    NormalSampler noise(spec_.seed ^ 0x6779746full);
    std::vector<ImuSample> out;
    const auto n = static_cast<std::size_t>(spec_.duration * rates_.gyro_hz) + 1;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / rates_.gyro_hz;
        ImuSample s;
        s.t = Timestamp::from_seconds(t);
        s.gyro = body_rate(t) + spec_.gyro_bias + spec_.gyro_noise * noise.vec3();
        out.push_back(s);
    }
    return out;
}

std::vector<ImuSample> PlanarSimulator::accel_stream() const {
    NormalSampler noise(spec_.seed ^ 0x616363656cull);
    std::vector<ImuSample> out;
    const auto n = static_cast<std::size_t>(spec_.duration * rates_.accel_hz) + 1;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / rates_.accel_hz;
        ImuSample s;
        s.t = Timestamp::from_seconds(t);
        const Quat r = orientation(t);
        s.accel = r.conjugate() * accel_fixed_true(t) + spec_.accel_bias +
                  spec_.accel_noise * noise.vec3();
        out.push_back(s);
    }
    return out;
}

Trajectory PlanarSimulator::truth_trajectory() const {
    Trajectory traj;
    traj.label = "ground_truth";
    const auto n = static_cast<std::size_t>(spec_.duration * rates_.truth_hz) + 1;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / rates_.truth_hz;
        traj.points.push_back(Timestamp::from_seconds(t), position(t));
    }
    return traj;
}

Vec3 PlanarSimulator::plane_point(const Vec3& origin, const Vec3& dir) const {
    const double denom = scene_.n.dot(dir);
    if (std::abs(denom) < 1e-12) return Vec3::Constant(std::nan(""));
    const double s = (1.0 - scene_.n.dot(origin)) / denom;
    if (s <= 0) return Vec3::Constant(std::nan(""));
    return origin + s * dir;
}

double PlanarSimulator::texture_intensity(const Vec2& uv) const {
    const TextureSpec& tex = scene_.texture;
    if (tex.kind == TextureSpec::Kind::checker) {
        const auto iu = static_cast<long long>(std::floor(uv.x() / tex.checker_m));
        const auto iv = static_cast<long long>(std::floor(uv.y() / tex.checker_m));
        const bool on = ((iu + iv) & 1) != 0;
        return static_cast<double>(on ? 0.5 + tex.contrast / 2 : 0.5 - tex.contrast / 2);
    }

    double value = 0, amp = 0.5, norm = 0;
    double freq = tex.scale;
    for (int o = 0; o < tex.octaves; ++o) {
        value += amp * value_noise(uv.x() * freq, uv.y() * freq,
                                   tex.seed + static_cast<std::uint64_t>(o));
        norm += amp;
        amp *= 0.5;
        freq *= 2.0;
    }
    // recenter to [-0.5, 0.5], apply contrast, shift to [0, 1]
    return std::clamp(0.5 + tex.contrast * (value / norm - 0.5), 0.0, 1.0);
}

Image PlanarSimulator::render(double t) const {
    const Vec3 c = position(t);
    const Mat3 r = orientation(t).toRotationMatrix();
    Image img(intrinsics_.width, intrinsics_.height);

    const double s_num = 1.0 - scene_.n.dot(c);
    // everything below is affine in the subsample coordinates; walk the rays
    // incrementally and keep the inner loop in scalars
    const Vec3 dir00 = r.col(2) - (intrinsics_.cx / intrinsics_.fx) * r.col(0) -
                       (intrinsics_.cy / intrinsics_.fy) * r.col(1);
    const Vec3 step_x = r.col(0) / intrinsics_.fx;
    const Vec3 step_y = r.col(1) / intrinsics_.fy;

    auto dotn = [this](const Vec3& v) { return scene_.n.dot(v); };
    const Vec3 rel_c = c - fix_point_;
    const double cu = rel_c.dot(plane_u_), cv = rel_c.dot(plane_v_);

    // 2x2 subpixel grid per output pixel, box-averaged
    for (int y = 0; y < img.height; ++y) {
        float* row = &img.data[static_cast<std::size_t>(y) * img.width];
        for (int sub = 0; sub < 2; ++sub) {
            const double sy = y + (sub == 0 ? -0.25 : 0.25);
            const Vec3 row_dir = dir00 + sy * step_y;
            // scalar ray state, advanced by half-pixel steps in x
            double dn = dotn(row_dir) + dotn(step_x) * -0.25;
            double du = row_dir.dot(plane_u_) + step_x.dot(plane_u_) * -0.25;
            double dv = row_dir.dot(plane_v_) + step_x.dot(plane_v_) * -0.25;
            const double step_dn = dotn(step_x) * 0.5;
            const double step_du = step_x.dot(plane_u_) * 0.5;
            const double step_dv = step_x.dot(plane_v_) * 0.5;
            for (int x = 0; x < img.width; ++x) {
                for (int k = 0; k < 2; ++k) {
                    double value = 0.5;
                    if (std::abs(dn) >= 1e-12) {
                        const double s = s_num / dn;
                        if (s > 0)
                            value = texture_intensity(
                                Vec2(cu + s * du, cv + s * dv));
                    }
                    row[x] += static_cast<float>(value * 0.25);
                    dn += step_dn;
                    du += step_du;
                    dv += step_dv;
                }
            }
        }
    }
    return img;
}

}  // namespace tauc
