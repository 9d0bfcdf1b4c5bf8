#include "tauc/tracker.hpp"

#include "tauc/derotation.hpp"
#include "tauc/rng.hpp"

#include <cmath>
#include <numeric>

namespace tauc {

PatchTemplate build_template(const Image& frame0, const CameraIntrinsics& k,
                             const Vec2& center_px,
                             const PatchTemplateOptions& opts) {
    if (opts.subsample < 6)
        throw std::invalid_argument("build_template: need >= 6 template pixels");

    const int half = static_cast<int>(opts.patch_px / 2.0);
    const int u0 = static_cast<int>(std::lround(center_px.x())) - half;
    const int v0 = static_cast<int>(std::lround(center_px.y())) - half;
    const int side = static_cast<int>(opts.patch_px);
    if (u0 < 1 || v0 < 1 || u0 + side >= frame0.width - 1 ||
        v0 + side >= frame0.height - 1)
        throw std::invalid_argument("build_template: patch outside frame 0");

    // deterministic subsample of the patch grid (partial Fisher-Yates)
    std::vector<std::int32_t> order(static_cast<std::size_t>(side) * side);
    std::iota(order.begin(), order.end(), 0);
    std::uint64_t rng_state = opts.seed;
    const std::size_t count =
        std::min<std::size_t>(order.size(), static_cast<std::size_t>(opts.subsample));
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j =
            i + static_cast<std::size_t>(uniform01(rng_state) *
                                         static_cast<double>(order.size() - i));
        std::swap(order[i], order[std::min(j, order.size() - 1)]);
    }

    PatchTemplate tpl;
    tpl.center = to_calibrated(center_px, k);
    tpl.points.resize(2, static_cast<Eigen::Index>(count));
    tpl.values.resize(static_cast<Eigen::Index>(count));
    tpl.steepest.resize(6, static_cast<Eigen::Index>(count));

    Eigen::Matrix<double, 6, 6> h = Eigen::Matrix<double, 6, 6>::Zero();
    for (std::size_t i = 0; i < count; ++i) {
        // jittered subpixel sampling; integer-grid templates share one
        // interpolation phase and wobble in common mode as the patch moves
        const double u = u0 + order[i] % side + uniform01(rng_state) - 0.5;
        const double v = v0 + order[i] / side + uniform01(rng_state) - 0.5;
        const Vec2 cal = to_calibrated(Vec2(u, v), k);
        // template gradient in calibrated units (chain rule through K)
        const double gx = (frame0.sample_bilinear(u + 0.5, v) -
                           frame0.sample_bilinear(u - 0.5, v)) *
                          k.fx;
        const double gy = (frame0.sample_bilinear(u, v + 0.5) -
                           frame0.sample_bilinear(u, v - 0.5)) *
                          k.fy;

        const auto idx = static_cast<Eigen::Index>(i);
        tpl.points.col(idx) = cal;
        tpl.values(idx) = frame0.sample_bilinear(u, v);
        Eigen::Matrix<double, 6, 1> sd;
        sd << gx * cal.x(), gx * cal.y(), gx, gy * cal.x(), gy * cal.y(), gy;
        tpl.steepest.col(idx) = sd;
        h.noalias() += sd * sd.transpose();
    }
    tpl.hessian.compute(h);
    if (tpl.hessian.info() != Eigen::Success || !h.allFinite())
        throw std::invalid_argument("build_template: degenerate template");
    return tpl;
}

namespace {

// W <- W o dW^{-1}, the inverse-compositional parameter update
Mat23 compose_inverse(const Mat23& w, const Eigen::Matrix<double, 6, 1>& p) {
    Mat3 dw;
    dw << 1.0 + p(0), p(1), p(2), p(3), 1.0 + p(4), p(5), 0, 0, 1;
    Mat3 w3;
    w3 << w(0, 0), w(0, 1), w(0, 2), w(1, 0), w(1, 1), w(1, 2), 0, 0, 1;
    return (w3 * dw.inverse()).topRows<2>();
}

struct Residual {
    double sum_sq = 0;
    Eigen::Index valid = 0;
    Eigen::Matrix<double, 6, 1> rhs = Eigen::Matrix<double, 6, 1>::Zero();
};

Residual evaluate(const PatchTemplate& tpl, const Image& frame,
                  const Mat3& lookup, const Mat23& w) {
    // full chain: template coords -> warp -> de-rotation -> pixels
    const Mat3 chain = [&] {
        Mat3 w3;
        w3 << w(0, 0), w(0, 1), w(0, 2), w(1, 0), w(1, 1), w(1, 2), 0, 0, 1;
        return (lookup * w3).eval();
    }();

    Residual res;
    for (Eigen::Index i = 0; i < tpl.points.cols(); ++i) {
        const Vec3 h = chain * Vec3(tpl.points(0, i), tpl.points(1, i), 1.0);
        const double u = h.x() / h.z();
        const double v = h.y() / h.z();
        if (h.z() <= 0 || !frame.interpolable(u, v)) continue;
        const double r = frame.sample_bilinear(u, v) - tpl.values(i);
        res.sum_sq += r * r;
        res.rhs.noalias() += tpl.steepest.col(i) * r;
        ++res.valid;
    }
    return res;
}

}  // namespace

AffineWarp track_frame(const PatchTemplate& tpl, const Image& frame,
                       const CameraIntrinsics& k, const Quat& R,
                       const AffineWarp& prev, Timestamp t,
                       const TrackOptions& opts, TrackDiagnostics* diag) {
    Mat3 k_h;
    k_h << k.fx, 0, k.cx, 0, k.fy, k.cy, 0, 0, 1;
    const Mat3 lookup = k_h * derotation_homography(R);

    Mat23 w = prev.w;
    Residual res = evaluate(tpl, frame, lookup, w);
    if (res.valid <
        static_cast<Eigen::Index>(opts.min_valid_fraction *
                                  static_cast<double>(tpl.points.cols())))
        throw tracking_lost_error("track_frame: patch left the frame", t);

    Mat23 best_w = w;
    double best_sq = res.sum_sq;
    int iters = 0, increases = 0;
    double update_norm = 0;

    for (; iters < opts.max_iters; ++iters) {
        const Eigen::Matrix<double, 6, 1> p = tpl.hessian.solve(res.rhs);
        update_norm = p.norm();

        // the final sub-tolerance step is still applied; it lands the warp
        // quadratically closer to the photometric minimum
        w = compose_inverse(w, p);
        if (std::abs(w(0, 0) * w(1, 1) - w(0, 1) * w(1, 0)) < opts.det_min)
            throw tracking_lost_error("track_frame: warp collapsed", t);

        res = evaluate(tpl, frame, lookup, w);
        if (res.valid <
            static_cast<Eigen::Index>(opts.min_valid_fraction *
                                      static_cast<double>(tpl.points.cols())))
            throw tracking_lost_error("track_frame: patch left the frame", t);
        if (res.sum_sq >= best_sq) {
            ++increases;
        } else {
            best_sq = res.sum_sq;
            best_w = w;
        }
        if (update_norm < opts.update_tol) {
            ++iters;
            break;
        }
    }

    if (increases == opts.max_iters)
        throw tracking_lost_error("track_frame: diverged, residual never improved", t);

    AffineWarp out;
    out.w = best_w;
    out.t = t;
    if (diag) {
        diag->iterations = iters;
        diag->update_norm = update_norm;
        diag->residual_rms =
            res.valid > 0 ? std::sqrt(best_sq / static_cast<double>(res.valid)) : 0.0;
    }
    return out;
}

}  // namespace tauc
