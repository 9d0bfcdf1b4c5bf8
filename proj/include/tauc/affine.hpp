#pragma once

#include "tauc/types.hpp"

#include <array>

namespace tauc {

using Mat23 = Eigen::Matrix<double, 2, 3>;

/// 6-parameter affine homography W mapping template patch coordinates
/// (calibrated, frame 0) to current-frame de-rotated coordinates.
struct AffineWarp {
    Mat23 w = Mat23::Zero();
    Timestamp t;

    static AffineWarp identity(Timestamp t = {}) {
        AffineWarp out;
        out.w << 1, 0, 0, 0, 1, 0;
        out.t = t;
        return out;
    }

    Mat3 homogeneous() const {
        Mat3 h;
        h << w(0, 0), w(0, 1), w(0, 2), w(1, 0), w(1, 1), w(1, 2), 0, 0, 1;
        return h;
    }

    Vec2 apply(const Vec2& x) const { return w * Vec3(x.x(), x.y(), 1.0); }

    /// Determinant of the 2x2 linear part; collapses to 0 when the patch
    /// degenerates to a line or point.
    double det() const { return w(0, 0) * w(1, 1) - w(0, 1) * w(1, 0); }
};

/// Affine flow matrix A (bottom row implicitly zero): the optical flow of the
/// planar patch is u(x) = A [x y 1]^T.
struct AffineFlow {
    Mat23 a = Mat23::Zero();
    Timestamp t;
};

/// Finite-difference flow from two warps a baseline T apart:
/// A = (W_t - W_prev) W_t^{-1} / T. Degeneracy error when W_t is singular.
AffineFlow warp_to_flow(const AffineWarp& current, const AffineWarp& prev,
                        double T);

struct FocOptions {
    double ratio_eps = 1e-8;  // 1/s; below this a3, a6 count as vanished
};

/// Recover frequency-of-contact from affine flow at the fixation point.
/// Inverts the plane-induced flow parametrization; when both translational
/// coefficients vanish (pure axial motion) falls back to the
/// fronto-parallel form F_z = -(a1 + a5)/2 with the ratio terms zeroed.
FocSample flow_to_foc(const AffineFlow& flow, const Vec2& point,
                      const FocOptions& opts = {});

/// Optional median-of-3 temporal filter on flow coefficients; damps the
/// occasional finite-difference spike. Off by default in the pipeline.
class FlowMedianFilter {
  public:
    AffineFlow push(const AffineFlow& f) {
        history_[index_ % 3] = f;
        ++index_;
        if (index_ < 3) return f;
        AffineFlow out = f;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 3; ++c) {
                double v0 = history_[0].a(r, c);
                double v1 = history_[1].a(r, c);
                double v2 = history_[2].a(r, c);
                out.a(r, c) = std::max(std::min(v0, v1),
                                       std::min(std::max(v0, v1), v2));
            }
        return out;
    }

  private:
    std::array<AffineFlow, 3> history_{};
    std::size_t index_ = 0;
};

}  // namespace tauc
