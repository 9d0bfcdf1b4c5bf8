#pragma once

#include "tauc/affine.hpp"
#include "tauc/image.hpp"
#include "tauc/types.hpp"

#include <Eigen/Cholesky>

#include <cstdint>

namespace tauc {

/// Terminal tracking failure: the patch collapsed, diverged or left the
/// frame. The pipeline halts and reports; there is no re-initialization.
class tracking_lost_error : public std::runtime_error {
  public:
    tracking_lost_error(const std::string& what, Timestamp t)
        : std::runtime_error(what), t(t) {}
    Timestamp t;
};

struct PatchTemplateOptions {
    double patch_px = 100.0;  // square patch side, pixels
    int subsample = 4000;     // template pixels kept
    std::uint64_t seed = 1;   // subsampling shuffle seed
};

/// Reference patch from frame 0: intensities, gradients and the precomputed
/// inverse-compositional normal equations over the subsampled pixel set.
/// Coordinates are calibrated; pixel geometry never leaves this builder.
struct PatchTemplate {
    Eigen::Matrix2Xd points;             // calibrated locations, frame 0
    Eigen::VectorXd values;              // intensities [0, 1]
    Eigen::Matrix<double, 6, Eigen::Dynamic> steepest;  // per-pixel 6-vectors
    Eigen::LDLT<Eigen::Matrix<double, 6, 6>> hessian;
    Vec2 center;  // calibrated patch center (the fixation point at t = 0)
};

PatchTemplate build_template(const Image& frame0, const CameraIntrinsics& k,
                             const Vec2& center_px,
                             const PatchTemplateOptions& opts = {});

struct TrackOptions {
    int max_iters = 20;
    double update_tol = 1e-4;        // warp update norm convergence
    double det_min = 1e-6;           // warp collapse threshold
    double min_valid_fraction = 0.5; // template pixels that must stay in frame
};

struct TrackDiagnostics {
    int iterations = 0;
    double residual_rms = 0;
    double update_norm = 0;
};

/// One inverse-compositional Lucas-Kanade solve against frame taken under
/// camera-to-fixed rotation R; frame lookups run through the de-rotation
/// homography so the warp lives on fixed-orientation coordinates. Warm
/// started from prev.
AffineWarp track_frame(const PatchTemplate& tpl, const Image& frame,
                       const CameraIntrinsics& k, const Quat& R,
                       const AffineWarp& prev, Timestamp t,
                       const TrackOptions& opts = {},
                       TrackDiagnostics* diag = nullptr);

}  // namespace tauc
