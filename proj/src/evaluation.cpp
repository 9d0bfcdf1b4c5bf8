#include "tauc/evaluation.hpp"

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include <cmath>

namespace tauc {

AlignedPair align_rigid(const Trajectory& estimate, const Trajectory& truth,
                        const std::optional<TimeWindow>& window) {
    if (estimate.points.empty() || truth.points.empty())
        throw std::invalid_argument("align_rigid: empty trajectory");

    TimeWindow win;
    win.start = std::max(estimate.points.front_time(), truth.points.front_time());
    win.end = std::min(estimate.points.back_time(), truth.points.back_time());
    if (window) {
        win.start = std::max(win.start, window->start);
        win.end = std::min(win.end, window->end);
    }
    if (win.end.ns <= win.start.ns)
        throw std::invalid_argument("align_rigid: trajectories do not overlap");

    // associate by resampling the estimate onto the truth clock
    TimedSeries<Vec3> truth_win, est_win;
    for (std::size_t i = 0; i < truth.points.size(); ++i) {
        const Timestamp t = truth.points.time(i);
        if (t < win.start || t > win.end) continue;
        truth_win.push_back(t, truth.points.value(i));
        est_win.push_back(t, interp_linear(estimate.points, t));
    }
    const auto n = static_cast<Eigen::Index>(truth_win.size());
    if (n < 3) throw std::invalid_argument("align_rigid: fewer than 3 truth points");

    Eigen::Matrix3Xd src(3, n), dst(3, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        src.col(i) = est_win.value(static_cast<std::size_t>(i));
        dst.col(i) = truth_win.value(static_cast<std::size_t>(i));
    }

    // collinear truth leaves the rotation undetermined
    const Eigen::Matrix3Xd centered = dst.colwise() - dst.rowwise().mean();
    Eigen::JacobiSVD<Eigen::Matrix3Xd> svd(centered);
    if (svd.singularValues()(1) <= 1e-9 * svd.singularValues()(0))
        throw std::invalid_argument("align_rigid: degenerate (collinear) geometry");

    const Eigen::Matrix4d transform = Eigen::umeyama(src, dst, false);

    AlignedPair pair;
    pair.rotation = transform.topLeftCorner<3, 3>();
    pair.translation = transform.topRightCorner<3, 1>();
    pair.truth = std::move(truth_win);
    pair.window = win;
    for (std::size_t i = 0; i < est_win.size(); ++i)
        pair.aligned_estimate.push_back(
            est_win.time(i), pair.rotation * est_win.value(i) + pair.translation);
    return pair;
}

AteResult ate(const AlignedPair& pair) {
    if (pair.truth.empty()) throw std::invalid_argument("ate: empty window");
    AteResult out;
    double sum_sq = 0;
    for (std::size_t i = 0; i < pair.truth.size(); ++i) {
        const double err_m =
            (pair.aligned_estimate.value(i) - pair.truth.value(i)).norm();
        out.errors_cm.push_back(pair.truth.time(i), err_m * 100.0);
        sum_sq += err_m * err_m;
    }
    out.ate_cm = std::sqrt(sum_sq / static_cast<double>(pair.truth.size())) * 100.0;
    return out;
}

double path_length(const Trajectory& traj) {
    double len = 0;
    for (std::size_t i = 1; i < traj.points.size(); ++i)
        len += (traj.points.value(i) - traj.points.value(i - 1)).norm();
    return len;
}

}  // namespace tauc
