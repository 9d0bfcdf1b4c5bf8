#include "tauc/affine.hpp"

#include <cmath>

namespace tauc {

AffineFlow warp_to_flow(const AffineWarp& current, const AffineWarp& prev,
                        double T) {
    if (T <= 0) throw std::invalid_argument("warp_to_flow: baseline T must be > 0");
    if (std::abs(current.det()) < 1e-12)
        throw std::runtime_error("warp_to_flow: singular warp");
    const Mat3 diff = current.homogeneous() - prev.homogeneous();
    const Mat3 a3 = diff * current.homogeneous().inverse() / T;
    AffineFlow out;
    out.a = a3.topRows<2>();
    out.t = current.t;
    return out;
}

FocSample flow_to_foc(const AffineFlow& flow, const Vec2& point,
                      const FocOptions& opts) {
    const double a1 = flow.a(0, 0), a2 = flow.a(0, 1), a3 = flow.a(0, 2);
    const double a4 = flow.a(1, 0), a5 = flow.a(1, 1), a6 = flow.a(1, 2);

    double eta, m11, m22, r1, r2;
    if (std::max(std::abs(a3), std::abs(a6)) < opts.ratio_eps) {
        // Axial / fronto-parallel motion: both translational terms vanish and
        // the two eta forms are 0/0. Consistency requires a1 = a5 = -Zdot n_z.
        if (std::abs(a1 - a5) > opts.ratio_eps)
            throw std::runtime_error("flow_to_foc: degenerate flow, a1 != a5");
        eta = -(a1 + a5) / 2.0;
        m11 = 0.0;
        m22 = 0.0;
        r1 = 0.0;
        r2 = 0.0;
    } else {
        // eta = Zdot n_z from whichever form has the better-conditioned ratio.
        eta = std::abs(a6) >= std::abs(a3) ? a4 * a3 / a6 - a1
                                           : a2 * a6 / a3 - a5;
        // a1 + eta == a4 a3 / a6 and a5 + eta == a2 a6 / a3 identically.
        m11 = a1 + eta;
        m22 = a5 + eta;
        r1 = std::abs(a6) >= opts.ratio_eps ? a4 / a6 : m11 / a3;  // n_x / n_z
        r2 = std::abs(a3) >= opts.ratio_eps ? a2 / a3 : m22 / a6;  // n_y / n_z
    }

    const double x = point.x(), y = point.y();
    FocSample out;
    out.t = flow.t;
    out.point = point;
    out.F = Vec3(m11 * x + a2 * y + a3,
                 a4 * x + m22 * y + a6,
                 eta * (r1 * x + r2 * y + 1.0));
    if (!out.F.allFinite())
        throw std::runtime_error("flow_to_foc: non-finite frequency-of-contact");
    return out;
}

}  // namespace tauc
