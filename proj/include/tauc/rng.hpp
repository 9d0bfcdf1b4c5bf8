#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <numbers>

namespace tauc {

/// splitmix64 step; the workhorse behind all procedural randomness so that
/// outputs are identical across platforms and standard libraries.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline double uniform01(std::uint64_t& state) {
    return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

/// Hash of a 2D lattice coordinate to [0, 1].
inline double lattice_hash(std::int64_t ix, std::int64_t iy, std::uint64_t seed) {
    std::uint64_t s = seed;
    s ^= static_cast<std::uint64_t>(ix) * 0xD1B54A32D192ED03ull;
    s ^= static_cast<std::uint64_t>(iy) * 0x8CB92BA72F3D8DD7ull;
    return uniform01(s);
}

/// Smoothstep-interpolated lattice value noise in [0, 1].
inline double value_noise(double x, double y, std::uint64_t seed) {
    const double fx = std::floor(x), fy = std::floor(y);
    const auto ix = static_cast<std::int64_t>(fx);
    const auto iy = static_cast<std::int64_t>(fy);
    double tx = x - fx, ty = y - fy;
    tx = tx * tx * (3.0 - 2.0 * tx);
    ty = ty * ty * (3.0 - 2.0 * ty);
    const double v00 = lattice_hash(ix, iy, seed);
    const double v10 = lattice_hash(ix + 1, iy, seed);
    const double v01 = lattice_hash(ix, iy + 1, seed);
    const double v11 = lattice_hash(ix + 1, iy + 1, seed);
    const double top = v00 + tx * (v10 - v00);
    const double bot = v01 + tx * (v11 - v01);
    return top + ty * (bot - top);
}

/// Deterministic standard-normal sampler (Box-Muller over splitmix64).
class NormalSampler {
  public:
    explicit NormalSampler(std::uint64_t seed) : state_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01(state_);
        while (u1 <= 0.0) u1 = uniform01(state_);
        const double u2 = uniform01(state_);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    Eigen::Vector3d vec3() {
        const double x = (*this)();
        const double y = (*this)();
        const double z = (*this)();
        return {x, y, z};
    }

  private:
    std::uint64_t state_;
    double spare_ = 0;
    bool have_spare_ = false;
};

}  // namespace tauc
