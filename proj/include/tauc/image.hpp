#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tauc {

/// Grayscale image, row-major, intensities in [0, 1]. 8-bit quantization
/// happens only at PGM I/O boundaries.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<float> data;

    Image() = default;
    Image(int w, int h, float fill = 0.f)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

    float& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    float at(int x, int y) const {
        return data[static_cast<std::size_t>(y) * width + x];
    }

    /// True when (x, y) has a full bilinear support inside the image.
    bool interpolable(double x, double y) const {
        return x >= 0.0 && y >= 0.0 && x <= width - 1.000001 &&
               y <= height - 1.000001;
    }

    float sample_bilinear(double x, double y) const {
        const int x0 = static_cast<int>(x);
        const int y0 = static_cast<int>(y);
        const float ax = static_cast<float>(x - x0);
        const float ay = static_cast<float>(y - y0);
        const float* row0 = &data[static_cast<std::size_t>(y0) * width + x0];
        const float* row1 = row0 + width;
        const float top = row0[0] + ax * (row0[1] - row0[0]);
        const float bot = row1[0] + ax * (row1[1] - row1[0]);
        return top + ay * (bot - top);
    }

};

/// Separable 3-tap binomial blur ([1 2 1]/4 in each direction). Tames
/// quantization and interpolation noise ahead of gradient-based tracking.
Image binomial_blur3(const Image& img);

/// Same blur applied in place, restricted to a pixel rectangle (clamped to
/// the image). Saves the full-frame pass and the copy when only a patch
/// neighborhood is ever sampled.
void binomial_blur3_region(Image& img, int x0, int y0, int x1, int y1);

/// Binary (P5) 8-bit PGM I/O.
Image load_pgm(const std::string& path);
void save_pgm(const Image& img, const std::string& path);

}  // namespace tauc
