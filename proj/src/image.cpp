#include "tauc/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace tauc {

Image binomial_blur3(const Image& img) {
    if (img.width < 3 || img.height < 3) return img;
    Image tmp(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        const float* src = &img.data[static_cast<std::size_t>(y) * img.width];
        float* dst = &tmp.data[static_cast<std::size_t>(y) * img.width];
        dst[0] = src[0];
        for (int x = 1; x < img.width - 1; ++x)
            dst[x] = 0.25f * (src[x - 1] + 2.f * src[x] + src[x + 1]);
        dst[img.width - 1] = src[img.width - 1];
    }
    Image out(img.width, img.height);
    for (int x = 0; x < img.width; ++x) out.at(x, 0) = tmp.at(x, 0);
    for (int y = 1; y < img.height - 1; ++y)
        for (int x = 0; x < img.width; ++x)
            out.at(x, y) = 0.25f * (tmp.at(x, y - 1) + 2.f * tmp.at(x, y) +
                                    tmp.at(x, y + 1));
    for (int x = 0; x < img.width; ++x)
        out.at(x, img.height - 1) = tmp.at(x, img.height - 1);
    return out;
}

void binomial_blur3_region(Image& img, int x0, int y0, int x1, int y1) {
    x0 = std::max(x0, 0);
    y0 = std::max(y0, 0);
    x1 = std::min(x1, img.width - 1);
    y1 = std::min(y1, img.height - 1);
    if (x1 - x0 < 2 || y1 - y0 < 2) return;

    const int rw = x1 - x0 + 1, rh = y1 - y0 + 1;
    std::vector<float> buf(static_cast<std::size_t>(rw) * rh);

    // horizontal pass into the rectangle buffer
    for (int y = y0; y <= y1; ++y) {
        const float* src = &img.data[static_cast<std::size_t>(y) * img.width];
        float* dst = &buf[static_cast<std::size_t>(y - y0) * rw];
        for (int x = x0; x <= x1; ++x) {
            dst[x - x0] = (x >= 1 && x <= img.width - 2)
                              ? 0.25f * (src[x - 1] + 2.f * src[x] + src[x + 1])
                              : src[x];
        }
    }

    // vertical pass back into the image (interior rows of the rectangle)
    const int y_lo = std::max(y0 + 1, 1);
    const int y_hi = std::min(y1 - 1, img.height - 2);
    for (int y = y_lo; y <= y_hi; ++y) {
        const float* up = &buf[static_cast<std::size_t>(y - 1 - y0) * rw];
        const float* mid = up + rw;
        const float* dn = mid + rw;
        float* dst = &img.data[static_cast<std::size_t>(y) * img.width + x0];
        for (int x = 0; x < rw; ++x)
            dst[x] = 0.25f * (up[x] + 2.f * mid[x] + dn[x]);
    }
}

Image load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_pgm: cannot open " + path);

    std::string magic;
    in >> magic;
    if (magic != "P5") throw std::runtime_error("load_pgm: not a binary PGM: " + path);

    auto next_int = [&in, &path]() {
        // skip whitespace and '#' comment lines
        int c = in.get();
        while (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '#') {
            if (c == '#')
                while (c != '\n' && c != EOF) c = in.get();
            c = in.get();
        }
        int value = 0;
        bool any = false;
        while (c >= '0' && c <= '9') {
            value = value * 10 + (c - '0');
            any = true;
            c = in.get();
        }
        if (!any) throw std::runtime_error("load_pgm: malformed header: " + path);
        return value;
    };

    const int w = next_int();
    const int h = next_int();
    const int maxval = next_int();
    if (w <= 0 || h <= 0 || maxval != 255)
        throw std::runtime_error("load_pgm: unsupported PGM: " + path);

    std::vector<std::uint8_t> raw(static_cast<std::size_t>(w) * h);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size()))
        throw std::runtime_error("load_pgm: truncated file: " + path);

    Image img(w, h);
    for (std::size_t i = 0; i < raw.size(); ++i)
        img.data[i] = static_cast<float>(raw[i]) / 255.f;
    return img;
}

void save_pgm(const Image& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("save_pgm: cannot open " + path);
    char header[64];
    const int n = std::snprintf(header, sizeof(header), "P5\n%d %d\n255\n",
                                img.width, img.height);
    out.write(header, n);
    std::vector<std::uint8_t> raw(img.data.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const float v = std::clamp(img.data[i], 0.f, 1.f);
        raw[i] = static_cast<std::uint8_t>(std::lround(v * 255.f));
    }
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size()));
    if (!out) throw std::runtime_error("save_pgm: write failed: " + path);
}

}  // namespace tauc
