#include "tauc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace tauc {

namespace {

constexpr int kWidth = 900, kHeight = 520;
constexpr int kLeft = 70, kRight = 860, kTop = 50, kBottom = 460;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

}  // namespace

void write_line_plot_svg(const std::filesystem::path& path,
                         const std::string& title, const std::string& x_label,
                         const std::string& y_label,
                         const std::vector<PlotSeries>& series) {
    if (series.empty())
        throw std::invalid_argument("write_line_plot_svg: no series");
    double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
    double y_min = x_min, y_max = -x_min;
    for (const auto& s : series) {
        if (s.x.empty() || s.x.size() != s.y.size())
            throw std::invalid_argument("write_line_plot_svg: empty or ragged series");
        for (double v : s.x) x_min = std::min(x_min, v), x_max = std::max(x_max, v);
        for (double v : s.y) y_min = std::min(y_min, v), y_max = std::max(y_max, v);
    }
    if (!(x_max >= x_min) || !(y_max >= y_min))
        throw std::invalid_argument("write_line_plot_svg: non-finite data");
    if (x_max == x_min) x_max = x_min + 1;
    if (y_max == y_min) y_max = y_min + 1;

    auto sx = [&](double v) {
        return kLeft + (v - x_min) / (x_max - x_min) * (kRight - kLeft);
    };
    auto sy = [&](double v) {
        return kBottom - (v - y_min) / (y_max - y_min) * (kBottom - kTop);
    };

    const std::filesystem::path tmp = path.string() + ".tmp";
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string());

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
        << "\" height=\"" << kHeight << "\">\n";
    out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"28\" font-size=\"16\" "
           "text-anchor=\"middle\" font-family=\"sans-serif\">"
        << title << "</text>\n";

    // axes and ticks
    out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\""
        << kRight - kLeft << "\" height=\"" << kBottom - kTop
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = x_min + (x_max - x_min) * i / 5.0;
        const double yv = y_min + (y_max - y_min) * i / 5.0;
        out << "<line x1=\"" << num(sx(xv)) << "\" y1=\"" << kBottom
            << "\" x2=\"" << num(sx(xv)) << "\" y2=\"" << kBottom + 5
            << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << num(sx(xv)) << "\" y=\"" << kBottom + 20
            << "\" font-size=\"11\" text-anchor=\"middle\" "
               "font-family=\"sans-serif\">"
            << tick_label(xv) << "</text>\n";
        out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << num(sy(yv))
            << "\" x2=\"" << kLeft << "\" y2=\"" << num(sy(yv))
            << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << kLeft - 8 << "\" y=\"" << num(sy(yv) + 4)
            << "\" font-size=\"11\" text-anchor=\"end\" "
               "font-family=\"sans-serif\">"
            << tick_label(yv) << "</text>\n";
    }
    out << "<text x=\"" << (kLeft + kRight) / 2 << "\" y=\"" << kHeight - 10
        << "\" font-size=\"13\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\">"
        << x_label << "</text>\n";
    out << "<text x=\"18\" y=\"" << (kTop + kBottom) / 2
        << "\" font-size=\"13\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" transform=\"rotate(-90 18 "
        << (kTop + kBottom) / 2 << ")\">" << y_label << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        out << "<polyline fill=\"none\" stroke=\""
            << kPalette[s % std::size(kPalette)] << "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < series[s].x.size(); ++i) {
            if (i) out << ' ';
            out << num(sx(series[s].x[i])) << ',' << num(sy(series[s].y[i]));
        }
        out << "\"/>\n";
    }

    // legend
    for (std::size_t s = 0; s < series.size(); ++s) {
        const int y = kTop + 16 + static_cast<int>(s) * 18;
        out << "<line x1=\"" << kLeft + 10 << "\" y1=\"" << y << "\" x2=\""
            << kLeft + 34 << "\" y2=\"" << y << "\" stroke=\""
            << kPalette[s % std::size(kPalette)] << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << kLeft + 40 << "\" y=\"" << y + 4
            << "\" font-size=\"12\" font-family=\"sans-serif\">" << series[s].name
            << "</text>\n";
    }
    out << "</svg>\n";
    out.close();
    if (!out) throw std::runtime_error("write failed: " + path.string());
    std::filesystem::rename(tmp, path);
}

}  // namespace tauc
