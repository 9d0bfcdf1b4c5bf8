#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace tauc {

struct PlotSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

/// Deterministic static line plot (fixed layout, fixed number formatting);
/// identical inputs produce byte-identical files.
void write_line_plot_svg(const std::filesystem::path& path,
                         const std::string& title, const std::string& x_label,
                         const std::string& y_label,
                         const std::vector<PlotSeries>& series);

}  // namespace tauc
