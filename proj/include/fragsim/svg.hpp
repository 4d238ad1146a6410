#pragma once

#include <string>
#include <vector>

namespace fragsim {

struct SvgSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

// Minimal static line plot; a thin optional layer over the CSV outputs.
std::string svg_line_plot(const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::vector<SvgSeries>& series);

} // namespace fragsim
