#include "fragsim/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fragsim {

namespace {

const char* kPalette[] = {"#1b6b6b", "#8fce7a", "#c0392b", "#2c3e50", "#8e44ad",
                          "#d35400", "#16a085", "#7f8c8d", "#c2185b", "#33691e"};

} // namespace

std::string svg_line_plot(const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::vector<SvgSeries>& series) {
    constexpr int width = 720;
    constexpr int height = 480;
    constexpr int ml = 70, mr = 160, mt = 40, mb = 50;

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const SvgSeries& s : series) {
        for (const auto& [x, y] : s.points) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    if (!std::isfinite(xmin)) {
        xmin = 0.0;
        xmax = 1.0;
        ymin = 0.0;
        ymax = 1.0;
    }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;

    const auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
    const auto py = [&](double y) {
        return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb);
    };

    std::ostringstream out;
    out.precision(6);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
        << title << "</text>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
        << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << height - mb << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n";
    out << "<text x=\"18\" y=\"" << (mt + height - mb) / 2
        << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 18 "
        << (mt + height - mb) / 2 << ")\">" << y_label << "</text>\n";

    for (int tick = 0; tick <= 4; ++tick) {
        const double xv = xmin + (xmax - xmin) * tick / 4.0;
        const double yv = ymin + (ymax - ymin) * tick / 4.0;
        out << "<text x=\"" << px(xv) << "\" y=\"" << height - mb + 16
            << "\" text-anchor=\"middle\" font-size=\"10\">" << xv << "</text>\n";
        out << "<text x=\"" << ml - 8 << "\" y=\"" << py(yv) + 4
            << "\" text-anchor=\"end\" font-size=\"10\">" << yv << "</text>\n";
    }

    int color = 0;
    for (const SvgSeries& s : series) {
        if (!s.points.empty()) {
            out << "<polyline fill=\"none\" stroke=\"" << kPalette[color % 10]
                << "\" stroke-width=\"1.5\" points=\"";
            for (const auto& [x, y] : s.points) out << px(x) << "," << py(y) << " ";
            out << "\"/>\n";
        }
        out << "<text x=\"" << width - mr + 10 << "\" y=\"" << mt + 16 * color + 10
            << "\" font-size=\"11\" fill=\"" << kPalette[color % 10] << "\">" << s.name
            << "</text>\n";
        ++color;
    }
    out << "</svg>\n";
    return out.str();
}

} // namespace fragsim
