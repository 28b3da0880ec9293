#pragma once

#include <string>
#include <vector>

namespace moe::plot {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool markers = true;
    bool line = false;
    std::string dash;  ///< stroke-dasharray, empty for solid
};

struct Axes {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    std::vector<std::string> notes;  ///< annotation lines, top-right
};

/// Self-contained SVG document (no external fonts, styles or scripts).
std::string render_svg(const Axes& axes, const std::vector<Series>& series, int width = 640, int height = 480);

std::string xml_escape(const std::string& s);

} // namespace moe::plot
