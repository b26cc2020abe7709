#pragma once

#include <string>
#include <vector>

namespace uand::svg {

/// One scatter point with a signed color value (diverging map:
/// negative blue, zero white, positive red).
struct Point {
    double x = 0;
    double y = 0;
    double value = 0;
};

/// Standalone SVG scatter chart with axes and a diverging color scale.
void write_scatter(const std::string& path, const std::vector<Point>& points,
                   const std::string& title, const std::string& x_label,
                   const std::string& y_label);

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Standalone SVG polyline chart; optional log-log axes.
void write_lines(const std::string& path, const std::vector<Series>& series,
                 const std::string& title, const std::string& x_label,
                 const std::string& y_label, bool log_x = false, bool log_y = false);

}  // namespace uand::svg
