#pragma once

#include <string>
#include <vector>

namespace anisodiff::app {

struct Series {
    std::string label;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
};

struct LinePlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    std::vector<Series> series;
};

/// Polyline chart with axes, tick labels and a legend.
std::string render_line_plot(const LinePlot& plot);

/// Heatmap of values[row][col] over the rectangle [x0, x1] x [y0, y1];
/// rows run along y.
std::string render_heatmap(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<std::vector<double>>& values, double x0, double x1, double y0, double y1);

}  // namespace anisodiff::app
