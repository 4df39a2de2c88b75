#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cpnet::cli {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotStyle {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
    int width = 720;
    int height = 480;
};

/// Writes a self-contained SVG line chart with one polyline per series and a legend.
/// Throws std::invalid_argument for an empty series list, an empty or ragged series,
/// or non-finite coordinates (non-positive ones when log_y is set).
void emit_plot(std::ostream& out, const std::vector<Series>& series, const PlotStyle& style);
void emit_plot_file(const std::string& path, const std::vector<Series>& series, const PlotStyle& style);

}  // namespace cpnet::cli
