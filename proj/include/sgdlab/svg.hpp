#pragma once

#include <optional>
#include <string>
#include <vector>

namespace sgdlab {

enum class AxisScale { linear, log2, log10 };

struct SvgSeries {
    std::vector<double> x;
    std::vector<double> y;
    std::string label;
    std::string color = "#1f6fb2";
    bool line = true;
    bool markers = true;
};

struct SvgPlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    AxisScale x_scale = AxisScale::linear;
    AxisScale y_scale = AxisScale::linear;
    std::vector<SvgSeries> series;
    std::string annotation;  // free text drawn in the plot corner
    std::string data_table;  // embedded verbatim in <desc> for reproducibility checks
};

void write_svg_plot(const std::string& path, const SvgPlot& plot);

void write_svg_histogram(const std::string& path, const std::vector<double>& samples, int bins,
                         const std::string& title, const std::string& data_table);

// Extracts the <desc> payload of a plot written by the functions above.
std::optional<std::string> read_svg_data_table(const std::string& path);

} // namespace sgdlab
