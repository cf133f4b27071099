#pragma once

#include <string>
#include <vector>

namespace fedsched {

struct ChartSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

/// Self-contained SVG line chart (axes, ticks, legend). Series colors cycle
/// through a fixed palette, so identical inputs yield identical bytes.
std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<ChartSeries>& series,
                           int width = 960, int height = 540);

}  // namespace fedsched
