#include "fedsched/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fedsched/io.hpp"

namespace fedsched {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

struct Range {
    double lo = 0.0;
    double hi = 1.0;

    double clamp01(double v) const { return hi == lo ? 0.5 : (v - lo) / (hi - lo); }
};

Range span_of(const std::vector<ChartSeries>& series, bool y_axis) {
    Range r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            const double v = y_axis ? y : x;
            r.lo = std::min(r.lo, v);
            r.hi = std::max(r.hi, v);
        }
    }
    if (!std::isfinite(r.lo)) {
        return {0.0, 1.0};
    }
    if (r.lo == r.hi) {
        r.lo -= 0.5;
        r.hi += 0.5;
    }
    return r;
}

std::string tick_label(double v) {
    std::ostringstream out;
    out.precision(4);
    out << v;
    return out.str();
}

}  // namespace

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<ChartSeries>& series,
                           int width, int height) {
    const double margin_left = 76.0;
    const double margin_right = 24.0;
    const double margin_top = 44.0;
    const double margin_bottom = 56.0;
    const double plot_w = width - margin_left - margin_right;
    const double plot_h = height - margin_top - margin_bottom;

    const Range xr = span_of(series, false);
    const Range yr = span_of(series, true);

    const auto px = [&](double x) { return margin_left + xr.clamp01(x) * plot_w; };
    const auto py = [&](double y) { return margin_top + (1.0 - yr.clamp01(y)) * plot_h; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";

    // axes
    svg << "<line x1=\"" << margin_left << "\" y1=\"" << margin_top + plot_h << "\" x2=\""
        << margin_left + plot_w << "\" y2=\"" << margin_top + plot_h
        << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << margin_left << "\" y1=\"" << margin_top << "\" x2=\"" << margin_left
        << "\" y2=\"" << margin_top + plot_h << "\" stroke=\"black\"/>\n";

    const int ticks = 5;
    for (int i = 0; i <= ticks; ++i) {
        const double fx = static_cast<double>(i) / ticks;
        const double vx = xr.lo + fx * (xr.hi - xr.lo);
        const double gx = margin_left + fx * plot_w;
        svg << "<line x1=\"" << gx << "\" y1=\"" << margin_top + plot_h << "\" x2=\"" << gx
            << "\" y2=\"" << margin_top + plot_h + 5 << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << gx << "\" y=\"" << margin_top + plot_h + 20
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << tick_label(vx) << "</text>\n";

        const double vy = yr.lo + fx * (yr.hi - yr.lo);
        const double gy = margin_top + (1.0 - fx) * plot_h;
        svg << "<line x1=\"" << margin_left - 5 << "\" y1=\"" << gy << "\" x2=\"" << margin_left
            << "\" y2=\"" << gy << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << margin_left - 8 << "\" y=\"" << gy + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << tick_label(vy) << "</text>\n";
    }

    svg << "<text x=\"" << margin_left + plot_w / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label
        << "</text>\n";
    svg << "<text x=\"18\" y=\"" << margin_top + plot_h / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 18 " << margin_top + plot_h / 2 << ")\">" << y_label
        << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % kPaletteSize];
        if (series[s].points.empty()) {
            continue;
        }
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : series[s].points) {
            svg << format_double(px(x)) << ',' << format_double(py(y)) << ' ';
        }
        svg << "\"/>\n";
    }

    // legend
    double ly = margin_top + 8.0;
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % kPaletteSize];
        const double lx = margin_left + plot_w - 170.0;
        svg << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 22 << "\" y2=\""
            << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << lx + 28 << "\" y=\"" << ly + 4
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << series[s].name
            << "</text>\n";
        ly += 18.0;
    }

    svg << "</svg>\n";
    return svg.str();
}

}  // namespace fedsched
