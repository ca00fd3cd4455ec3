#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "hydronet/common.hpp"

namespace hydronet {

// Minimal deterministic SVG plotting: fixed-precision coordinates so
// identical inputs always produce byte-identical files.

struct PlotTrace {
    std::string label;
    std::vector<double> values;
};

struct PlotPanel {
    std::string title;
    std::vector<PlotTrace> traces;
};

struct ScatterPoint {
    double x = 0.0;
    double y = 0.0;
    double radius = 1.0;
};

namespace detail {

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline void value_range(const std::vector<PlotTrace>& traces, double& lo, double& hi) {
    lo = traces[0].values[0];
    hi = lo;
    for (const auto& tr : traces)
        for (double v : tr.values) {
            if (v < lo) lo = v;
            if (v > hi) hi = v;
        }
    if (hi == lo) {
        lo -= 1.0;
        hi += 1.0;
    }
}

}  // namespace detail

static const char* const kTraceColors[] = {"#1f6fb2", "#d1495b", "#3a7d44", "#8d6a9f", "#c58b2f"};

// Stacked line panels (one per PlotPanel), one polyline per trace.
inline std::string render_line_svg(const std::vector<PlotPanel>& panels, int width = 900,
                                   int panel_height = 160) {
    if (panels.empty()) throw Error("render_line_svg: no panels");
    for (const auto& p : panels) {
        if (p.traces.empty()) throw Error("render_line_svg: empty panel '" + p.title + "'");
        for (const auto& t : p.traces)
            if (t.values.empty()) throw Error("render_line_svg: empty trace '" + t.label + "'");
    }
    const int margin = 40;
    const int height = static_cast<int>(panels.size()) * panel_height + margin;
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
                      "\" height=\"" + std::to_string(height) + "\">\n";
    for (std::size_t pi = 0; pi < panels.size(); ++pi) {
        const auto& panel = panels[pi];
        const double top = static_cast<double>(pi) * panel_height + 20.0;
        const double plot_h = panel_height - 40.0;
        const double plot_w = width - 2.0 * margin;
        double lo, hi;
        detail::value_range(panel.traces, lo, hi);
        svg += "<g class=\"panel\">\n";
        svg += "<rect x=\"" + detail::svg_num(margin) + "\" y=\"" + detail::svg_num(top) +
               "\" width=\"" + detail::svg_num(plot_w) + "\" height=\"" + detail::svg_num(plot_h) +
               "\" fill=\"none\" stroke=\"#999\"/>\n";
        svg += "<text x=\"" + detail::svg_num(margin) + "\" y=\"" + detail::svg_num(top - 6.0) +
               "\" font-size=\"12\" font-family=\"sans-serif\">" + panel.title + "</text>\n";
        for (std::size_t ti = 0; ti < panel.traces.size(); ++ti) {
            const auto& trace = panel.traces[ti];
            const std::size_t n = trace.values.size();
            std::string pts;
            for (std::size_t i = 0; i < n; ++i) {
                const double x = margin + (n == 1 ? 0.0 : plot_w * static_cast<double>(i) /
                                                              static_cast<double>(n - 1));
                const double y = top + plot_h - plot_h * (trace.values[i] - lo) / (hi - lo);
                pts += detail::svg_num(x) + "," + detail::svg_num(y) + " ";
            }
            svg += "<polyline fill=\"none\" stroke=\"" + std::string(kTraceColors[ti % 5]) +
                   "\" stroke-width=\"1\" points=\"" + pts + "\"/>\n";
        }
        svg += "</g>\n";
    }
    svg += "</svg>\n";
    return svg;
}

// Time-frequency scatter; amplitude encoded as point radius.
inline std::string render_scatter_svg(const std::vector<ScatterPoint>& points,
                                      const std::string& title, int width = 900, int height = 500) {
    if (points.empty()) throw Error("render_scatter_svg: no points");
    const int margin = 40;
    double xlo = points[0].x, xhi = points[0].x, ylo = points[0].y, yhi = points[0].y, rhi = 0.0;
    for (const auto& p : points) {
        xlo = std::min(xlo, p.x);
        xhi = std::max(xhi, p.x);
        ylo = std::min(ylo, p.y);
        yhi = std::max(yhi, p.y);
        rhi = std::max(rhi, p.radius);
    }
    if (xhi == xlo) xhi = xlo + 1.0;
    if (yhi == ylo) yhi = ylo + 1.0;
    if (rhi <= 0.0) rhi = 1.0;
    const double plot_w = width - 2.0 * margin;
    const double plot_h = height - 2.0 * margin;
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
                      "\" height=\"" + std::to_string(height) + "\">\n";
    svg += "<text x=\"" + detail::svg_num(margin) + "\" y=\"" + detail::svg_num(margin - 10.0) +
           "\" font-size=\"12\" font-family=\"sans-serif\">" + title + "</text>\n";
    svg += "<rect x=\"" + detail::svg_num(margin) + "\" y=\"" + detail::svg_num(margin) +
           "\" width=\"" + detail::svg_num(plot_w) + "\" height=\"" + detail::svg_num(plot_h) +
           "\" fill=\"none\" stroke=\"#999\"/>\n";
    for (const auto& p : points) {
        const double x = margin + plot_w * (p.x - xlo) / (xhi - xlo);
        const double y = margin + plot_h - plot_h * (p.y - ylo) / (yhi - ylo);
        const double r = 0.5 + 2.5 * p.radius / rhi;
        svg += "<circle cx=\"" + detail::svg_num(x) + "\" cy=\"" + detail::svg_num(y) + "\" r=\"" +
               detail::svg_num(r) + "\" fill=\"#1f6fb2\" fill-opacity=\"0.5\"/>\n";
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace hydronet
