#pragma once

#include <string>
#include <vector>

#include "minkowski.hpp"

namespace ellipsum::svg {

/// A labeled 2-D polyline; closed curves are rendered with a final segment
/// back to the first point.
struct Curve {
    std::string label;
    std::vector<Eigen::Vector2d> points;
    bool closed = true;
};

/// Polyline tracing a 2-D ellipsoid through its Cholesky factor.
inline Curve ellipse_curve(const Ellipsoid& e, std::string label, int segments = 256) {
    require(e.dim() == 2, ErrorCode::bad_axes, "only 2-D ellipsoids can be drawn");
    Matrix l = e.factorization().matrixL();
    Curve c{std::move(label), {}, true};
    c.points.reserve(static_cast<std::size_t>(segments));
    for (int i = 0; i < segments; ++i) {
        double a = 2.0 * M_PI * i / segments;
        Eigen::Vector2d u(std::cos(a), std::sin(a));
        c.points.emplace_back(e.center() + l * u);
    }
    return c;
}

/// Polyline through boundary-sweep sample points (assumed angularly ordered).
inline Curve samples_curve(const std::vector<BoundarySample>& samples, std::string label) {
    Curve c{std::move(label), {}, true};
    c.points.reserve(samples.size());
    for (const auto& s : samples) {
        require(s.point.size() == 2, ErrorCode::bad_axes, "only 2-D samples can be drawn");
        c.points.emplace_back(s.point(0), s.point(1));
    }
    return c;
}

struct SvgOptions {
    int width = 640;
    int height = 640;
    std::string title;
};

namespace detail_svg {

inline std::string px(double v) { return detail::fmt_fixed(v, 2); }

inline const char* palette(std::size_t i) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#000000",
                                   "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
    return colors[i % (sizeof(colors) / sizeof(colors[0]))];
}

} // namespace detail_svg

/// Standalone SVG document with equal-aspect axes and a legend. Output bytes
/// are a pure function of the input.
inline std::string render_svg(const std::vector<Curve>& curves, const SvgOptions& opts = {}) {
    require(!curves.empty(), ErrorCode::empty_plot, "no curves to draw");
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    bool first = true;
    for (const auto& c : curves) {
        require(!c.points.empty(), ErrorCode::empty_plot, "curve \"" + c.label + "\" has no points");
        for (const auto& p : c.points) {
            if (first) {
                xmin = xmax = p.x();
                ymin = ymax = p.y();
                first = false;
            } else {
                xmin = std::min(xmin, p.x());
                xmax = std::max(xmax, p.x());
                ymin = std::min(ymin, p.y());
                ymax = std::max(ymax, p.y());
            }
        }
    }
    double span = std::max({xmax - xmin, ymax - ymin, 1e-9});
    double cx = 0.5 * (xmin + xmax), cy = 0.5 * (ymin + ymax);
    double half = 0.54 * span;  // 8% padding around the data square
    const double margin = 46.0;
    const double plot_w = opts.width - 2 * margin, plot_h = opts.height - 2 * margin;
    double scale = std::min(plot_w, plot_h) / (2.0 * half);

    auto sx = [&](double x) { return margin + plot_w / 2.0 + (x - cx) * scale; };
    auto sy = [&](double y) { return margin + plot_h / 2.0 - (y - cy) * scale; };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(opts.width) +
           "\" height=\"" + std::to_string(opts.height) + "\" viewBox=\"0 0 " +
           std::to_string(opts.width) + " " + std::to_string(opts.height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!opts.title.empty())
        out += "<text x=\"" + detail_svg::px(opts.width / 2.0) +
               "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
               opts.title + "</text>\n";

    // frame and zero axes
    out += "<rect x=\"" + detail_svg::px(margin) + "\" y=\"" + detail_svg::px(margin) +
           "\" width=\"" + detail_svg::px(plot_w) + "\" height=\"" + detail_svg::px(plot_h) +
           "\" fill=\"none\" stroke=\"#888888\" stroke-width=\"1\"/>\n";
    if (cx - half < 0.0 && cx + half > 0.0)
        out += "<line x1=\"" + detail_svg::px(sx(0)) + "\" y1=\"" + detail_svg::px(margin) +
               "\" x2=\"" + detail_svg::px(sx(0)) + "\" y2=\"" + detail_svg::px(margin + plot_h) +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    if (cy - half < 0.0 && cy + half > 0.0)
        out += "<line x1=\"" + detail_svg::px(margin) + "\" y1=\"" + detail_svg::px(sy(0)) +
               "\" x2=\"" + detail_svg::px(margin + plot_w) + "\" y2=\"" + detail_svg::px(sy(0)) +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";

    // corner tick labels
    auto tick = [&](double x, double y, const std::string& text, const char* anchor) {
        out += "<text x=\"" + detail_svg::px(x) + "\" y=\"" + detail_svg::px(y) +
               "\" text-anchor=\"" + anchor +
               "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#444444\">" + text + "</text>\n";
    };
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", cx - half);
    tick(margin, margin + plot_h + 16, buf, "start");
    std::snprintf(buf, sizeof(buf), "%.3g", cx + half);
    tick(margin + plot_w, margin + plot_h + 16, buf, "end");
    std::snprintf(buf, sizeof(buf), "%.3g", cy - half);
    tick(margin - 6, margin + plot_h, buf, "end");
    std::snprintf(buf, sizeof(buf), "%.3g", cy + half);
    tick(margin - 6, margin + 10, buf, "end");

    for (std::size_t ci = 0; ci < curves.size(); ++ci) {
        const auto& c = curves[ci];
        out += "<path d=\"";
        for (std::size_t i = 0; i < c.points.size(); ++i) {
            out += (i == 0 ? "M" : "L");
            out += detail_svg::px(sx(c.points[i].x())) + " " + detail_svg::px(sy(c.points[i].y()));
        }
        if (c.closed) out += "Z";
        out += "\" fill=\"none\" stroke=\"";
        out += detail_svg::palette(ci);
        out += "\" stroke-width=\"1.6\"/>\n";
    }

    // legend, top right
    double lx = margin + plot_w - 150.0, ly = margin + 14.0;
    for (std::size_t ci = 0; ci < curves.size(); ++ci) {
        double y = ly + 18.0 * static_cast<double>(ci);
        out += "<line x1=\"" + detail_svg::px(lx) + "\" y1=\"" + detail_svg::px(y) + "\" x2=\"" +
               detail_svg::px(lx + 24) + "\" y2=\"" + detail_svg::px(y) + "\" stroke=\"";
        out += detail_svg::palette(ci);
        out += "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + detail_svg::px(lx + 30) + "\" y=\"" + detail_svg::px(y + 4) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + curves[ci].label + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

} // namespace ellipsum::svg
