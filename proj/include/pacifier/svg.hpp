#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "pacifier/errors.hpp"

namespace pacifier {

namespace svg_detail {

inline const std::vector<std::string>& palette() {
    static const std::vector<std::string> p = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2",
                                               "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
                                               "#9c755f", "#bab0ac"};
    return p;
}

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

struct Canvas {
    std::ofstream out;
    explicit Canvas(const std::string& path, int w, int h) : out(path) {
        if (!out) throw InvalidInput("cannot write '" + path + "'");
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
            << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
            << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    }
    void text(double x, double y, const std::string& s, int size = 11,
              const std::string& anchor = "start", double rotate = 0) {
        out << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" font-size=\"" << size
            << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << '"';
        if (rotate != 0)
            out << " transform=\"rotate(" << fmt(rotate) << ' ' << fmt(x) << ' ' << fmt(y) << ")\"";
        out << '>' << s << "</text>\n";
    }
    void line(double x1, double y1, double x2, double y2, const std::string& color = "#444",
              double width = 1) {
        out << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x2)
            << "\" y2=\"" << fmt(y2) << "\" stroke=\"" << color << "\" stroke-width=\"" << fmt(width)
            << "\"/>\n";
    }
    void rect(double x, double y, double w, double h, const std::string& fill) {
        out << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(w)
            << "\" height=\"" << fmt(h) << "\" fill=\"" << fill << "\"/>\n";
    }
    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color) {
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : pts) out << fmt(x) << ',' << fmt(y) << ' ';
        out << "\"/>\n";
    }
    void close() { out << "</svg>\n"; }
};

inline double nice_max(double v) {
    if (v <= 0) return 1.0;
    const double mag = std::pow(10.0, std::floor(std::log10(v)));
    for (double f : {1.0, 2.0, 2.5, 5.0, 10.0})
        if (v <= f * mag) return f * mag;
    return 10.0 * mag;
}

}  // namespace svg_detail

// Grouped bars: one cluster per dataset, one bar per method.
// values[dataset][method] = score. Lower is better; the y axis starts at 0.
inline void svg_bar_chart(const std::string& path,
                          const std::vector<std::string>& datasets,
                          const std::vector<std::string>& methods,
                          const std::vector<std::vector<double>>& values,
                          const std::string& y_label = "anp") {
    using namespace svg_detail;
    const int W = std::max(420, 120 + static_cast<int>(datasets.size() * (methods.size() + 1) * 18));
    const int H = 320;
    const double x0 = 70, y0 = H - 70, x1 = W - 20, y1 = 30;
    Canvas c(path, W, H);
    double vmax = 0;
    for (const auto& row : values)
        for (double v : row) vmax = std::max(vmax, v);
    vmax = nice_max(vmax);

    c.line(x0, y0, x1, y0);
    c.line(x0, y0, x0, y1);
    for (int t = 0; t <= 4; ++t) {
        const double v = vmax * t / 4;
        const double y = y0 - (y0 - y1) * t / 4;
        c.line(x0 - 4, y, x0, y);
        c.text(x0 - 8, y + 4, fmt_tick(v), 10, "end");
    }
    c.text(14, (y0 + y1) / 2, y_label, 11, "middle", -90);

    const double cluster_w = (x1 - x0) / std::max<std::size_t>(1, datasets.size());
    const double bar_w = cluster_w / (methods.size() + 1);
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        for (std::size_t m = 0; m < methods.size(); ++m) {
            const double v = values[d][m];
            const double h = (y0 - y1) * (vmax > 0 ? v / vmax : 0);
            c.rect(x0 + d * cluster_w + (m + 0.5) * bar_w, y0 - h, bar_w * 0.9, h,
                   palette()[m % palette().size()]);
        }
        c.text(x0 + (d + 0.5) * cluster_w, y0 + 14, datasets[d], 10, "middle", 0);
    }
    for (std::size_t m = 0; m < methods.size(); ++m) {
        const double lx = x0 + 10 + 110 * static_cast<double>(m % 4);
        const double ly = H - 34 + 14 * static_cast<double>(m / 4);
        c.rect(lx, ly - 9, 10, 10, palette()[m % palette().size()]);
        c.text(lx + 14, ly, methods[m], 10);
    }
    c.close();
}

// Polarization trajectories over the normalized horizon x = t/k in [0, 1].
// series[method] = per-step values at t = 0..k (steps may differ per method).
inline void svg_trajectory_chart(const std::string& path,
                                 const std::map<std::string, std::vector<double>>& series,
                                 const std::string& y_label = "normalized polarization") {
    using namespace svg_detail;
    const int W = 520, H = 340;
    const double x0 = 70, y0 = H - 60, x1 = W - 20, y1 = 30;
    Canvas c(path, W, H);
    double vmax = 0;
    for (const auto& [name, vals] : series)
        for (double v : vals) vmax = std::max(vmax, v);
    vmax = nice_max(vmax);

    c.line(x0, y0, x1, y0);
    c.line(x0, y0, x0, y1);
    for (int t = 0; t <= 4; ++t) {
        const double fx = static_cast<double>(t) / 4;
        const double x = x0 + (x1 - x0) * fx;
        c.line(x, y0, x, y0 + 4);
        c.text(x, y0 + 16, fmt_tick(fx), 10, "middle");
        const double y = y0 - (y0 - y1) * fx;
        c.line(x0 - 4, y, x0, y);
        c.text(x0 - 8, y + 4, fmt_tick(vmax * fx), 10, "end");
    }
    c.text((x0 + x1) / 2, H - 26, "intervention progress t/k", 11, "middle");
    c.text(14, (y0 + y1) / 2, y_label, 11, "middle", -90);

    int idx = 0;
    for (const auto& [name, vals] : series) {
        if (vals.size() < 2) continue;
        std::vector<std::pair<double, double>> pts;
        const double k = static_cast<double>(vals.size() - 1);
        for (std::size_t t = 0; t < vals.size(); ++t)
            pts.emplace_back(x0 + (x1 - x0) * (t / k), y0 - (y0 - y1) * (vmax > 0 ? vals[t] / vmax : 0));
        const std::string color = palette()[idx % palette().size()];
        c.polyline(pts, color);
        c.rect(x0 + 10, y1 + 4 + 14.0 * idx, 10, 3, color);
        c.text(x0 + 24, y1 + 10 + 14.0 * idx, name, 10);
        ++idx;
    }
    c.close();
}

// Method x dataset heat grid; darker = higher score.
inline void svg_heatmap(const std::string& path,
                        const std::vector<std::string>& datasets,
                        const std::vector<std::string>& methods,
                        const std::vector<std::vector<double>>& values) {
    using namespace svg_detail;
    const double cell = 34;
    const int W = 160 + static_cast<int>(cell * datasets.size());
    const int H = 80 + static_cast<int>(cell * methods.size());
    Canvas c(path, W, H);
    double vmax = 1e-300;
    for (const auto& row : values)
        for (double v : row) vmax = std::max(vmax, v);
    for (std::size_t m = 0; m < methods.size(); ++m) {
        c.text(150, 40 + cell * m + cell / 2 + 4, methods[m], 10, "end");
        for (std::size_t d = 0; d < datasets.size(); ++d) {
            const double t = std::clamp(values[d][m] / vmax, 0.0, 1.0);
            const int r = static_cast<int>(255 - 180 * t);
            const int g = static_cast<int>(245 - 200 * t);
            const int b = 255;
            char color[8];
            std::snprintf(color, sizeof(color), "#%02x%02x%02x", r, g, b);
            c.rect(156 + cell * d, 40 + cell * m, cell - 2, cell - 2, color);
        }
    }
    for (std::size_t d = 0; d < datasets.size(); ++d)
        c.text(156 + cell * d + cell / 2, 34, datasets[d], 9, "middle", -30);
    c.close();
}

}  // namespace pacifier
