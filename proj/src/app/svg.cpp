#include "anisodiff/app/svg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace anisodiff::app {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 30.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Axis {
    double lo;
    double hi;
    bool log;

    double transform(double v) const { return log ? std::log10(v) : v; }
    double fraction(double v) const { return (transform(v) - transform(lo)) / (transform(hi) - transform(lo)); }
};

std::vector<double> ticks(const Axis& a) {
    std::vector<double> out;
    if (a.log) {
        for (double e = std::floor(std::log10(a.lo)); e <= std::ceil(std::log10(a.hi)); e += 1.0) {
            const double v = std::pow(10.0, e);
            if (v >= a.lo * (1 - 1e-12) && v <= a.hi * (1 + 1e-12)) out.push_back(v);
        }
        return out;
    }
    for (int k = 0; k <= 5; ++k) out.push_back(a.lo + (a.hi - a.lo) * k / 5.0);
    return out;
}

std::string header(const std::string& title) {
    return fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        "<text x=\"{2}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">{3}</text>\n",
        kWidth, kHeight, kWidth / 2, escape(title));
}

std::string axes(const Axis& ax, const Axis& ay, const std::string& xl, const std::string& yl) {
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    std::string s = fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
                                kLeft, kTop, pw, ph);
    for (double t : ticks(ax)) {
        const double x = kLeft + ax.fraction(t) * pw;
        s += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"#ddd\"/>\n", x, kTop, kTop + ph);
        s += fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{:g}</text>\n",
                         x, kTop + ph + 16, t);
    }
    for (double t : ticks(ay)) {
        const double y = kTop + (1.0 - ay.fraction(t)) * ph;
        s += fmt::format("<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" stroke=\"#ddd\"/>\n", kLeft, y, kLeft + pw);
        s += fmt::format("<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">{:.3g}</text>\n",
                         kLeft - 6, y + 4, t);
    }
    s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">{}</text>\n",
                     kLeft + pw / 2, kHeight - 18, escape(xl));
    s += fmt::format(
        "<text x=\"18\" y=\"{0}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 {0})\">{1}</text>\n",
        kTop + ph / 2, escape(yl));
    return s;
}

// Piecewise-linear approximation of viridis.
std::string viridis(double t) {
    static constexpr std::array<std::array<double, 3>, 5> anchors{{{68, 1, 84}, {59, 82, 139}, {33, 145, 140},
                                                                   {94, 201, 98}, {253, 231, 37}}};
    t = std::clamp(t, 0.0, 1.0) * 4.0;
    const auto k = std::min<std::size_t>(3, static_cast<std::size_t>(t));
    const double f = t - static_cast<double>(k);
    std::array<int, 3> c{};
    for (int ch = 0; ch < 3; ++ch) {
        c[ch] = static_cast<int>(std::lround(anchors[k][ch] + f * (anchors[k + 1][ch] - anchors[k][ch])));
    }
    return fmt::format("#{:02x}{:02x}{:02x}", c[0], c[1], c[2]);
}

}  // namespace

std::string render_line_plot(const LinePlot& plot) {
    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = xlo, yhi = -xlo;
    for (const auto& s : plot.series) {
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
            if ((plot.log_x && s.x[k] <= 0) || (plot.log_y && s.y[k] <= 0)) continue;
            xlo = std::min(xlo, s.x[k]);
            xhi = std::max(xhi, s.x[k]);
            ylo = std::min(ylo, s.y[k]);
            yhi = std::max(yhi, s.y[k]);
        }
    }
    if (!(xlo < xhi)) xhi = xlo + 1.0;
    if (!(ylo < yhi)) yhi = ylo + 1.0;
    if (!plot.log_y && ylo > 0.0) ylo = 0.0;
    const Axis ax{xlo, xhi, plot.log_x};
    const Axis ay{ylo, yhi, plot.log_y};
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;

    std::string svg = header(plot.title) + axes(ax, ay, plot.x_label, plot.y_label);
    for (std::size_t n = 0; n < plot.series.size(); ++n) {
        const auto& s = plot.series[n];
        std::string points;
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
            if ((plot.log_x && s.x[k] <= 0) || (plot.log_y && s.y[k] <= 0)) continue;
            points += fmt::format("{:.2f},{:.2f} ", kLeft + ax.fraction(s.x[k]) * pw, kTop + (1.0 - ay.fraction(s.y[k])) * ph);
        }
        svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>\n", s.color, points);
        const double ly = kTop + 16 + 18.0 * static_cast<double>(n);
        svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" stroke-width=\"2\"/>\n",
                           kLeft + pw - 150, ly, kLeft + pw - 120, s.color);
        svg += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
                           kLeft + pw - 114, ly + 4, escape(s.label));
    }
    svg += "</svg>\n";
    return svg;
}

std::string render_heatmap(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<std::vector<double>>& values, double x0, double x1, double y0, double y1) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& row : values)
        for (double v : row) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (!(lo < hi)) hi = lo + 1.0;
    const Axis ax{x0, x1, false};
    const Axis ay{y0, y1, false};
    const double pw = kWidth - kLeft - kRight - 60.0;
    const double ph = kHeight - kTop - kBottom;
    std::string svg = header(title);
    const std::size_t rows = values.size();
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t cols = values[r].size();
        for (std::size_t c = 0; c < cols; ++c) {
            const double w = pw / static_cast<double>(cols);
            const double h = ph / static_cast<double>(rows);
            svg += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n",
                               kLeft + static_cast<double>(c) * w, kTop + ph - static_cast<double>(r + 1) * h, w + 0.3,
                               h + 0.3, viridis((values[r][c] - lo) / (hi - lo)));
        }
    }
    // axes drawn over a narrower plot area to leave room for the colorbar
    std::string frame = fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
                                    kLeft, kTop, pw, ph);
    for (double t : ticks(ax)) {
        frame += fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{:g}</text>\n",
                             kLeft + ax.fraction(t) * pw, kTop + ph + 16, t);
    }
    for (double t : ticks(ay)) {
        frame += fmt::format("<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">{:g}</text>\n",
                             kLeft - 6, kTop + (1.0 - ay.fraction(t)) * ph + 4, t);
    }
    frame += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">{}</text>\n",
                         kLeft + pw / 2, kHeight - 18, escape(x_label));
    frame += fmt::format(
        "<text x=\"18\" y=\"{0}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 {0})\">{1}</text>\n",
        kTop + ph / 2, escape(y_label));
    svg += frame;
    const double bx = kLeft + pw + 20;
    for (int k = 0; k < 50; ++k) {
        const double f = k / 49.0;
        svg += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"16\" height=\"{:.2f}\" fill=\"{}\"/>\n", bx,
                           kTop + ph * (1.0 - (k + 1) / 50.0), ph / 50.0 + 0.3, viridis(f));
    }
    svg += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{:.3g}</text>\n", bx, kTop - 4, hi);
    svg += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{:.3g}</text>\n", bx,
                       kTop + ph + 14, lo);
    svg += "</svg>\n";
    return svg;
}

}  // namespace anisodiff::app
