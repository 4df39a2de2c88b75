#include "svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace cpnet::cli {

namespace {

constexpr std::array<const char*, 10> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
            lo -= 0.5;
            hi += 0.5;
        }
    }
};

}  // namespace

void emit_plot(std::ostream& out, const std::vector<Series>& series, const PlotStyle& style) {
    if (series.empty()) throw std::invalid_argument("emit_plot: no series to draw");
    Range xr, yr;
    for (const auto& s : series) {
        if (s.x.empty() || s.x.size() != s.y.size())
            throw std::invalid_argument("emit_plot: series '" + s.name + "' is empty or has mismatched x/y lengths");
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double y = s.y[i];
            if (!std::isfinite(s.x[i]) || !std::isfinite(y) || (style.log_y && y <= 0.0))
                throw std::invalid_argument("emit_plot: series '" + s.name + "' has a non-plottable point");
            xr.add(s.x[i]);
            yr.add(style.log_y ? std::log10(y) : y);
        }
    }
    xr.pad();
    yr.pad();

    const double left = 70, right = 170, top = 40, bottom = 50;
    const double w = style.width, h = style.height;
    const double pw = w - left - right, ph = h - top - bottom;
    auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto py = [&](double y) {
        const double v = style.log_y ? std::log10(y) : y;
        return top + ph - (v - yr.lo) / (yr.hi - yr.lo) * ph;
    };

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width << "\" height=\"" << style.height
        << "\" viewBox=\"0 0 " << style.width << ' ' << style.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!style.title.empty())
        out << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
            << escape(style.title) << "</text>\n";
    out << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(pw) << "\" height=\"" << fmt(ph)
        << "\" fill=\"none\" stroke=\"black\"/>\n";

    constexpr int kTicks = 5;
    for (int i = 0; i <= kTicks; ++i) {
        const double fx = xr.lo + (xr.hi - xr.lo) * i / kTicks;
        const double gx = px(fx);
        out << "<line x1=\"" << fmt(gx) << "\" y1=\"" << fmt(top + ph) << "\" x2=\"" << fmt(gx) << "\" y2=\""
            << fmt(top + ph + 5) << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << fmt(gx) << "\" y=\"" << fmt(top + ph + 18) << "\" text-anchor=\"middle\">"
            << tick_label(fx) << "</text>\n";
        const double fy = yr.lo + (yr.hi - yr.lo) * i / kTicks;
        const double gy = top + ph - ph * i / kTicks;
        out << "<line x1=\"" << fmt(left - 5) << "\" y1=\"" << fmt(gy) << "\" x2=\"" << fmt(left) << "\" y2=\""
            << fmt(gy) << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(gy + 4) << "\" text-anchor=\"end\">"
            << tick_label(style.log_y ? std::pow(10.0, fy) : fy) << "</text>\n";
    }
    if (!style.x_label.empty())
        out << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(h - 12) << "\" text-anchor=\"middle\">"
            << escape(style.x_label) << "</text>\n";
    if (!style.y_label.empty())
        out << "<text transform=\"translate(16," << fmt(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
            << escape(style.y_label) << (style.log_y ? " (log scale)" : "") << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* colour = kPalette[k % kPalette.size()];
        out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) out << (i ? " " : "") << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i]));
        out << "\"/>\n";
    }

    out << "<g class=\"legend\">\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const double ly = top + 10 + 18.0 * static_cast<double>(k);
        const double lx = left + pw + 15;
        out << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(lx + 20) << "\" y2=\"" << fmt(ly)
            << "\" stroke=\"" << kPalette[k % kPalette.size()] << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << fmt(lx + 26) << "\" y=\"" << fmt(ly + 4) << "\">" << escape(series[k].name) << "</text>\n";
    }
    out << "</g>\n</svg>\n";
}

void emit_plot_file(const std::string& path, const std::vector<Series>& series, const PlotStyle& style) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    emit_plot(f, series, style);
    f.close();
    if (!f) throw std::runtime_error("failed writing " + path);
}

}  // namespace cpnet::cli
