#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace socketlab::cli {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 30.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 60.0;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

struct Axes {
    double x_scale;
    const char* x_label;
    double y_scale;
    const char* y_label;
};

Axes axes_for(PlotKind kind) {
    switch (kind) {
        case PlotKind::Magnitude: return {1e-9, "Frequency (GHz)", 1.0, "Magnitude (dB)"};
        case PlotKind::Phase: return {1e-9, "Frequency (GHz)", 1.0, "Phase (rad)"};
        case PlotKind::Impedance: return {1e9, "Time (ns)", 1.0, "Impedance (Ω)"};
        case PlotKind::Envelope: return {1e9, "Time (ns)", 1.0, "Amplitude (V)"};
    }
    return {1.0, "", 1.0, ""};
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
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

double nice_step(double span, int target) {
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    const double nice = r < 1.5 ? 1.0 : r < 3.0 ? 2.0 : r < 7.0 ? 5.0 : 10.0;
    return nice * mag;
}

std::string tick_label(double v, double step) {
    const int decimals = std::max(0, static_cast<int>(-std::floor(std::log10(step) + 1e-9)));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", std::min(decimals, 9), std::abs(v) < step * 1e-9 ? 0.0 : v);
    return buf;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }

    void finish() {
        if (!std::isfinite(lo)) {
            lo = 0.0;
            hi = 1.0;
        } else if (hi - lo <= 1e-12 * std::max(1.0, std::abs(lo))) {
            const double pad = std::max(1.0, std::abs(lo)) * 0.05;
            lo -= pad;
            hi += pad;
        }
    }
};

}  // namespace

std::string render_plot(const std::vector<Series>& series, PlotKind kind, const std::string& title) {
    if (series.empty()) throw std::invalid_argument("nothing to plot");
    for (const auto& s : series) {
        if (s.x.empty() || s.x.size() != s.y.size()) throw std::invalid_argument("empty or ragged series '" + s.label + "'");
    }
    const Axes ax = axes_for(kind);
    Range xr, yr;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.y[i])) continue;
            xr.add(s.x[i] * ax.x_scale);
            yr.add(s.y[i] * ax.y_scale);
        }
    xr.finish();
    yr.finish();
    const double ystep = nice_step(yr.hi - yr.lo, 6);
    yr.lo = std::floor(yr.lo / ystep) * ystep;
    yr.hi = std::ceil(yr.hi / ystep) * ystep;
    const double xstep = nice_step(xr.hi - xr.lo, 8);

    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto py = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(kWidth) << "\" height=\""
      << num(kHeight) << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(kHeight) << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight) << "\" fill=\"white\"/>\n";
    if (!title.empty())
        o << "<text x=\"" << num(kWidth / 2) << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          << "font-size=\"16\">" << escape(title) << "</text>\n";

    o << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
    for (double t = std::ceil(xr.lo / xstep) * xstep; t <= xr.hi + xstep * 1e-9; t += xstep) {
        const double x = px(t);
        o << "<line x1=\"" << num(x) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(x) << "\" y2=\""
          << num(kTop + ph) << "\" stroke=\"#e5e5e5\"/>\n"
          << "<text x=\"" << num(x) << "\" y=\"" << num(kTop + ph + 16) << "\" text-anchor=\"middle\">"
          << tick_label(t, xstep) << "</text>\n";
    }
    for (double t = yr.lo; t <= yr.hi + ystep * 1e-9; t += ystep) {
        const double y = py(t);
        o << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kLeft + pw) << "\" y2=\""
          << num(y) << "\" stroke=\"#e5e5e5\"/>\n"
          << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">"
          << tick_label(t, ystep) << "</text>\n";
    }
    o << "</g>\n";
    o << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    o << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 18)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << ax.x_label << "</text>\n";
    o << "<text x=\"20\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"13\" transform=\"rotate(-90 20 " << num(kTop + ph / 2) << ")\">" << ax.y_label << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = kPalette[k % std::size(kPalette)];
        std::string pts;
        auto flush = [&] {
            if (!pts.empty())
                o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << pts
                  << "\"/>\n";
            pts.clear();
        };
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.y[i]) || !std::isfinite(s.x[i])) {
                flush();
                continue;
            }
            if (!pts.empty()) pts += ' ';
            pts += num(px(s.x[i] * ax.x_scale)) + "," + num(py(s.y[i] * ax.y_scale));
        }
        flush();
        const double ly = kTop + 16 + 18 * static_cast<double>(k);
        o << "<line x1=\"" << num(kLeft + pw - 150) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(kLeft + pw - 125)
          << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
          << "<text x=\"" << num(kLeft + pw - 118) << "\" y=\"" << num(ly + 4)
          << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(s.label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace socketlab::cli
