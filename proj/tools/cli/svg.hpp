#pragma once

#include <string>
#include <vector>

namespace socketlab::cli {

/// One named trace in SI units.
struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// magnitude: Hz vs dB. phase: Hz vs rad. impedance: s vs ohm.
/// envelope: s vs V.
enum class PlotKind { Magnitude, Phase, Impedance, Envelope };

/// Standalone SVG 1.1 document. Non-finite samples break the polyline.
/// Throws std::invalid_argument on an empty series list or empty trace.
std::string render_plot(const std::vector<Series>& series, PlotKind kind, const std::string& title = "");

}  // namespace socketlab::cli
