#pragma once

#include "touchstone.hpp"

#include <limits>
#include <vector>

namespace socketlab {

struct LineSegment {
    double one_way_delay = 0.0;  // s
    double z = 50.0;             // ohms
    double r_series = 0.0;       // ohms, total across the segment
};

/// Piecewise transmission-line model seen from a source of impedance z_source.
/// The last segment is taken to continue indefinitely (no termination echo).
struct ImpedanceProfile {
    std::vector<LineSegment> segments;
    double z_source = 50.0;

    void validate() const;
};

enum class SynthesisOrder { FirstOrder, Multi };

/// Marker returned for an open (xi -> 1) sample.
inline constexpr double kOpenMarker = std::numeric_limits<double>::infinity();

/// Reflection ratio xi = (V_meas - V+) / V+.
double reflection_ratio(double v_meas, double v_plus);

/// First-order instantaneous impedance z_c (1 + xi) / (1 - xi), with the
/// open/short markers applied within 1e-9 of xi = +/-1.
double instantaneous_impedance(double xi, double z_c);

std::vector<double> impedance_from_trace(const TdrTrace& trace, double z_c);

TdrTrace synthesize_trace(const ImpedanceProfile& profile, double v_plus, double sample_dt, double total_time,
                          SynthesisOrder order = SynthesisOrder::FirstOrder);

struct SegmentationOptions {
    double min_step = 2.0;          // ohms
    std::size_t median_window = 5;  // samples
};

/// Segments Z(t) into flat or linearly rising pieces. Boundaries are placed at
/// the middle of each detected step; the delay of a segment is half its
/// round-trip duration.
ImpedanceProfile profile_from_trace(const TdrTrace& trace, double z_c, const SegmentationOptions& opts = {});

/// Physical segment lengths for a known velocity factor (fraction of c).
std::vector<double> segment_lengths(const ImpedanceProfile& profile, double velocity_factor);

}  // namespace socketlab
