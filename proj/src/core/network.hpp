#pragma once

#include "touchstone.hpp"

#include <string>
#include <vector>

namespace socketlab {

/// Per-frequency derived two-port quantities.
struct MicrowaveParams {
    std::vector<double> freqs;
    std::vector<cplx> z_in;
    std::vector<double> vswr_in;
    std::vector<double> tau_phi;
    std::vector<double> tau_g;
};

enum class LoadSign {
    Conventional,  // Z11 - Z12 Z21 / (Z22 + ZL)
    AsPrinted,     // Z11 - Z12 Z21 / (Z22 - ZL)
};

struct IsolationResult {
    double isolation_db = 0.0;   // -max 20 log10 |S| over the crosstalk entries
    double worst_freq = 0.0;     // Hz
    std::string worst_entry;     // e.g. "S31"
};

enum class DipClass { Resonance, NonResonantAnomaly };

struct DipReport {
    double center_freq = 0.0;      // Hz
    double depth = 0.0;            // dB below the detrended baseline
    double bandwidth_3db = 0.0;    // Hz, full width at half power depth
    double phase_excursion = 0.0;  // rad
    DipClass classification = DipClass::NonResonantAnomaly;
};

std::string_view to_string(DipClass c);

/// Z = Zc (I + S)(I - S)^-1 at every frequency.
std::vector<Eigen::MatrixXcd> z_from_s(const NetworkData& net);
Eigen::MatrixXcd z_from_s(const Eigen::MatrixXcd& s, double z_ref);

/// S = (Z - Zc I)(Z + Zc I)^-1.
Eigen::MatrixXcd s_from_z(const Eigen::MatrixXcd& z, double z_ref);

cplx input_impedance(const Eigen::Matrix2cd& z, cplx z_load, LoadSign sign = LoadSign::Conventional);

double vswr(cplx s11);

/// Removes 2*pi jumps so consecutive differences fall in (-pi, pi].
std::vector<double> unwrap_phase(const std::vector<double>& angles);

/// Unwrapped phase of S_{out,in}, shifted by a multiple of 2*pi so the linear
/// extrapolation to DC lies in (-pi, pi].
std::vector<double> transmission_phase(const NetworkData& net, int out_port, int in_port);

std::vector<double> phase_delay(const NetworkData& net, int out_port = 2, int in_port = 1);

/// Sixth-order finite-difference derivative on a uniform grid of step h.
/// Interior points use the central stencil, the first/last three points
/// one-sided seven-point stencils.
std::vector<double> derivative_6th_order(const std::vector<double>& y, double h);

/// Centered moving average; window forced odd and shrunk symmetrically at the ends.
std::vector<double> moving_average(const std::vector<double>& y, std::size_t window);

/// Smoothing window used for group delay: round(1% of n), at least 1, odd.
std::size_t smoothing_window(std::size_t n);

/// Group delay -d(phase)/d(omega). Requires a uniform grid with >= 7 points.
std::vector<double> group_delay(const NetworkData& net, int out_port = 2, int in_port = 1, bool smooth = true);

/// Network re-sampled onto a uniform grid by linear interpolation of Re/Im.
NetworkData resample_uniform(const NetworkData& net, std::size_t points);

/// Z_in, VSWR_in, phase delay and group delay of a two-port (ports 1 -> 2).
MicrowaveParams microwave_params(const NetworkData& net, cplx z_load, LoadSign sign = LoadSign::Conventional);

IsolationResult band_isolation(const NetworkData& net, double f_lo, double f_hi);

/// Characterizes the deepest |S_{out,in}| dip inside [f_lo, f_hi].
DipReport classify_dip(const NetworkData& net, int out_port, int in_port, double f_lo, double f_hi);

}  // namespace socketlab
