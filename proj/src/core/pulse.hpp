#pragma once

#include "touchstone.hpp"

#include <vector>

namespace socketlab {

/// Gaussian-enveloped single-sideband tone at carrier + sideband.
struct PulseSpec {
    double carrier = 4.5e9;      // Hz
    double sideband = 200e6;     // Hz
    double fwhm = 15e-9;         // s, envelope full width at half maximum
    double sample_rate = 20e9;   // Hz
    double duration = 100e-9;    // s

    void validate() const;
};

/// Uniformly sampled real waveform starting at t = 0.
struct PulseSeries {
    double sample_rate = 0.0;  // Hz
    std::vector<double> volts;

    double time(std::size_t i) const { return static_cast<double>(i) / sample_rate; }
    std::size_t size() const noexcept { return volts.size(); }
    void validate() const;
};

struct DistortionMetrics {
    double envelope_correlation = 0.0;
    double fwhm_change_fraction = 0.0;
    double delay = 0.0;      // s, output relative to input
    double fwhm_in = 0.0;    // s
    double fwhm_out = 0.0;   // s
};

/// g(t) cos(2 pi (carrier + sideband) t), g centered at duration / 2.
PulseSeries synthesize_pulse(const PulseSpec& spec);

/// Applies S_{out,in}(f) in the frequency domain. S is linearly interpolated
/// (real and imaginary parts) onto the FFT grid and held at the edge value
/// outside the measured band. Throws InputError if more than 10% of the pulse
/// energy falls outside the measured band.
PulseSeries transmit(const PulseSeries& pulse, const NetworkData& net, int out_port = 2, int in_port = 1);

/// Magnitude of the analytic signal.
std::vector<double> envelope(const PulseSeries& pulse);

/// Full width at half maximum of a sampled envelope, from linearly
/// interpolated half-maximum crossings around the peak.
double envelope_fwhm(const std::vector<double>& env, double sample_rate);

DistortionMetrics distortion_metrics(const PulseSeries& in, const PulseSeries& out);

}  // namespace socketlab
