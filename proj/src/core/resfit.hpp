#pragma once

#include "touchstone.hpp"

#include <optional>
#include <string>
#include <vector>

namespace socketlab {

/// Notch-type resonator described by the inverse transmission
///   1/S21 = 1 + (Qi/Qc*) e^{i phi} / (1 + 2 i Qi (f - f0)/f0).
struct ResonatorModel {
    double f0 = 0.0;        // Hz
    double q_i = 0.0;       // internal quality factor
    double q_c_star = 0.0;  // rescaled coupling quality factor
    double phi = 0.0;       // rad, (-pi, pi]

    void validate() const;
    double loaded_q() const { return 1.0 / (1.0 / q_i + 1.0 / q_c_star); }
};

struct ResonatorErrors {
    double f0 = 0.0;
    double q_i = 0.0;
    double q_c_star = 0.0;
    double phi = 0.0;
};

/// Complex baseline removed by normalization:
///   baseline(f) = exp(log_mag0 + log_mag_slope f + i (phase0 + phase_slope f)).
struct Baseline {
    double log_mag0 = 0.0;
    double log_mag_slope = 0.0;
    double phase0 = 0.0;
    double phase_slope = 0.0;
};

struct FitResult {
    ResonatorModel model;
    ResonatorErrors std_errors;
    double residual_rms = 0.0;  // weighted inverse-space residual
    double initial_residual_rms = 0.0;
    int n_iter = 0;
    Baseline normalization;
};

struct NormalizedSweep {
    std::vector<cplx> s21;
    Baseline baseline;
    std::vector<std::string> warnings;
};

struct FitOptions {
    int max_iter = 200;
    double step_tolerance = 1e-10;  // relative parameter step
};

std::vector<cplx> synthesize_s21(const ResonatorModel& model, const std::vector<double>& freqs);

/// Divides out a baseline fitted on the outer `wing_fraction` of the sweep on
/// each side: log-magnitude and unwrapped phase both linear in frequency.
NormalizedSweep normalize_sweep(const std::vector<double>& freqs, const std::vector<cplx>& s21,
                                double wing_fraction = 0.1);

/// Starting point from the notch: f0 at min |S21|, loaded Q from the width at
/// half power depth, Qc* = Ql / (1 - min|S21|), phi = 0.
ResonatorModel initial_guess(const std::vector<double>& freqs, const std::vector<cplx>& s21_norm);

/// Damped least squares on |S21|^2-weighted residuals of the inverse model.
FitResult fit_resonator(const std::vector<double>& freqs, const std::vector<cplx>& s21_norm,
                        const std::optional<ResonatorModel>& initial = std::nullopt, const FitOptions& opts = {});

struct BaselineFitResult {
    FitResult fit;            // fit.normalization holds the final baseline
    NormalizedSweep sweep;    // data divided by the final baseline; warnings from the wing fit
    int rounds = 0;
};

/// Fits resonator and cable baseline together. Starts from normalize_sweep,
/// then alternates the resonator fit with a |S21|^2-weighted refit of the
/// baseline over the whole sweep against the current model.
BaselineFitResult fit_with_baseline(const std::vector<double>& freqs, const std::vector<cplx>& s21,
                                    double wing_fraction = 0.1, const FitOptions& opts = {});

}  // namespace socketlab
