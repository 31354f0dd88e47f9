#pragma once

#include <array>
#include <optional>
#include <vector>

namespace socketlab {

inline constexpr double kSpeedOfLightVacuum = 299792458.0;  // m/s
inline constexpr double kFluxQuantum = 2.067833848e-15;     // Wb, CODATA h/2e

// ---------------------------------------------------------------------------
// Package cavity modes

struct CavitySpec {
    double a = 0.0;         // m, x extent
    double b_width = 0.0;   // m, y extent
    double height_b = 0.0;  // m, z extent (cavity height)
    double eps_r = 1.0;     // substrate relative permittivity
    double d_s = 0.0;       // m, substrate thickness

    void validate() const;
};

/// Resonance of the TE_mnl mode of a rectangular cavity with dimensions a x b x d.
/// A uniform filling `eps_r` scales the result by 1/sqrt(eps_r).
double te_mode_frequency(double a, double b, double d, int m, int n, int l, double eps_r = 1.0);

/// Small-perturbation shift of a cavity mode by a dielectric slab of thickness
/// d_s on the floor of a cavity of height b: f0 - f0 (eps_r - 1) d_s / (2 b).
double perturbed_mode(double f0, double eps_r, double d_s, double b);

struct CavityMode {
    std::array<int, 3> indices{};
    double vacuum_hz = 0.0;
    double perturbed_hz = 0.0;
};

/// Vacuum and substrate-perturbed frequencies for each requested mode.
std::vector<CavityMode> cavity_modes(const CavitySpec& spec, const std::vector<std::array<int, 3>>& modes);

// ---------------------------------------------------------------------------
// DC Pi-network of a CPW test line

struct DcLineSpec {
    double rho = 0.0;          // ohm m
    double length_pp = 0.0;    // m, pad-to-pad
    double width_w = 0.0;      // m, center trace width
    double thickness_d = 0.0;  // m, film thickness
    double r_wire_chain = 0.0; // ohm, wire + cable inner conductor (usually neglected)
    std::optional<double> measured_r_io;
    std::optional<double> measured_r_ig;
    std::optional<double> measured_r_og;

    void validate() const;
};

/// R^t = rho L / (W d). The Ti adhesion layer's parallel path is ignored.
double trace_resistance(const DcLineSpec& spec);

/// Upper bound on the per-interface contact resistance from
/// R_io = R^t + 2 (R^c + R^wc).
double contact_resistance_bound(const DcLineSpec& spec);

// ---------------------------------------------------------------------------
// Heat transfer through wire conductors

struct ThermalConductor {
    double d_i = 0.0;     // m, inner diameter (0 for a solid cylinder)
    double d_o = 0.0;     // m, outer diameter
    double k_t = 0.0;     // W / (K m)
    double length = 0.0;  // m
};

struct ThermalSpec {
    std::vector<ThermalConductor> conductors;
    void validate() const;
};

double cross_section_area(const ThermalConductor& c);

/// Sum over conductors of k_t A / length, in W/K.
double heat_transfer_rate(const ThermalSpec& spec);

// ---------------------------------------------------------------------------
// Stray field of a wire treated as a magnetic dipole

struct MagneticSpec {
    double b_measured = 0.0;  // T, field at distance r0
    double r0 = 0.0;          // m
    double r_target = 0.0;    // m
    double loop_area = 0.0;   // m^2

    void validate() const;
};

struct FluxEstimate {
    double b_target = 0.0;    // T
    double flux = 0.0;        // Wb
    double flux_ratio = 0.0;  // flux / flux quantum
};

FluxEstimate dipole_field_and_flux(const MagneticSpec& spec);

}  // namespace socketlab
