#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace socketlab {

// ---------------------------------------------------------------------------
// Wire compression

struct CompressionPlan {
    double l_c = 3.05e-3;     // m, cavity clearance
    double stroke = 2.5e-3;   // m, usable wire stroke
    double base = 3.10e-3;    // m, protrusion at k = 0
    double pitch = 0.45e-3;   // m, thread pitch
    int preferred_k = 3;

    void validate() const;
};

struct CompressionSetting {
    int k = 0;
    double protrusion = 0.0;  // m
    bool preferred = false;
};

/// Settings base + pitch k (k >= 1) that fall inside [l_c, l_c + stroke],
/// strictly increasing. Empty when the overrides admit none.
std::vector<CompressionSetting> compression_settings(const CompressionPlan& plan = {});

// ---------------------------------------------------------------------------
// Thermal contraction

/// Delta L = coeff * length.
double contraction(double coeff, double length);

/// Integrated coefficient implied by a contraction over a length.
double implied_coefficient(double delta, double length);

struct ContractionReport {
    double al_delta = 0.0;  // m
    double si_delta = 0.0;  // m
    double bias = 0.0;      // m, |al - si| / 2
};

ContractionReport contraction_report(double al_coeff, double si_coeff, double length);

// ---------------------------------------------------------------------------
// Lattice planning

struct LatticeSpec {
    int n = 1;
    double dist_a = 2.25e-3;
    double dist_b = 3.5e-3;
    double dist_c = 2.25e-3;
    double wire_pitch = 500e-6;
    double max_chip_side = 72e-3;
    double al_coeff = 4.15e-3;
    double si_coeff = 3.2e-6 / 15e-3;

    void validate() const;
};

enum class PadKind { XY, Z, Readout };
std::string to_string(PadKind kind);

struct Pad {
    PadKind kind = PadKind::XY;
    double x = 0.0;
    double y = 0.0;
    int qubit = -1;  // -1 for shared readout pads
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct LatticePlan {
    int n = 0;
    double cell = 0.0;       // m
    double chip_side = 0.0;  // m
    double max_chip_side = 0.0;
    int wires_per_qubit = 3;
    int total_pads = 0;
    int readout_lines = 0;
    std::vector<Point> qubits;
    std::vector<Pad> pads;
    std::vector<CompressionSetting> settings;
    ContractionReport contraction;
};

/// Cell = A + B + C, chip side = (n - 1) cell. Throws ComputationError when
/// the chip exceeds the wafer bound.
LatticePlan plan_lattice(const LatticeSpec& spec, const CompressionPlan& compression = {});

struct WiringScaling {
    long long wirebond_count = 0;
    long long socket_count = 0;
    bool socket_exceeds = false;
};

WiringScaling wiring_scaling(int n);

// ---------------------------------------------------------------------------
// Mating tolerance Monte Carlo

inline constexpr double kDegree = 3.14159265358979323846 / 180.0;

struct ToleranceSpec {
    double lateral_tol = 140e-6;     // m
    double rot_tol = 28.0 * kDegree; // rad
    double machining_sigma = 0.0;    // m
    double dicing_sigma = 0.0;       // m
    double contraction_al_coeff = 0.0;
    double contraction_si_coeff = 0.0;
    double chip_side = 15e-3;        // m
    long long trials = 10000;
    std::uint64_t seed = 1;

    void validate() const;
};

struct Percentiles {
    double p50 = 0.0;
    double p90 = 0.0;
    double p99 = 0.0;
    double max = 0.0;
};

struct YieldReport {
    double yield = 0.0;
    long long trials = 0;
    long long passed = 0;
    double contraction_bias = 0.0;  // m
    Percentiles lateral;            // m
    Percentiles rotation;           // rad, of |rotation|
};

YieldReport mating_yield(const ToleranceSpec& spec);

// ---------------------------------------------------------------------------
// Springs

struct SpringSpec {
    std::string id;
    double coil_diameter = 0.0;  // m
    double wire_diameter = 0.0;  // m
    double free_length = 0.0;    // m
    double coils = 0.0;
    double force_full = 0.0;     // N, at full compression

    /// Free length minus solid height.
    double travel() const { return free_length - coils * wire_diameter; }
};

struct OperatingRange {
    double compression = 2.0e-3;
    std::pair<double, double> inner{0.5, 2.0};
    std::pair<double, double> outer{2.0, 4.0};
};

struct SpringForce {
    double force = 0.0;  // N
    double travel = 0.0; // m
    std::optional<std::pair<double, double>> inner_range;
    std::optional<std::pair<double, double>> outer_range;
};

SpringForce spring_force(const std::vector<SpringSpec>& table, const std::string& id, double compression,
                         const OperatingRange& range = {});

}  // namespace socketlab
