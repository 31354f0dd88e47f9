#include "estimators.hpp"

#include "error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace socketlab {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InputError(std::string(name) + " must be positive");
}

}  // namespace

void CavitySpec::validate() const {
    require_positive(a, "cavity dimension a");
    require_positive(b_width, "cavity dimension b");
    require_positive(height_b, "cavity height");
    if (!(eps_r >= 1.0)) throw InputError("relative permittivity must be >= 1");
    if (!(d_s >= 0.0) || !(d_s < height_b)) throw InputError("substrate thickness must lie in [0, height)");
}

double te_mode_frequency(double a, double b, double d, int m, int n, int l, double eps_r) {
    require_positive(a, "cavity dimension a");
    require_positive(b, "cavity dimension b");
    require_positive(d, "cavity dimension d");
    if (!(eps_r >= 1.0)) throw InputError("relative permittivity must be >= 1");
    if (m < 0 || n < 0 || l < 0) throw InputError("mode indices must be non-negative");
    if ((m != 0) + (n != 0) + (l != 0) < 2) throw InputError("a cavity mode needs at least two nonzero indices");
    const double k2 = std::pow(m / a, 2) + std::pow(n / b, 2) + std::pow(l / d, 2);
    return 0.5 * kSpeedOfLightVacuum / std::sqrt(eps_r) * std::sqrt(k2);
}

double perturbed_mode(double f0, double eps_r, double d_s, double b) {
    require_positive(f0, "unperturbed frequency");
    require_positive(b, "cavity height");
    if (!(eps_r >= 1.0)) throw InputError("relative permittivity must be >= 1");
    if (!(d_s >= 0.0) || !(d_s < b)) throw InputError("substrate thickness must lie in [0, b)");
    const double f = f0 - f0 * (eps_r - 1.0) * d_s / (2.0 * b);
    if (!(f > 0.0)) {
        std::ostringstream os;
        os << "perturbation regime violated: (eps_r - 1) d_s / (2 b) = " << (eps_r - 1.0) * d_s / (2.0 * b)
           << " leaves no positive frequency";
        throw ComputationError(os.str());
    }
    return f;
}

std::vector<CavityMode> cavity_modes(const CavitySpec& spec, const std::vector<std::array<int, 3>>& modes) {
    spec.validate();
    std::vector<CavityMode> out;
    for (const auto& idx : modes) {
        CavityMode m;
        m.indices = idx;
        m.vacuum_hz = te_mode_frequency(spec.a, spec.b_width, spec.height_b, idx[0], idx[1], idx[2]);
        m.perturbed_hz = perturbed_mode(m.vacuum_hz, spec.eps_r, spec.d_s, spec.height_b);
        out.push_back(m);
    }
    return out;
}

void DcLineSpec::validate() const {
    require_positive(rho, "resistivity");
    require_positive(length_pp, "line length");
    require_positive(width_w, "trace width");
    require_positive(thickness_d, "film thickness");
    if (!(r_wire_chain >= 0.0)) throw InputError("wire-chain resistance must be non-negative");
    for (const auto& r : {measured_r_io, measured_r_ig, measured_r_og})
        if (r && !(*r >= 0.0)) throw InputError("measured resistances must be non-negative");
}

double trace_resistance(const DcLineSpec& spec) {
    spec.validate();
    return spec.rho * spec.length_pp / (spec.width_w * spec.thickness_d);
}

double contact_resistance_bound(const DcLineSpec& spec) {
    const double rt = trace_resistance(spec);
    if (!spec.measured_r_io) throw InputError("contact-resistance bound needs a measured R_io");
    const double rio = *spec.measured_r_io;
    if (rio < rt) {
        std::ostringstream os;
        os << "inconsistent measurement: R_io = " << rio << " ohm is below the trace resistance " << rt << " ohm";
        throw InputError(os.str());
    }
    return (rio - rt) / 2.0 - spec.r_wire_chain;
}

void ThermalSpec::validate() const {
    if (conductors.empty()) throw InputError("thermal spec has no conductors");
    for (const auto& c : conductors) {
        if (!(c.d_i >= 0.0) || !(c.d_o > c.d_i)) throw InputError("conductor diameters must satisfy d_o > d_i >= 0");
        require_positive(c.k_t, "thermal conductivity");
        require_positive(c.length, "conductor length");
    }
}

double cross_section_area(const ThermalConductor& c) {
    return std::numbers::pi * (c.d_o * c.d_o - c.d_i * c.d_i) / 4.0;
}

double heat_transfer_rate(const ThermalSpec& spec) {
    spec.validate();
    double total = 0.0;
    for (const auto& c : spec.conductors) total += c.k_t * cross_section_area(c) / c.length;
    return total;
}

void MagneticSpec::validate() const {
    require_positive(b_measured, "measured field");
    require_positive(r0, "reference distance");
    require_positive(r_target, "target distance");
    require_positive(loop_area, "loop area");
}

FluxEstimate dipole_field_and_flux(const MagneticSpec& spec) {
    spec.validate();
    FluxEstimate e;
    e.b_target = spec.b_measured * std::pow(spec.r0 / spec.r_target, 3);
    e.flux = e.b_target * spec.loop_area;
    e.flux_ratio = e.flux / kFluxQuantum;
    return e;
}

}  // namespace socketlab
