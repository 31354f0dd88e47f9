#include "layout.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace socketlab {

namespace {

void require_finite_nonneg(double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InputError(std::string(name) + " must be non-negative");
}

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InputError(std::string(name) + " must be positive");
}

// splitmix64: one independent stream per trial, keyed on (seed, trial).
struct TrialStream {
    std::uint64_t state;

    TrialStream(std::uint64_t seed, std::uint64_t trial)
        : state(seed * 0x9E3779B97F4A7C15ULL ^ (trial + 0x632BE59BD9B4E019ULL) * 0xD1B54A32D192ED03ULL) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // (0, 1)
    double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

    std::pair<double, double> normal_pair() {
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return {r * std::cos(2.0 * std::numbers::pi * u2), r * std::sin(2.0 * std::numbers::pi * u2)};
    }
};

Percentiles percentiles(std::vector<double> v) {
    Percentiles p;
    if (v.empty()) return p;
    std::sort(v.begin(), v.end());
    auto rank = [&](double q) {
        const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size()))) - 1;
        return v[std::min(idx, v.size() - 1)];
    };
    p.p50 = rank(0.50);
    p.p90 = rank(0.90);
    p.p99 = rank(0.99);
    p.max = v.back();
    return p;
}

}  // namespace

void CompressionPlan::validate() const {
    require_finite_nonneg(l_c, "cavity clearance");
    require_finite_nonneg(stroke, "stroke");
    require_finite_nonneg(base, "base protrusion");
    require_positive(pitch, "thread pitch");
}

std::vector<CompressionSetting> compression_settings(const CompressionPlan& plan) {
    plan.validate();
    const double lo = plan.l_c;
    const double hi = plan.l_c + plan.stroke;
    const double eps = 1e-9 * std::max(hi, plan.pitch);
    std::vector<CompressionSetting> out;
    for (int k = 1;; ++k) {
        const double lp = plan.base + plan.pitch * k;
        if (lp > hi + eps) break;
        if (lp >= lo - eps) out.push_back({k, lp, k == plan.preferred_k});
    }
    return out;
}

double contraction(double coeff, double length) {
    require_positive(length, "length");
    if (!std::isfinite(coeff)) throw InputError("contraction coefficient must be finite");
    return coeff * length;
}

double implied_coefficient(double delta, double length) {
    require_positive(length, "length");
    if (!std::isfinite(delta)) throw InputError("contraction must be finite");
    return delta / length;
}

ContractionReport contraction_report(double al_coeff, double si_coeff, double length) {
    ContractionReport r;
    r.al_delta = contraction(al_coeff, length);
    r.si_delta = contraction(si_coeff, length);
    r.bias = std::abs(r.al_delta - r.si_delta) / 2.0;
    return r;
}

std::string to_string(PadKind kind) {
    switch (kind) {
        case PadKind::XY: return "xy";
        case PadKind::Z: return "z";
        case PadKind::Readout: return "readout";
    }
    return "unknown";
}

void LatticeSpec::validate() const {
    if (n < 1) throw InputError("lattice size n must be >= 1");
    require_positive(dist_a, "distance A");
    require_positive(dist_b, "distance B");
    require_positive(dist_c, "distance C");
    require_positive(wire_pitch, "wire pitch");
    require_positive(max_chip_side, "maximum chip side");
}

LatticePlan plan_lattice(const LatticeSpec& spec, const CompressionPlan& compression) {
    spec.validate();
    LatticePlan plan;
    plan.n = spec.n;
    plan.cell = spec.dist_a + spec.dist_b + spec.dist_c;
    plan.chip_side = (spec.n - 1) * plan.cell;
    plan.max_chip_side = spec.max_chip_side;
    if (plan.chip_side > spec.max_chip_side * (1.0 + 1e-9)) {
        std::ostringstream os;
        os << "chip side " << plan.chip_side * 1e3 << " mm for n = " << spec.n << " exceeds the "
           << spec.max_chip_side * 1e3 << " mm wafer bound (largest n is "
           << static_cast<int>(std::floor(spec.max_chip_side / plan.cell * (1.0 + 1e-9))) + 1 << ")";
        throw ComputationError(os.str());
    }

    const int n = spec.n;
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            const int q = r * n + c;
            const double x = c * plan.cell;
            const double y = r * plan.cell;
            plan.qubits.push_back({x, y});
            const double dx = (n > 1 && c == n - 1) ? -spec.dist_a : spec.dist_a;
            const double dy = (n > 1 && r == n - 1) ? -spec.dist_c : spec.dist_c;
            plan.pads.push_back({PadKind::XY, x + dx, y, q});
            plan.pads.push_back({PadKind::Z, x, y + dy, q});
        }
    }
    const int blocks = (n + 1) / 2;
    for (int br = 0; br < blocks; ++br) {
        for (int bc = 0; bc < blocks; ++bc) {
            double sx = 0.0, sy = 0.0;
            int members = 0;
            for (int r = 2 * br; r < std::min(2 * br + 2, n); ++r)
                for (int c = 2 * bc; c < std::min(2 * bc + 2, n); ++c) {
                    sx += plan.qubits[r * n + c].x;
                    sy += plan.qubits[r * n + c].y;
                    ++members;
                }
            plan.pads.push_back({PadKind::Readout, sx / members, sy / members, -1});
        }
    }
    plan.readout_lines = blocks * blocks;
    plan.total_pads = static_cast<int>(plan.pads.size());
    plan.wires_per_qubit = 3;
    plan.settings = compression_settings(compression);
    const double side = plan.chip_side > 0.0 ? plan.chip_side : plan.cell;
    plan.contraction = contraction_report(spec.al_coeff, spec.si_coeff, side);
    return plan;
}

WiringScaling wiring_scaling(int n) {
    if (n < 1) throw InputError("lattice size n must be >= 1");
    WiringScaling w;
    w.wirebond_count = 4LL * n;
    w.socket_count = static_cast<long long>(n) * n;
    w.socket_exceeds = w.socket_count > w.wirebond_count;
    return w;
}

void ToleranceSpec::validate() const {
    require_finite_nonneg(lateral_tol, "lateral tolerance");
    require_finite_nonneg(rot_tol, "rotational tolerance");
    require_finite_nonneg(machining_sigma, "machining sigma");
    require_finite_nonneg(dicing_sigma, "dicing sigma");
    require_finite_nonneg(contraction_al_coeff, "Al contraction coefficient");
    require_finite_nonneg(contraction_si_coeff, "Si contraction coefficient");
    require_positive(chip_side, "chip side");
    if (trials < 1) throw InputError("trials must be >= 1");
}

YieldReport mating_yield(const ToleranceSpec& spec) {
    spec.validate();
    YieldReport rep;
    rep.trials = spec.trials;
    rep.contraction_bias =
        std::abs(spec.contraction_al_coeff - spec.contraction_si_coeff) * spec.chip_side / 2.0;
    const double slack_half = std::sqrt(3.0) * spec.dicing_sigma;
    const double rot_sigma = std::atan(spec.dicing_sigma / spec.chip_side);

    std::vector<double> lateral(static_cast<std::size_t>(spec.trials));
    std::vector<double> rotation(static_cast<std::size_t>(spec.trials));
    for (long long t = 0; t < spec.trials; ++t) {
        TrialStream rng(spec.seed, static_cast<std::uint64_t>(t));
        const auto [z_mach, z_rot] = rng.normal_pair();
        const double u = 2.0 * rng.uniform() - 1.0;
        const double m = spec.machining_sigma * z_mach;
        const double s = slack_half * u;
        const double lat = std::sqrt(m * m + s * s + rep.contraction_bias * rep.contraction_bias);
        const double rot = std::abs(rot_sigma * z_rot);
        lateral[static_cast<std::size_t>(t)] = lat;
        rotation[static_cast<std::size_t>(t)] = rot;
        if (lat <= spec.lateral_tol && rot <= spec.rot_tol) ++rep.passed;
    }
    rep.yield = static_cast<double>(rep.passed) / static_cast<double>(rep.trials);
    rep.lateral = percentiles(std::move(lateral));
    rep.rotation = percentiles(std::move(rotation));
    return rep;
}

SpringForce spring_force(const std::vector<SpringSpec>& table, const std::string& id, double compression,
                         const OperatingRange& range) {
    const auto it = std::find_if(table.begin(), table.end(), [&](const SpringSpec& s) { return s.id == id; });
    if (it == table.end()) throw InputError("unknown spring '" + id + "'");
    const double travel = it->travel();
    if (!(travel > 0.0)) throw InputError("spring '" + id + "' has no compression travel");
    if (!(compression >= 0.0) || compression > travel * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "compression " << compression * 1e3 << " mm outside [0, " << travel * 1e3 << "] mm for spring '" << id
           << "'";
        throw InputError(os.str());
    }
    SpringForce f;
    f.travel = travel;
    f.force = it->force_full * std::min(compression, travel) / travel;
    if (std::abs(compression - range.compression) <= 1e-9) {
        f.inner_range = range.inner;
        f.outer_range = range.outer;
    }
    return f;
}

}  // namespace socketlab
