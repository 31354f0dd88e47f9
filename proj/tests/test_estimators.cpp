#include "constants.hpp"
#include "error.hpp"
#include "estimators.hpp"

#include "support/gen.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace socketlab;

namespace {

std::vector<DcLineSpec> table_lines() {
    const auto& dc = bundled_constants().at("dc_lines");
    std::vector<DcLineSpec> out;
    for (const auto& s : dc.at("samples")) {
        DcLineSpec l;
        l.rho = s.at("rho_ohm_m").get<double>();
        l.length_pp = dc.at("length_pp_m").get<double>();
        l.width_w = s.at("width_m").get<double>();
        l.thickness_d = s.at("thickness_m").get<double>();
        l.measured_r_io = s.at("r_io_ohm").get<double>();
        out.push_back(l);
    }
    return out;
}

ThermalConductor conductor(const nlohmann::json& c, double length) {
    return {c.at("d_i_m").get<double>(), c.at("d_o_m").get<double>(), c.at("k_t_w_per_k_m").get<double>(), length};
}

}  // namespace

TEST_CASE("trace resistance reproduces the DC table") {
    const auto lines = table_lines();
    const double expected[] = {253.0, 126.5, 26.16, 2.04, 166.1};
    REQUIRE(lines.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        const double oracle = lines[i].rho * lines[i].length_pp / (lines[i].width_w * lines[i].thickness_d);
        CHECK(trace_resistance(lines[i]) == doctest::Approx(oracle).epsilon(1e-14));
        CHECK(trace_resistance(lines[i]) == doctest::Approx(expected[i]).epsilon(0.005));
    }
}

TEST_CASE("contact resistance bound") {
    const auto lines = table_lines();
    CHECK(contact_resistance_bound(lines[3]) == doctest::Approx(0.335).epsilon(0.02 / 0.335));
    CHECK(contact_resistance_bound(lines[3]) == doctest::Approx((2.71 - 16e-9 * 11.5e-3 / (30e-6 * 3e-6)) / 2.0));
    // Measured below the trace estimate: no bound.
    CHECK_THROWS_AS(contact_resistance_bound(lines[0]), InputError);
    auto no_meas = lines[3];
    no_meas.measured_r_io.reset();
    CHECK_THROWS_AS(contact_resistance_bound(no_meas), InputError);
    auto with_wire = lines[3];
    with_wire.r_wire_chain = 0.1;
    CHECK(contact_resistance_bound(with_wire) == doctest::Approx(contact_resistance_bound(lines[3]) - 0.1));
}

TEST_CASE("thermal areas and rate") {
    const auto& th = bundled_constants().at("thermal");
    const double len = th.at("wire_length_m").get<double>();
    const auto& cs = th.at("conductors");
    CHECK(cross_section_area(conductor(cs[0], len)) == doctest::Approx(4.74e-8).epsilon(0.005));
    CHECK(cross_section_area(conductor(cs[1], len)) == doctest::Approx(7.13e-7).epsilon(0.005));
    ThermalSpec spec;
    for (const auto& c : cs) spec.conductors.push_back(conductor(c, len));
    CHECK(heat_transfer_rate(spec) == doctest::Approx(6e-7).epsilon(0.10));
    const ThermalConductor solid{0.0, 2e-3, 1.0, 1.0};
    CHECK(cross_section_area(solid) == doctest::Approx(std::numbers::pi * 1e-6));
}

TEST_CASE("heat transfer is additive and scales as 1/length") {
    testgen::Rng rng(6);
    for (int trial = 0; trial < 200; ++trial) {
        ThermalSpec a, b, both;
        const double len = rng.uniform(1e-3, 0.1);
        for (int k = 0; k < 3; ++k) {
            const double di = rng.uniform(0.0, 1e-3);
            const ThermalConductor c{di, di + rng.uniform(1e-5, 1e-3), rng.uniform(1e-4, 1.0), len};
            (k % 2 ? a : b).conductors.push_back(c);
            both.conductors.push_back(c);
        }
        CHECK(heat_transfer_rate(both) == doctest::Approx(heat_transfer_rate(a) + heat_transfer_rate(b)).epsilon(1e-12));
        ThermalSpec twice = both;
        for (auto& c : twice.conductors) c.length *= 2.0;
        CHECK(heat_transfer_rate(twice) == doctest::Approx(heat_transfer_rate(both) / 2.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(heat_transfer_rate({{{2e-3, 1e-3, 1.0, 1.0}}}), InputError);
    CHECK_THROWS_AS(heat_transfer_rate({{{0.0, 1e-3, 0.0, 1.0}}}), InputError);
}

TEST_CASE("dipole field and flux") {
    const auto& mg = bundled_constants().at("magnetics");
    const MagneticSpec spec{mg.at("b_measured_t").get<double>(), mg.at("r0_m").get<double>(),
                            mg.at("r_target_m").get<double>(), mg.at("squid_loop_m2").get<double>()};
    const auto est = dipole_field_and_flux(spec);
    CHECK(est.b_target / 1e-7 == doctest::Approx(0.075).epsilon(0.02));  // mG
    CHECK(est.flux / 4e-18 > 1.0 / 1.5);
    CHECK(est.flux / 4e-18 < 1.5);
    CHECK(est.flux_ratio == doctest::Approx(est.flux / kFluxQuantum));
    CHECK(kFluxQuantum == doctest::Approx(2.07e-15).epsilon(0.005));
}

TEST_CASE("dipole field obeys the cube law") {
    testgen::Rng rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        MagneticSpec s{rng.uniform(1e-9, 1e-5), rng.uniform(1e-3, 0.1), rng.uniform(1e-3, 0.1), 1e-10};
        const double b1 = dipole_field_and_flux(s).b_target;
        s.r_target *= 2.0;
        CHECK(dipole_field_and_flux(s).b_target == doctest::Approx(b1 / 8.0).epsilon(1e-14));
    }
    CHECK_THROWS_AS(dipole_field_and_flux({0.0, 1.0, 1.0, 1.0}), InputError);
}

TEST_CASE("rectangular cavity modes") {
    const double f110 = te_mode_frequency(13e-3, 13e-3, 2e-3, 1, 1, 0);
    CHECK(f110 == doctest::Approx(kSpeedOfLightVacuum / 2.0 * std::sqrt(2.0) / 13e-3).epsilon(1e-15));
    CHECK(f110 == doctest::Approx(15.7e9).epsilon(0.10));
    CHECK(te_mode_frequency(13e-3, 13e-3, 2e-3, 1, 2, 0) == te_mode_frequency(13e-3, 13e-3, 2e-3, 2, 1, 0));
    CHECK(te_mode_frequency(13e-3, 13e-3, 2e-3, 1, 1, 0, 4.0) == doctest::Approx(f110 / 2.0));
    CHECK_THROWS_AS(te_mode_frequency(13e-3, 13e-3, 2e-3, 1, 0, 0), InputError);
    CHECK_THROWS_AS(te_mode_frequency(0.0, 13e-3, 2e-3, 1, 1, 0), InputError);
}

TEST_CASE("cavity modes are monotone in each index and symmetric in a square") {
    testgen::Rng rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        const double a = rng.uniform(5e-3, 30e-3), b = rng.uniform(5e-3, 30e-3), d = rng.uniform(1e-3, 5e-3);
        const int m = rng.integer(1, 5), n = rng.integer(1, 5), l = rng.integer(0, 3);
        const double f = te_mode_frequency(a, b, d, m, n, l);
        CHECK(te_mode_frequency(a, b, d, m + 1, n, l) >= f);
        CHECK(te_mode_frequency(a, b, d, m, n + 1, l) >= f);
        CHECK(te_mode_frequency(a, b, d, m, n, l + 1) >= f);
        CHECK(te_mode_frequency(a, a, d, m, n, l) == te_mode_frequency(a, a, d, n, m, l));
    }
}

TEST_CASE("dielectric perturbation") {
    CHECK(perturbed_mode(15.7e9, 1.0, 0.5e-3, 2e-3) == 15.7e9);
    CHECK(perturbed_mode(15.7e9, 11.68, 0.0, 2e-3) == 15.7e9);
    testgen::Rng rng(14);
    for (int trial = 0; trial < 200; ++trial) {
        const double b = 2e-3, ds = rng.uniform(0.0, 0.05e-3), er = rng.uniform(1.0, 12.0);
        const double f = perturbed_mode(10e9, er, ds, b);
        CHECK(perturbed_mode(10e9, er + 0.5, ds, b) <= f);
        CHECK(perturbed_mode(10e9, er, ds + 1e-6, b) <= f);
    }
    CHECK_THROWS_AS(perturbed_mode(15.7e9, 11.68, 0.55e-3, 2e-3), ComputationError);
    CHECK_THROWS_AS(perturbed_mode(15.7e9, 0.5, 0.1e-3, 2e-3), InputError);
    CHECK_THROWS_AS(perturbed_mode(15.7e9, 2.0, 3e-3, 2e-3), InputError);
}
