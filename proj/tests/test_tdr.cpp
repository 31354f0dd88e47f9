#include "error.hpp"
#include "tdr.hpp"

#include "support/gen.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

using namespace socketlab;

namespace {

double xi_of(double z, double zc) { return (z - zc) / (z + zc); }

ImpedanceProfile profile(std::initializer_list<LineSegment> segs, double zs = 50.0) {
    ImpedanceProfile p;
    p.segments = segs;
    p.z_source = zs;
    return p;
}

double total_delay(const ImpedanceProfile& p) {
    double d = 0.0;
    for (const auto& s : p.segments) d += s.one_way_delay;
    return d;
}

}  // namespace

TEST_CASE("reflection ratio and impedance inversion") {
    CHECK(reflection_ratio(0.25, 0.25) == 0.0);
    CHECK(reflection_ratio(0.5, 0.25) == 1.0);
    CHECK_THROWS_AS(reflection_ratio(0.1, 0.0), InputError);
    CHECK(instantaneous_impedance(0.0, 50.0) == 50.0);
    CHECK(instantaneous_impedance(1.0, 50.0) == kOpenMarker);
    CHECK(instantaneous_impedance(-1.0, 50.0) == 0.0);
}

TEST_CASE("Z(xi(Z)) = Z") {
    testgen::Rng rng(1);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double zc = rng.uniform(10.0, 100.0);
        const double z = std::exp(rng.uniform(std::log(0.5), std::log(2000.0)));
        worst = std::max(worst, std::abs(instantaneous_impedance(xi_of(z, zc), zc) - z) / z);
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("Z is strictly increasing in xi") {
    double prev = instantaneous_impedance(-0.999, 50.0);
    for (int i = -998; i < 999; ++i) {
        const double z = instantaneous_impedance(i / 1000.0, 50.0);
        CHECK(z > prev);
        prev = z;
    }
}

TEST_CASE("impedance_from_trace maps every sample") {
    TdrTrace t;
    t.times = {0.0, 1e-12, 2e-12};
    t.v_meas = {0.25, 0.25 * (1 + xi_of(60, 50)), 0.25 * (1 + xi_of(40, 50))};
    const auto z = impedance_from_trace(t, 50.0);
    CHECK(z[0] == doctest::Approx(50.0));
    CHECK(z[1] == doctest::Approx(60.0).epsilon(1e-12));
    CHECK(z[2] == doctest::Approx(40.0).epsilon(1e-12));
}

TEST_CASE("first-order synthesis places each level at its round-trip time") {
    const auto p = profile({{0.3e-9, 50.0, 0.0}, {0.2e-9, 60.0, 0.0}, {0.5e-9, 50.0, 0.0}});
    const auto tr = synthesize_trace(p, 0.25, 1e-12, 2e-9);
    const auto z = impedance_from_trace(tr, 50.0);
    auto z_at = [&](double t) { return z[static_cast<std::size_t>(std::lround(t / 1e-12))]; };
    CHECK(z_at(0.3e-9) == doctest::Approx(50.0).epsilon(1e-12));
    CHECK(z_at(0.8e-9) == doctest::Approx(60.0).epsilon(1e-12));
    CHECK(z_at(1.5e-9) == doctest::Approx(50.0).epsilon(1e-12));
}

TEST_CASE("multi-order synthesis matches the bounce-diagram oracle") {
    const double g1 = xi_of(60.0, 50.0), g2 = xi_of(50.0, 60.0);
    const auto p = profile({{0.3e-9, 50.0, 0.0}, {0.2e-9, 60.0, 0.0}, {0.5e-9, 50.0, 0.0}});
    const auto tr = synthesize_trace(p, 0.25, 1e-12, 2e-9, SynthesisOrder::Multi);
    auto v_at = [&](double t) { return tr.v_meas[static_cast<std::size_t>(std::lround(t / 1e-12))]; };
    CHECK(v_at(0.7e-9) == doctest::Approx(0.25 * (1 + g1)).epsilon(1e-12));
    // Second interface seen through the first; the next echo arrives 0.4 ns later.
    CHECK(v_at(1.1e-9) == doctest::Approx(0.25 * (1 + g1 + (1 - g1 * g1) * g2)).epsilon(1e-12));
    const double echo = (1 - g1 * g1) * g2 * (-g1) * g2;
    CHECK(v_at(1.5e-9) == doctest::Approx(0.25 * (1 + g1 + (1 - g1 * g1) * g2 + echo)).epsilon(1e-12));
}

TEST_CASE("multi-order of a single small step agrees with first order to O(xi^2)") {
    testgen::Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const double z2 = 50.0 + rng.uniform(-10.0, 10.0);
        const auto p = profile({{0.2e-9, 50.0, 0.0}, {0.3e-9, z2, 0.0}});
        const auto a = synthesize_trace(p, 0.25, 1e-12, 1e-9);
        const auto b = synthesize_trace(p, 0.25, 1e-12, 1e-9, SynthesisOrder::Multi);
        const double xi = xi_of(z2, 50.0);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a.v_meas[i] - b.v_meas[i]) <= 0.25 * xi * xi + 1e-15);
    }
}

TEST_CASE("synthesize then extract recovers 50/60/50") {
    const auto p = profile({{0.3e-9, 50.0, 0.0}, {0.2e-9, 60.0, 0.0}, {0.5e-9, 50.0, 0.0}});
    const auto tr = synthesize_trace(p, 0.25, 1e-12, 2.5 * total_delay(p));
    const auto got = profile_from_trace(tr, 50.0);
    REQUIRE(got.segments.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(got.segments[i].z == doctest::Approx(p.segments[i].z).epsilon(0.01));
        CHECK(got.segments[i].r_series == doctest::Approx(0.0));
    }
    CHECK(got.segments[0].one_way_delay == doctest::Approx(0.3e-9).epsilon(0.01));
    CHECK(got.segments[1].one_way_delay == doctest::Approx(0.2e-9).epsilon(0.01));
}

TEST_CASE("random small-step profiles roundtrip within 1%") {
    testgen::Rng rng(77);
    for (int trial = 0; trial < 40; ++trial) {
        ImpedanceProfile p;
        double z = 50.0;
        const int n = rng.integer(2, 5);
        for (int k = 0; k < n; ++k) {
            p.segments.push_back({rng.uniform(0.1e-9, 0.4e-9), z, 0.0});
            z += (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(3.0, 10.0);
        }
        p.segments.push_back({0.5e-9, z, 0.0});
        const auto tr = synthesize_trace(p, 0.25, 1e-12, 2.2 * total_delay(p));
        const auto got = profile_from_trace(tr, 50.0);
        REQUIRE(got.segments.size() == p.segments.size());
        for (std::size_t i = 0; i < p.segments.size(); ++i)
            CHECK(got.segments[i].z == doctest::Approx(p.segments[i].z).epsilon(0.01));
    }
}

TEST_CASE("lossy segment rise equals its series resistance") {
    // Pad-to-pad DC resistance of the 200 nm Au line.
    const auto p = profile({{0.3e-9, 50.0, 0.0}, {0.4e-9, 50.0, 98.0}, {0.5e-9, 50.0, 0.0}});
    const auto tr = synthesize_trace(p, 0.25, 1e-12, 2.5 * total_delay(p));
    const auto got = profile_from_trace(tr, 50.0);
    double rise = 0.0;
    for (const auto& s : got.segments) rise += s.r_series;
    CHECK(rise == doctest::Approx(98.0).epsilon(0.01));
}

TEST_CASE("noisy fixture with finite rise time") {
    std::ifstream in(SOCKETLAB_FIXTURES "/tdr.csv");
    std::stringstream ss;
    ss << in.rdbuf();
    const auto tr = parse_tdr_csv(ss.str());
    const auto got = profile_from_trace(tr, 50.0);
    REQUIRE(got.segments.size() == 3);
    CHECK(got.segments[0].z == doctest::Approx(50.0).epsilon(0.01));
    CHECK(got.segments[1].z == doctest::Approx(60.0).epsilon(0.01));
    CHECK(got.segments[2].z == doctest::Approx(50.0).epsilon(0.01));
    CHECK(got.segments[1].one_way_delay == doctest::Approx(0.2e-9).epsilon(0.02));
}

TEST_CASE("segment lengths and validation") {
    const auto p = profile({{1e-9, 50.0, 0.0}});
    CHECK(segment_lengths(p, 0.5)[0] == doctest::Approx(0.5 * 299792458.0 * 1e-9));
    CHECK_THROWS_AS(segment_lengths(p, 0.0), InputError);
    CHECK_THROWS_AS(profile({{-1e-9, 50.0, 0.0}}).validate(), InputError);
    CHECK_THROWS_AS(profile({{1e-9, 0.0, 0.0}}).validate(), InputError);
    CHECK_THROWS_AS(synthesize_trace(p, 0.25, 0.0, 1e-9), InputError);
}
