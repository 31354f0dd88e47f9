#include "constants.hpp"
#include "error.hpp"
#include "resfit.hpp"

#include "support/gen.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace socketlab;

namespace {

std::vector<double> sweep(const ResonatorModel& m, std::size_t n = 801, double half_widths = 6.0) {
    const double span = half_widths * m.f0 / m.loaded_q();
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i)
        f[i] = m.f0 - span + 2.0 * span * static_cast<double>(i) / static_cast<double>(n - 1);
    return f;
}

ResonatorModel reference_model() {
    const auto& r = bundled_constants().at("resonator_fit_reference");
    return {r.at("f0_hz").get<double>(), r.at("q_i").get<double>(), r.at("q_c_star").get<double>(),
            r.at("phi_rad").get<double>()};
}

std::vector<ResonatorModel> table_models() {
    std::vector<ResonatorModel> out;
    for (const auto& r : bundled_constants().at("resonators"))
        out.push_back({r.at("f0_hz").get<double>(), r.at("q_i").get<double>(), r.at("q_c_star").get<double>(), 0.0});
    return out;
}

void check_recovered(const ResonatorModel& got, const ResonatorModel& want) {
    CHECK(got.f0 == doctest::Approx(want.f0).epsilon(1e-4));
    CHECK(got.q_i == doctest::Approx(want.q_i).epsilon(0.01));
    CHECK(got.q_c_star == doctest::Approx(want.q_c_star).epsilon(0.01));
    CHECK(std::abs(got.phi - want.phi) < 0.01);
}

double median_qi(const ResonatorModel& m, double sigma, std::uint64_t seed, int trials) {
    testgen::Rng rng(seed);
    const auto f = sweep(m);
    const auto clean = synthesize_s21(m, f);
    std::vector<double> qi;
    for (int t = 0; t < trials; ++t) {
        auto s = clean;
        for (auto& v : s) v += rng.complex_normal(sigma);
        qi.push_back(fit_resonator(f, s).model.q_i);
    }
    std::nth_element(qi.begin(), qi.begin() + trials / 2, qi.end());
    return qi[static_cast<std::size_t>(trials / 2)];
}

}  // namespace

TEST_CASE("closed form at resonance") {
    const ResonatorModel m{5e9, 2e5, 2e4, 0.1};
    const auto s = synthesize_s21(m, {5e9});
    const cplx want = 1.0 / (1.0 + (m.q_i / m.q_c_star) * std::exp(cplx(0.0, m.phi)));
    CHECK(s[0] == want);
}

TEST_CASE("noiseless fit of the reference parameters") {
    const auto m = reference_model();
    const auto f = sweep(m);
    const auto r = fit_resonator(f, synthesize_s21(m, f));
    check_recovered(r.model, m);
    CHECK(r.residual_rms <= r.initial_residual_rms);
}

TEST_CASE("noiseless fit of every table resonator") {
    for (const auto& m : table_models()) {
        const auto f = sweep(m);
        check_recovered(fit_resonator(f, synthesize_s21(m, f)).model, m);
    }
}

TEST_CASE("noiseless roundtrip over Qi/Qc* in [0.1, 50]") {
    testgen::Rng rng(100);
    for (int trial = 0; trial < 60; ++trial) {
        ResonatorModel m;
        m.f0 = rng.uniform(3e9, 9e9);
        m.q_c_star = std::exp(rng.uniform(std::log(2e3), std::log(5e4)));
        m.q_i = m.q_c_star * std::exp(rng.uniform(std::log(0.1), std::log(50.0)));
        m.phi = rng.uniform(-0.5, 0.5);
        const auto f = sweep(m);
        const auto r = fit_resonator(f, synthesize_s21(m, f));
        INFO("Qi/Qc* = ", m.q_i / m.q_c_star);
        check_recovered(r.model, m);
        CHECK(r.residual_rms <= r.initial_residual_rms);
    }
}

TEST_CASE("median Qi under noise") {
    auto models = table_models();
    models.insert(models.begin(), reference_model());
    std::uint64_t seed = 1;
    for (const auto& m : models) {
        const double med = median_qi(m, 0.01, seed++, 100);
        INFO("f0 = ", m.f0);
        CHECK(med == doctest::Approx(m.q_i).epsilon(0.05));
    }
}

TEST_CASE("standard errors scale with noise") {
    const auto m = reference_model();
    const auto f = sweep(m);
    const auto clean = synthesize_s21(m, f);
    auto fit_with = [&](double sigma) {
        testgen::Rng rng(9);
        auto s = clean;
        for (auto& v : s) v += rng.complex_normal(sigma);
        return fit_resonator(f, s).std_errors;
    };
    const auto a = fit_with(0.005), b = fit_with(0.01);
    CHECK(b.q_i / a.q_i == doctest::Approx(2.0).epsilon(0.3));
    CHECK(b.q_c_star / a.q_c_star == doctest::Approx(2.0).epsilon(0.3));
    CHECK(b.f0 / a.f0 == doctest::Approx(2.0).epsilon(0.3));
    CHECK(b.phi / a.phi == doctest::Approx(2.0).epsilon(0.3));
}

TEST_CASE("normalization removes a cable baseline and is idempotent") {
    const auto m = reference_model();
    const auto f = sweep(m);
    auto s = synthesize_s21(m, f);
    for (std::size_t i = 0; i < f.size(); ++i)
        s[i] *= std::exp(cplx(std::log(0.025) + 3e-7 * (f[i] - m.f0) / 1e3, 0.7 - 2.0 * std::numbers::pi * f[i] * 48e-9));
    const auto once = normalize_sweep(f, s);
    const auto twice = normalize_sweep(f, once.s21);
    double worst = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) worst = std::max(worst, std::abs(twice.s21[i] - once.s21[i]));
    CHECK(worst < 1e-12);
    const auto joint = fit_with_baseline(f, s);
    check_recovered(joint.fit.model, m);
    CHECK(joint.fit.normalization.phase_slope == doctest::Approx(-2.0 * std::numbers::pi * 48e-9).epsilon(1e-6));
}

TEST_CASE("joint baseline fit on the noisy fixture sweep") {
    std::ifstream in(SOCKETLAB_FIXTURES "/sweep.csv");
    std::stringstream ss;
    ss << in.rdbuf();
    const auto cols = read_numeric_csv(ss.str(), 3);
    std::vector<cplx> s(cols[0].size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = {cols[1][i], cols[2][i]};
    const auto r = fit_with_baseline(cols[0], s);
    const auto m = reference_model();
    CHECK(r.fit.model.f0 == doctest::Approx(m.f0).epsilon(1e-6));
    CHECK(r.fit.model.q_i == doctest::Approx(m.q_i).epsilon(0.05));
    CHECK(r.fit.model.q_c_star == doctest::Approx(m.q_c_star).epsilon(0.02));
    CHECK(std::abs(r.fit.model.phi - m.phi) < 0.02);
}

TEST_CASE("initial guess lands near the notch") {
    const auto m = reference_model();
    const auto f = sweep(m);
    const auto g = initial_guess(f, synthesize_s21(m, f));
    CHECK(g.f0 == doctest::Approx(m.f0).epsilon(1e-5));
    CHECK(g.loaded_q() == doctest::Approx(m.loaded_q()).epsilon(0.2));
}

TEST_CASE("invalid inputs") {
    CHECK_THROWS_AS(ResonatorModel({-1.0, 1e4, 1e4, 0.0}).validate(), InputError);
    CHECK_THROWS_AS(fit_resonator({1.0, 2.0}, {cplx(1.0), cplx(1.0)}), InputError);
    CHECK_THROWS_AS(normalize_sweep({1.0, 2.0, 3.0}, {cplx(1.0), cplx(1.0)}), InputError);
}
