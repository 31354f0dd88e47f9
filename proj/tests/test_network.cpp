#include "error.hpp"
#include "network.hpp"
#include "resfit.hpp"

#include "support/gen.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace socketlab;
using std::numbers::pi;

namespace {

// Two-port S -> Z from the textbook closed form, independent of the matrix path.
Eigen::Matrix2cd z_oracle(const Eigen::Matrix2cd& s, double z0) {
    const cplx s11 = s(0, 0), s12 = s(0, 1), s21 = s(1, 0), s22 = s(1, 1);
    const cplx d = (1.0 - s11) * (1.0 - s22) - s12 * s21;
    Eigen::Matrix2cd z;
    z(0, 0) = z0 * ((1.0 + s11) * (1.0 - s22) + s12 * s21) / d;
    z(0, 1) = z0 * 2.0 * s12 / d;
    z(1, 0) = z0 * 2.0 * s21 / d;
    z(1, 1) = z0 * ((1.0 - s11) * (1.0 + s22) + s12 * s21) / d;
    return z;
}

NetworkData two_port_from_s21(const std::vector<double>& f, const std::vector<cplx>& s21) {
    NetworkData net;
    net.ports = 2;
    net.freqs = f;
    for (const auto& v : s21) {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
        m(1, 0) = m(0, 1) = v;
        net.s.push_back(m);
    }
    return net;
}

std::vector<double> grid(double lo, double hi, std::size_t n) {
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return f;
}

}  // namespace

TEST_CASE("S to Z to S roundtrip on random 2- and 4-port matrices") {
    testgen::Rng rng(2024);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int ports = trial % 2 ? 4 : 2;
        const Eigen::MatrixXcd s = rng.matrix(ports, rng.uniform(0.0, 0.9));
        const Eigen::MatrixXcd back = s_from_z(z_from_s(s, 50.0), 50.0);
        worst = std::max(worst, (back - s).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("two-port Z matches the closed-form oracle") {
    testgen::Rng rng(7);
    for (int trial = 0; trial < 500; ++trial) {
        const Eigen::Matrix2cd s = rng.matrix(2, rng.uniform(0.0, 0.9));
        const double z0 = rng.uniform(25.0, 100.0);
        const Eigen::MatrixXcd z = z_from_s(s, z0);
        CHECK((z - Eigen::MatrixXcd(z_oracle(s, z0))).cwiseAbs().maxCoeff() < 1e-9 * z0);
    }
}

TEST_CASE("input impedance of a matched through line is the load") {
    // Lossless quarter-wave of 50 ohm: Z_in = Z_L for a matched load either sign.
    const cplx j(0.0, 1.0);
    Eigen::Matrix2cd s;
    s << 0.0, -j, -j, 0.0;
    const Eigen::Matrix2cd z = z_from_s(Eigen::MatrixXcd(s), 50.0);
    const cplx zin = input_impedance(z, 50.0);
    CHECK(std::abs(zin - cplx(50.0, 0.0)) < 1e-9);
    // Quarter-wave transformer: Z_in = Z0^2 / Z_L.
    const cplx zin2 = input_impedance(z, 100.0);
    CHECK(std::abs(zin2 - cplx(25.0, 0.0)) < 1e-9);
    const cplx printed = input_impedance(z, 100.0, LoadSign::AsPrinted);
    CHECK(std::abs(printed - (z(0, 0) - z(0, 1) * z(1, 0) / (z(1, 1) - 100.0))) < 1e-9);
}

TEST_CASE("VSWR") {
    CHECK(vswr(0.0) == 1.0);
    const double g = std::pow(10.0, -13.8 / 20.0);
    CHECK(vswr(g) == doctest::Approx(1.513).epsilon(0.001 / 1.513));
    double prev = 1.0;
    for (int i = 1; i < 1000; ++i) {
        const double v = vswr(cplx(0.0, i / 1000.0));
        CHECK(v > prev);
        prev = v;
    }
    CHECK_THROWS(vswr(1.0));
}

TEST_CASE("stencil is exact on polynomials up to degree 6") {
    testgen::Rng rng(99);
    for (int degree = 0; degree <= 6; ++degree) {
        std::vector<double> c(static_cast<std::size_t>(degree) + 1);
        for (auto& v : c) v = rng.uniform(-1.0, 1.0);
        const double h = 0.01;
        std::vector<double> y(60), dy(60);
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double x = -0.3 + h * static_cast<double>(i);
            double p = 0.0, dp = 0.0;
            for (int k = degree; k >= 0; --k) {
                dp = dp * x + p;
                p = p * x + c[static_cast<std::size_t>(k)];
            }
            y[i] = p;
            dy[i] = dp;
        }
        const auto d = derivative_6th_order(y, h);
        for (std::size_t i = 0; i < y.size(); ++i) CHECK(std::abs(d[i] - dy[i]) < 1e-10);
    }
}

TEST_CASE("group delay exact on polynomial phase") {
    const auto f = grid(1e9, 2e9, 201);
    testgen::Rng rng(4);
    for (int degree = 1; degree <= 6; ++degree) {
        std::vector<double> c(static_cast<std::size_t>(degree) + 1);
        for (auto& v : c) v = rng.uniform(-3.0, 3.0);
        std::vector<cplx> s21;
        std::vector<double> tau;
        for (double fi : f) {
            const double x = (fi - 1.5e9) / 1e9;
            double p = 0.0, dp = 0.0;
            for (int k = degree; k >= 0; --k) {
                dp = dp * x + p;
                p = p * x + c[static_cast<std::size_t>(k)];
            }
            s21.push_back(std::polar(0.9, p));
            tau.push_back(-dp / 1e9 / (2.0 * pi));
        }
        const auto gd = group_delay(two_port_from_s21(f, s21), 2, 1, false);
        double worst = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) worst = std::max(worst, std::abs(gd[i] - tau[i]));
        CHECK(worst <= 1e-15);
    }
}

TEST_CASE("stencil converges as h^6 on a sinusoid") {
    auto max_err = [](double h) {
        std::vector<double> y, dy;
        for (double x = 0.0; x <= 2.0 + 1e-12; x += h) {
            y.push_back(std::sin(3.0 * x));
            dy.push_back(3.0 * std::cos(3.0 * x));
        }
        const auto d = derivative_6th_order(y, h);
        double e = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) e = std::max(e, std::abs(d[i] - dy[i]));
        return e;
    };
    const double e1 = max_err(0.04), e2 = max_err(0.02);
    const double order = std::log2(e1 / e2);
    CHECK(order > 5.5);
    CHECK(order < 6.8);
}

TEST_CASE("linear phase: phase delay equals group delay equals tau") {
    const double tau = 0.55e-9;
    const auto f = grid(10e6, 10e9, 1000);
    std::vector<cplx> s21;
    for (double fi : f) s21.push_back(std::exp(cplx(0.0, -2.0 * pi * fi * tau)));
    const auto net = two_port_from_s21(f, s21);
    const auto pd = phase_delay(net);
    const auto gd = group_delay(net);
    for (std::size_t i = 0; i < f.size(); ++i) {
        CHECK(pd[i] == doctest::Approx(tau).epsilon(1e-9));
        CHECK(gd[i] == doctest::Approx(tau).epsilon(1e-9));
    }
}

TEST_CASE("group delay rejects non-uniform grids and resample fixes them") {
    auto f = grid(1e9, 2e9, 50);
    f[10] += 1e6;
    std::vector<cplx> s21;
    for (double fi : f) s21.push_back(std::exp(cplx(0.0, -2.0 * pi * fi * 1e-9)));
    const auto net = two_port_from_s21(f, s21);
    CHECK_THROWS_AS(group_delay(net), InputError);
    const auto uni = resample_uniform(net, 64);
    CHECK(uni.size() == 64);
    CHECK_NOTHROW(group_delay(uni));
}

TEST_CASE("moving average and window") {
    CHECK(smoothing_window(1000) == 11);
    CHECK(smoothing_window(50) == 1);
    CHECK(smoothing_window(200) % 2 == 1);
    const auto m = moving_average({1, 2, 3, 4, 5}, 3);
    CHECK(m[0] == 1.0);
    CHECK(m[2] == 3.0);
    CHECK(m[4] == 5.0);
}

TEST_CASE("unwrap keeps consecutive differences within pi") {
    testgen::Rng rng(8);
    std::vector<double> truth(500), wrapped(500);
    double acc = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        acc += rng.uniform(-3.0, 3.0);
        truth[i] = acc;
        wrapped[i] = std::arg(std::polar(1.0, acc));
    }
    const auto u = unwrap_phase(wrapped);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(u[i] - truth[i] == doctest::Approx(u[0] - truth[0]).epsilon(1e-9));
}

namespace {

NetworkData crosstalk_net(testgen::Rng& rng, double worst_db, double worst_f, int o, int i) {
    NetworkData net;
    net.ports = 4;
    net.freqs = grid(1e9, 10e9, 901);
    for (double f : net.freqs) {
        Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(4, 4);
        s(1, 0) = s(0, 1) = s(3, 2) = s(2, 3) = 0.97;
        for (auto [a, b] : {std::pair{2, 0}, {3, 0}, {2, 1}, {3, 1}})
            s(a, b) = s(b, a) = std::polar(std::pow(10.0, rng.uniform(-70.0, -50.0) / 20.0), rng.uniform(-pi, pi));
        if (std::abs(f - worst_f) < 1.0) s(o, i) = s(i, o) = std::polar(std::pow(10.0, worst_db / 20.0), 0.3);
        net.s.push_back(s);
    }
    return net;
}

}  // namespace

TEST_CASE("band isolation finds the injected worst coupler") {
    testgen::Rng rng(45);
    const auto net = crosstalk_net(rng, -45.0, 6e9, 2, 0);
    const auto r = band_isolation(net, 4e9, 8e9);
    CHECK(r.isolation_db == doctest::Approx(45.0).epsilon(1e-12));
    CHECK(r.worst_freq == doctest::Approx(6e9));
    CHECK(r.worst_entry == "S31");

    // Outside the band the injected spike is ignored.
    const auto out = band_isolation(crosstalk_net(rng, -20.0, 9e9, 3, 1), 4e9, 8e9);
    CHECK(out.isolation_db > 50.0);
    CHECK_THROWS_AS(band_isolation(net, 8e9, 4e9), InputError);
    CHECK_THROWS_AS(band_isolation(net, 0.5e9, 4e9), InputError);
}

TEST_CASE("band isolation is invariant under a global phase rotation") {
    testgen::Rng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        auto net = crosstalk_net(rng, -48.0, 5e9, 3, 1);
        const auto a = band_isolation(net, 4e9, 8e9);
        const cplx rot = std::polar(1.0, rng.uniform(-pi, pi));
        for (auto& m : net.s) m *= rot;
        const auto b = band_isolation(net, 4e9, 8e9);
        CHECK(a.isolation_db == doctest::Approx(b.isolation_db).epsilon(1e-12));
        CHECK(a.worst_freq == b.worst_freq);
        CHECK(a.worst_entry == b.worst_entry);
    }
}

TEST_CASE("resonant notches classify as resonance") {
    testgen::Rng rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        ResonatorModel m;
        m.f0 = rng.uniform(4e9, 8e9);
        m.q_c_star = rng.uniform(1e3, 2e4);
        m.q_i = m.q_c_star * rng.uniform(1.1, 20.0);
        m.phi = rng.uniform(-0.3, 0.3);
        const double span = 8.0 * m.f0 / m.loaded_q();
        const auto f = grid(m.f0 - span, m.f0 + span, 801);
        auto s21 = synthesize_s21(m, f);
        const double tau = rng.uniform(0.0, 50e-9);
        for (std::size_t i = 0; i < f.size(); ++i) s21[i] *= 0.3 * std::exp(cplx(0.0, -2.0 * pi * f[i] * tau));
        const auto rep = classify_dip(two_port_from_s21(f, s21), 2, 1, f.front(), f.back());
        CHECK(rep.classification == DipClass::Resonance);
        CHECK(rep.center_freq == doctest::Approx(m.f0).epsilon(2.0 * span / 800.0 / m.f0));
        CHECK(rep.phase_excursion > pi / 2.0);
    }
}

TEST_CASE("magnitude-only dips with linear phase are anomalies") {
    testgen::Rng rng(32);
    for (int trial = 0; trial < 30; ++trial) {
        const double fc = rng.uniform(2e9, 6e9);
        const double width = rng.uniform(20e6, 300e6);
        const double depth_db = rng.uniform(1.0, 25.0);
        const double tau = rng.uniform(0.0, 2e-9);
        const auto f = grid(fc - 8.0 * width, fc + 8.0 * width, 801);
        std::vector<cplx> s21;
        for (double fi : f) {
            const double x = (fi - fc) / width;
            const double mag_db = -depth_db / (1.0 + x * x);
            s21.push_back(std::polar(std::pow(10.0, mag_db / 20.0), -2.0 * pi * fi * tau));
        }
        const auto rep = classify_dip(two_port_from_s21(f, s21), 2, 1, f.front(), f.back());
        CHECK(rep.classification == DipClass::NonResonantAnomaly);
        CHECK(rep.phase_excursion < pi / 2.0);
    }
}

TEST_CASE("microwave parameters on a matched attenuating delay line") {
    const auto f = grid(10e6, 5e9, 500);
    std::vector<cplx> s21;
    for (double fi : f) s21.push_back(0.8 * std::exp(cplx(0.0, -2.0 * pi * fi * 0.3e-9)));
    const auto p = microwave_params(two_port_from_s21(f, s21), 50.0);
    for (std::size_t i = 0; i < f.size(); ++i) {
        CHECK(std::abs(p.z_in[i] - cplx(50.0, 0.0)) < 1e-8);
        CHECK(p.vswr_in[i] == doctest::Approx(1.0));
        CHECK(p.tau_g[i] == doctest::Approx(0.3e-9).epsilon(1e-9));
    }
}
