#include <socketlab/socketlab.h>

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>
#include <thread>
#include <vector>

namespace {

const char* kTwoPort = "# GHz S RI R 50\n1 0.1 0 0.9 0 0.9 0 0.1 0\n2 0.2 0 0.8 0 0.8 0 0.2 0\n";

}  // namespace

TEST_CASE("status strings and version") {
    CHECK(std::string(sl_version()) == "1.0.0");
    for (int s = SL_OK; s <= SL_ERR_INTERNAL; ++s) CHECK(std::strlen(sl_status_string(static_cast<sl_status>(s))) > 0);
}

TEST_CASE("parse, query and write a network") {
    sl_network* net = nullptr;
    REQUIRE(sl_network_parse(kTwoPort, std::strlen(kTwoPort), 0, &net) == SL_OK);
    CHECK(sl_network_ports(net) == 2);
    CHECK(sl_network_size(net) == 2);
    CHECK(sl_network_z_ref(net) == 50.0);
    double f[2];
    REQUIRE(sl_network_freqs(net, f) == SL_OK);
    CHECK(f[1] == 2e9);
    double s21[4];
    REQUIRE(sl_network_trace(net, 2, 1, s21) == SL_OK);
    CHECK(s21[2] == 0.8);
    char* text = nullptr;
    REQUIRE(sl_network_write(net, SL_FORMAT_MA, &text) == SL_OK);
    sl_network* back = nullptr;
    REQUIRE(sl_network_parse(text, std::strlen(text), 2, &back) == SL_OK);
    double s21b[4];
    REQUIRE(sl_network_trace(back, 2, 1, s21b) == SL_OK);
    for (int i = 0; i < 4; ++i) CHECK(s21b[i] == doctest::Approx(s21[i]).epsilon(1e-12));
    sl_string_free(text);
    sl_network_free(back);
    sl_network_free(net);
}

TEST_CASE("parse errors carry the line number") {
    const char* bad = "# GHz S MA R 50\n1 0.1 0 0.9 -10 0.9 -10 0.1 0\n2 0.1 0 0.9 x 0.9 -20 0.1 0\n";
    sl_network* net = nullptr;
    CHECK(sl_network_parse(bad, std::strlen(bad), 0, &net) == SL_ERR_PARSE);
    CHECK(net == nullptr);
    CHECK(sl_last_error_line() == 3);
    CHECK(std::string(sl_last_error()).find("line 3") != std::string::npos);
    CHECK(sl_network_load("/nonexistent/file.s2p", &net) == SL_ERR_IO);
}

TEST_CASE("null arguments are rejected") {
    CHECK(sl_network_parse(nullptr, 0, 0, nullptr) == SL_ERR_INVALID_ARGUMENT);
    CHECK(sl_vswr(0.1, 0.0, nullptr) == SL_ERR_INVALID_ARGUMENT);
    CHECK(std::string(sl_last_error()) == "null argument");
    CHECK(sl_network_ports(nullptr) == 0);
}

TEST_CASE("last error is per thread") {
    double out = 0.0;
    CHECK(sl_vswr(2.0, 0.0, &out) == SL_ERR_INVALID_ARGUMENT);
    const std::string mine = sl_last_error();
    std::string other;
    std::thread t([&] {
        double v = 0.0;
        sl_vswr(0.5, 0.0, &v);
        other = sl_last_error();
    });
    t.join();
    CHECK(other.empty());
    CHECK(std::string(sl_last_error()) == mine);
}

TEST_CASE("matrix conversions") {
    const double s[8] = {0.1, 0.05, 0.3, -0.2, 0.3, -0.2, -0.1, 0.02};
    double z[8], back[8];
    REQUIRE(sl_z_from_s(2, s, 50.0, z) == SL_OK);
    REQUIRE(sl_s_from_z(2, z, 50.0, back) == SL_OK);
    for (int i = 0; i < 8; ++i) CHECK(back[i] == doctest::Approx(s[i]).epsilon(1e-12));
    double re = 0.0, im = 0.0;
    REQUIRE(sl_input_impedance(z, 50.0, 0.0, SL_LOAD_CONVENTIONAL, &re, &im) == SL_OK);
    CHECK(std::isfinite(re));
    CHECK(sl_z_from_s(0, s, 50.0, z) == SL_ERR_INVALID_ARGUMENT);
    double v = 0.0;
    REQUIRE(sl_vswr(std::pow(10.0, -13.8 / 20.0), 0.0, &v) == SL_OK);
    CHECK(v == doctest::Approx(1.513).epsilon(0.001));
}

TEST_CASE("compression buffer sizing") {
    sl_compression_plan plan;
    sl_compression_plan_default(&plan);
    sl_compression_setting out[8];
    size_t count = 0;
    CHECK(sl_compression_settings(&plan, out, 2, &count) == SL_ERR_BUFFER_TOO_SMALL);
    CHECK(count == 5);
    REQUIRE(sl_compression_settings(&plan, out, 8, &count) == SL_OK);
    CHECK(out[4].protrusion == doctest::Approx(5.35e-3));
    CHECK(out[2].preferred == 1);
}

TEST_CASE("lattice plan handle") {
    sl_lattice_spec spec;
    sl_lattice_spec_default(&spec);
    spec.n = 10;
    sl_lattice_plan* plan = nullptr;
    REQUIRE(sl_plan_lattice(&spec, nullptr, &plan) == SL_OK);
    sl_lattice_summary sum;
    REQUIRE(sl_lattice_plan_summary(plan, &sum) == SL_OK);
    CHECK(sum.chip_side == doctest::Approx(72e-3));
    CHECK(sum.n_qubits == 100);
    sl_pad pad;
    CHECK(sl_lattice_plan_pad(plan, 100000, &pad) == SL_ERR_INVALID_ARGUMENT);
    sl_lattice_plan_free(plan);
    spec.n = 11;
    CHECK(sl_plan_lattice(&spec, nullptr, &plan) == SL_ERR_COMPUTATION);
    CHECK(std::string(sl_last_error()).find("largest n is 10") != std::string::npos);
}

TEST_CASE("TDR roundtrip through handles") {
    sl_profile* p = nullptr;
    REQUIRE(sl_profile_create(50.0, &p) == SL_OK);
    const sl_segment segs[3] = {{0.3e-9, 50.0, 0.0}, {0.2e-9, 60.0, 0.0}, {0.5e-9, 50.0, 0.0}};
    for (const auto& s : segs) REQUIRE(sl_profile_add_segment(p, &s) == SL_OK);
    const sl_segment bad{-1.0, 50.0, 0.0};
    CHECK(sl_profile_add_segment(p, &bad) == SL_ERR_INVALID_ARGUMENT);
    CHECK(sl_profile_segment_count(p) == 3);
    sl_tdr_trace* tr = nullptr;
    REQUIRE(sl_tdr_synthesize(p, 0.25, 1e-12, 2.5e-9, SL_SYNTH_FIRST_ORDER, &tr) == SL_OK);
    sl_profile* got = nullptr;
    REQUIRE(sl_tdr_extract(tr, 50.0, 0.0, 0, &got) == SL_OK);
    REQUIRE(sl_profile_segment_count(got) == 3);
    sl_segment mid;
    REQUIRE(sl_profile_segment(got, 1, &mid) == SL_OK);
    CHECK(mid.z == doctest::Approx(60.0).epsilon(0.01));
    sl_profile_free(got);
    sl_tdr_free(tr);
    sl_profile_free(p);
}

TEST_CASE("resonator fit through the C API") {
    const sl_resonator truth{5064513933.0, 165790.0, 16002.0, -0.0347};
    const size_t n = 401;
    const double ql = 1.0 / (1.0 / truth.q_i + 1.0 / truth.q_c_star);
    std::vector<double> f(n), s(2 * n);
    for (size_t i = 0; i < n; ++i) f[i] = truth.f0 * (1.0 + (static_cast<double>(i) / (n - 1) - 0.5) * 12.0 / ql);
    REQUIRE(sl_resonator_synthesize(&truth, f.data(), n, s.data()) == SL_OK);
    sl_fit_result fit;
    REQUIRE(sl_resonator_fit(f.data(), s.data(), n, nullptr, 0, &fit) == SL_OK);
    CHECK(fit.model.q_i == doctest::Approx(truth.q_i).epsilon(0.01));
    sl_fit_result joint;
    char* warnings = nullptr;
    REQUIRE(sl_resonator_fit_baseline(f.data(), s.data(), n, 0.1, 0, &joint, nullptr, nullptr, &warnings) == SL_OK);
    CHECK(joint.model.q_c_star == doctest::Approx(truth.q_c_star).epsilon(0.01));
    sl_string_free(warnings);
}

TEST_CASE("estimators and springs") {
    const sl_dc_line ag{16e-9, 11.5e-3, 30e-6, 3e-6, 0.0, 2.71};
    double r = 0.0;
    REQUIRE(sl_trace_resistance(&ag, &r) == SL_OK);
    CHECK(r == doctest::Approx(2.0444).epsilon(1e-4));
    REQUIRE(sl_contact_resistance_bound(&ag, &r) == SL_OK);
    CHECK(r == doctest::Approx(0.3328).epsilon(1e-3));
    sl_dc_line none = ag;
    none.measured_r_io = -1.0;
    CHECK(sl_contact_resistance_bound(&none, &r) == SL_ERR_INVALID_ARGUMENT);
    CHECK(sl_perturbed_mode(15.7e9, 11.68, 0.55e-3, 2e-3, &r) == SL_ERR_COMPUTATION);

    REQUIRE(sl_spring_count() == 3);
    sl_spring sp;
    REQUIRE(sl_spring_info(0, &sp) == SL_OK);
    sl_spring_force force;
    REQUIRE(sl_spring_force_lookup(sp.id, 2e-3, &force) == SL_OK);
    CHECK(force.has_operating_range == 1);
    CHECK(force.force == doctest::Approx(sp.force_full * 2e-3 / sp.travel));
    CHECK(sl_spring_force_lookup("missing", 1e-3, &force) == SL_ERR_INVALID_ARGUMENT);
}

TEST_CASE("pulse pipeline") {
    sl_pulse_spec spec;
    sl_pulse_spec_default(&spec);
    size_t n = 0;
    REQUIRE(sl_pulse_sample_count(&spec, &n) == SL_OK);
    std::vector<double> in(n), out(n);
    REQUIRE(sl_pulse_synthesize(&spec, in.data()) == SL_OK);
    std::vector<double> f, s;
    for (int i = 0; i < 101; ++i) {
        const double fi = 1e6 + i * 1e8;
        f.push_back(fi);
        const double ph = -2.0 * 3.141592653589793 * fi * 1e-9;
        const double row[8] = {0, 0, std::cos(ph), std::sin(ph), std::cos(ph), std::sin(ph), 0, 0};
        s.insert(s.end(), row, row + 8);
    }
    sl_network* net = nullptr;
    REQUIRE(sl_network_create(2, f.size(), f.data(), s.data(), 50.0, &net) == SL_OK);
    REQUIRE(sl_pulse_transmit(in.data(), n, spec.sample_rate, net, 2, 1, out.data()) == SL_OK);
    sl_distortion m;
    REQUIRE(sl_distortion_metrics(in.data(), n, out.data(), n, spec.sample_rate, &m) == SL_OK);
    CHECK(m.envelope_correlation > 0.999);
    CHECK(m.delay == doctest::Approx(1e-9).epsilon(0.05));
    sl_network_free(net);
}

TEST_CASE("bundled constants and CSV") {
    CHECK(std::string(sl_constants_json()).find("\"schema\": \"socketlab/v1\"") != std::string::npos);
    const char* csv = "a,b\n1,2\n3,4\n";
    double* data = nullptr;
    size_t rows = 0;
    REQUIRE(sl_csv_parse(csv, std::strlen(csv), 2, &data, &rows) == SL_OK);
    CHECK(rows == 2);
    CHECK(data[3] == 4.0);
    sl_array_free(data);
}
