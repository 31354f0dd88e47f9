#include "socketlab/socketlab.h"

#include "constants.hpp"
#include "error.hpp"
#include "estimators.hpp"
#include "layout.hpp"
#include "network.hpp"
#include "pulse.hpp"
#include "resfit.hpp"
#include "tdr.hpp"
#include "touchstone.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

namespace sl = socketlab;

struct sl_network {
    sl::NetworkData data;
};

struct sl_tdr_trace {
    sl::TdrTrace data;
};

struct sl_profile {
    sl::ImpedanceProfile data;
};

struct sl_lattice_plan {
    sl::LatticePlan data;
};

namespace {

thread_local std::string g_last_error;
thread_local std::size_t g_last_line = 0;

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BufferError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

sl_status fail(sl_status status, const char* what, std::size_t line = 0) {
    g_last_error = what;
    g_last_line = line;
    return status;
}

template <class F>
sl_status guard(F&& f) noexcept {
    try {
        f();
        return SL_OK;
    } catch (const sl::ParseError& e) {
        return fail(SL_ERR_PARSE, e.what(), e.line());
    } catch (const sl::InputError& e) {
        return fail(SL_ERR_INVALID_ARGUMENT, e.what());
    } catch (const sl::ComputationError& e) {
        return fail(SL_ERR_COMPUTATION, e.what());
    } catch (const IoError& e) {
        return fail(SL_ERR_IO, e.what());
    } catch (const BufferError& e) {
        return fail(SL_ERR_BUFFER_TOO_SMALL, e.what());
    } catch (const std::bad_alloc&) {
        return fail(SL_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(SL_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(SL_ERR_INTERNAL, "unknown error");
    }
}

template <class... P>
void require(const P*... ptrs) {
    if (((ptrs == nullptr) || ...)) throw sl::InputError("null argument");
}

char* dup_string(const std::string& s) {
    auto* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

std::vector<sl::cplx> read_complex(const double* p, std::size_t n) {
    std::vector<sl::cplx> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = {p[2 * i], p[2 * i + 1]};
    return v;
}

void write_complex(const std::vector<sl::cplx>& v, double* p) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        p[2 * i] = v[i].real();
        p[2 * i + 1] = v[i].imag();
    }
}

Eigen::MatrixXcd read_matrix(int ports, const double* p) {
    if (ports < 1) throw sl::InputError("port count must be positive");
    Eigen::MatrixXcd m(ports, ports);
    for (int r = 0; r < ports; ++r)
        for (int c = 0; c < ports; ++c) m(r, c) = {p[2 * (r * ports + c)], p[2 * (r * ports + c) + 1]};
    return m;
}

void write_matrix(const Eigen::MatrixXcd& m, double* p) {
    const auto ports = m.rows();
    for (Eigen::Index r = 0; r < ports; ++r)
        for (Eigen::Index c = 0; c < ports; ++c) {
            p[2 * (r * ports + c)] = m(r, c).real();
            p[2 * (r * ports + c) + 1] = m(r, c).imag();
        }
}

sl::LoadSign to_sign(sl_load_sign s) {
    switch (s) {
        case SL_LOAD_CONVENTIONAL: return sl::LoadSign::Conventional;
        case SL_LOAD_AS_PRINTED: return sl::LoadSign::AsPrinted;
    }
    throw sl::InputError("unknown load sign");
}

sl::DataFormat to_format(sl_data_format f) {
    switch (f) {
        case SL_FORMAT_RI: return sl::DataFormat::RI;
        case SL_FORMAT_MA: return sl::DataFormat::MA;
        case SL_FORMAT_DB: return sl::DataFormat::DB;
    }
    throw sl::InputError("unknown data format");
}

sl::ResonatorModel to_model(const sl_resonator& r) { return {r.f0, r.q_i, r.q_c_star, r.phi}; }

sl_resonator from_model(const sl::ResonatorModel& m) { return {m.f0, m.q_i, m.q_c_star, m.phi}; }

sl_fit_result from_fit(const sl::FitResult& r) {
    sl_fit_result res{};
    res.model = from_model(r.model);
    res.std_errors = {r.std_errors.f0, r.std_errors.q_i, r.std_errors.q_c_star, r.std_errors.phi};
    res.loaded_q = r.model.loaded_q();
    res.residual_rms = r.residual_rms;
    res.initial_residual_rms = r.initial_residual_rms;
    res.n_iter = r.n_iter;
    return res;
}

sl::CompressionPlan to_plan(const sl_compression_plan& p) {
    sl::CompressionPlan plan;
    plan.l_c = p.l_c;
    plan.stroke = p.stroke;
    plan.base = p.base;
    plan.pitch = p.pitch;
    plan.preferred_k = p.preferred_k;
    return plan;
}

sl_compression_setting from_setting(const sl::CompressionSetting& s) { return {s.k, s.protrusion, s.preferred ? 1 : 0}; }

sl::PulseSpec to_pulse_spec(const sl_pulse_spec& s) {
    sl::PulseSpec spec;
    spec.carrier = s.carrier;
    spec.sideband = s.sideband;
    spec.fwhm = s.fwhm;
    spec.sample_rate = s.sample_rate;
    spec.duration = s.duration;
    return spec;
}

sl::PulseSeries to_series(const double* p, std::size_t n, double fs) {
    sl::PulseSeries s;
    s.sample_rate = fs;
    s.volts.assign(p, p + n);
    return s;
}

}  // namespace

extern "C" {

const char* sl_status_string(sl_status status) {
    switch (status) {
        case SL_OK: return "ok";
        case SL_ERR_INVALID_ARGUMENT: return "invalid argument";
        case SL_ERR_PARSE: return "parse error";
        case SL_ERR_COMPUTATION: return "computation error";
        case SL_ERR_IO: return "i/o error";
        case SL_ERR_BUFFER_TOO_SMALL: return "buffer too small";
        case SL_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* sl_last_error(void) { return g_last_error.c_str(); }

size_t sl_last_error_line(void) { return g_last_line; }

const char* sl_version(void) { return "1.0.0"; }

void sl_string_free(char* s) { std::free(s); }

void sl_array_free(double* p) { std::free(p); }

sl_status sl_csv_parse(const char* text, size_t len, size_t columns, double** out, size_t* rows) {
    return guard([&] {
        require(text, out, rows);
        const auto cols = sl::read_numeric_csv(std::string_view(text, len), columns);
        const std::size_t n = cols.empty() ? 0 : cols.front().size();
        auto* data = static_cast<double*>(std::malloc(std::max<std::size_t>(1, n * columns) * sizeof(double)));
        if (!data) throw std::bad_alloc();
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < columns; ++c) data[r * columns + c] = cols[c][r];
        *out = data;
        *rows = n;
    });
}

const char* sl_constants_json(void) { return sl::bundled_constants_text().data(); }

// --- network data -----------------------------------------------------------

sl_status sl_network_parse(const char* text, size_t len, int ports_hint, sl_network** out) {
    return guard([&] {
        require(text, out);
        std::optional<int> hint;
        if (ports_hint != 0) hint = ports_hint;
        auto* net = new sl_network{sl::parse_touchstone(std::string_view(text, len), hint)};
        *out = net;
    });
}

sl_status sl_network_load(const char* path, sl_network** out) {
    return guard([&] {
        require(path, out);
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError(std::string("cannot open '") + path + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        auto* net = new sl_network{sl::parse_touchstone(ss.str(), sl::ports_from_filename(path))};
        *out = net;
    });
}

sl_status sl_network_create(int ports, size_t n_freqs, const double* freqs, const double* s, double z_ref,
                            sl_network** out) {
    return guard([&] {
        require(freqs, s, out);
        sl::NetworkData d;
        d.ports = ports;
        d.z_ref = z_ref;
        d.freqs.assign(freqs, freqs + n_freqs);
        const std::size_t stride = 2 * static_cast<std::size_t>(ports) * static_cast<std::size_t>(ports);
        for (std::size_t k = 0; k < n_freqs; ++k) d.s.push_back(read_matrix(ports, s + k * stride));
        d.validate();
        *out = new sl_network{std::move(d)};
    });
}

void sl_network_free(sl_network* net) { delete net; }

int sl_network_ports(const sl_network* net) { return net ? net->data.ports : 0; }

size_t sl_network_size(const sl_network* net) { return net ? net->data.size() : 0; }

double sl_network_z_ref(const sl_network* net) { return net ? net->data.z_ref : 0.0; }

sl_status sl_network_freqs(const sl_network* net, double* out) {
    return guard([&] {
        require(net, out);
        std::copy(net->data.freqs.begin(), net->data.freqs.end(), out);
    });
}

sl_status sl_network_trace(const sl_network* net, int out_port, int in_port, double* out) {
    return guard([&] {
        require(net, out);
        write_complex(net->data.trace(out_port, in_port), out);
    });
}

sl_status sl_network_write(const sl_network* net, sl_data_format fmt, char** out) {
    return guard([&] {
        require(net, out);
        *out = dup_string(sl::write_touchstone(net->data, to_format(fmt)));
    });
}

sl_status sl_network_resample(const sl_network* net, size_t points, sl_network** out) {
    return guard([&] {
        require(net, out);
        *out = new sl_network{sl::resample_uniform(net->data, points)};
    });
}

// --- network analysis -------------------------------------------------------

sl_status sl_z_from_s(int ports, const double* s, double z_ref, double* z_out) {
    return guard([&] {
        require(s, z_out);
        write_matrix(sl::z_from_s(read_matrix(ports, s), z_ref), z_out);
    });
}

sl_status sl_s_from_z(int ports, const double* z, double z_ref, double* s_out) {
    return guard([&] {
        require(z, s_out);
        write_matrix(sl::s_from_z(read_matrix(ports, z), z_ref), s_out);
    });
}

sl_status sl_input_impedance(const double* z, double zl_re, double zl_im, sl_load_sign sign, double* out_re,
                             double* out_im) {
    return guard([&] {
        require(z, out_re, out_im);
        const Eigen::Matrix2cd m = read_matrix(2, z);
        const auto zin = sl::input_impedance(m, {zl_re, zl_im}, to_sign(sign));
        *out_re = zin.real();
        *out_im = zin.imag();
    });
}

sl_status sl_vswr(double s11_re, double s11_im, double* out) {
    return guard([&] {
        require(out);
        *out = sl::vswr({s11_re, s11_im});
    });
}

sl_status sl_derivative_6th_order(const double* y, size_t n, double h, double* out) {
    return guard([&] {
        require(y, out);
        const auto d = sl::derivative_6th_order(std::vector<double>(y, y + n), h);
        std::copy(d.begin(), d.end(), out);
    });
}

sl_status sl_unwrap_phase(const double* angles, size_t n, double* out) {
    return guard([&] {
        require(angles, out);
        const auto u = sl::unwrap_phase(std::vector<double>(angles, angles + n));
        std::copy(u.begin(), u.end(), out);
    });
}

sl_status sl_microwave_params(const sl_network* net, double zl_re, double zl_im, sl_load_sign sign, double* z_in,
                              double* vswr_in, double* tau_phi, double* tau_g) {
    return guard([&] {
        require(net);
        const auto p = sl::microwave_params(net->data, {zl_re, zl_im}, to_sign(sign));
        if (z_in) write_complex(p.z_in, z_in);
        if (vswr_in) std::copy(p.vswr_in.begin(), p.vswr_in.end(), vswr_in);
        if (tau_phi) std::copy(p.tau_phi.begin(), p.tau_phi.end(), tau_phi);
        if (tau_g) std::copy(p.tau_g.begin(), p.tau_g.end(), tau_g);
    });
}

sl_status sl_phase_delay(const sl_network* net, int out_port, int in_port, double* out) {
    return guard([&] {
        require(net, out);
        const auto v = sl::phase_delay(net->data, out_port, in_port);
        std::copy(v.begin(), v.end(), out);
    });
}

sl_status sl_group_delay(const sl_network* net, int out_port, int in_port, int smooth, double* out) {
    return guard([&] {
        require(net, out);
        const auto v = sl::group_delay(net->data, out_port, in_port, smooth != 0);
        std::copy(v.begin(), v.end(), out);
    });
}

sl_status sl_band_isolation(const sl_network* net, double f_lo, double f_hi, sl_isolation* out) {
    return guard([&] {
        require(net, out);
        const auto r = sl::band_isolation(net->data, f_lo, f_hi);
        sl_isolation res{};
        res.isolation_db = r.isolation_db;
        res.worst_freq = r.worst_freq;
        std::strncpy(res.worst_entry, r.worst_entry.c_str(), sizeof(res.worst_entry) - 1);
        *out = res;
    });
}

sl_status sl_classify_dip(const sl_network* net, int out_port, int in_port, double f_lo, double f_hi,
                          sl_dip_report* out) {
    return guard([&] {
        require(net, out);
        const auto r = sl::classify_dip(net->data, out_port, in_port, f_lo, f_hi);
        *out = {r.center_freq, r.depth, r.bandwidth_3db, r.phase_excursion,
                r.classification == sl::DipClass::Resonance ? 1 : 0};
    });
}

// --- TDR --------------------------------------------------------------------

sl_status sl_tdr_parse_csv(const char* text, size_t len, double v_plus, sl_tdr_trace** out) {
    return guard([&] {
        require(text, out);
        *out = new sl_tdr_trace{sl::parse_tdr_csv(std::string_view(text, len), v_plus)};
    });
}

sl_status sl_tdr_create(const double* times, const double* volts, size_t n, double v_plus, sl_tdr_trace** out) {
    return guard([&] {
        require(times, volts, out);
        sl::TdrTrace t;
        t.times.assign(times, times + n);
        t.v_meas.assign(volts, volts + n);
        t.v_plus = v_plus;
        t.validate();
        *out = new sl_tdr_trace{std::move(t)};
    });
}

void sl_tdr_free(sl_tdr_trace* trace) { delete trace; }

size_t sl_tdr_size(const sl_tdr_trace* trace) { return trace ? trace->data.size() : 0; }

double sl_tdr_v_plus(const sl_tdr_trace* trace) { return trace ? trace->data.v_plus : 0.0; }

sl_status sl_tdr_samples(const sl_tdr_trace* trace, double* times, double* volts) {
    return guard([&] {
        require(trace);
        if (times) std::copy(trace->data.times.begin(), trace->data.times.end(), times);
        if (volts) std::copy(trace->data.v_meas.begin(), trace->data.v_meas.end(), volts);
    });
}

sl_status sl_reflection_ratio(double v_meas, double v_plus, double* out) {
    return guard([&] {
        require(out);
        *out = sl::reflection_ratio(v_meas, v_plus);
    });
}

sl_status sl_instantaneous_impedance(double xi, double z_c, double* out) {
    return guard([&] {
        require(out);
        *out = sl::instantaneous_impedance(xi, z_c);
    });
}

sl_status sl_tdr_impedance(const sl_tdr_trace* trace, double z_c, double* out) {
    return guard([&] {
        require(trace, out);
        const auto z = sl::impedance_from_trace(trace->data, z_c);
        std::copy(z.begin(), z.end(), out);
    });
}

sl_status sl_profile_create(double z_source, sl_profile** out) {
    return guard([&] {
        require(out);
        if (!(z_source > 0.0)) throw sl::InputError("source impedance must be positive");
        auto* p = new sl_profile{};
        p->data.z_source = z_source;
        *out = p;
    });
}

void sl_profile_free(sl_profile* profile) { delete profile; }

sl_status sl_profile_add_segment(sl_profile* profile, const sl_segment* seg) {
    return guard([&] {
        require(profile, seg);
        auto candidate = profile->data;
        candidate.segments.push_back({seg->one_way_delay, seg->z, seg->r_series});
        candidate.validate();
        profile->data = std::move(candidate);
    });
}

size_t sl_profile_segment_count(const sl_profile* profile) { return profile ? profile->data.segments.size() : 0; }

double sl_profile_z_source(const sl_profile* profile) { return profile ? profile->data.z_source : 0.0; }

sl_status sl_profile_segment(const sl_profile* profile, size_t index, sl_segment* out) {
    return guard([&] {
        require(profile, out);
        if (index >= profile->data.segments.size()) throw sl::InputError("segment index out of range");
        const auto& s = profile->data.segments[index];
        *out = {s.one_way_delay, s.z, s.r_series};
    });
}

sl_status sl_segment_lengths(const sl_profile* profile, double velocity_factor, double* out) {
    return guard([&] {
        require(profile, out);
        const auto l = sl::segment_lengths(profile->data, velocity_factor);
        std::copy(l.begin(), l.end(), out);
    });
}

sl_status sl_tdr_synthesize(const sl_profile* profile, double v_plus, double sample_dt, double total_time,
                            sl_synthesis_order order, sl_tdr_trace** out) {
    return guard([&] {
        require(profile, out);
        sl::SynthesisOrder o;
        switch (order) {
            case SL_SYNTH_FIRST_ORDER: o = sl::SynthesisOrder::FirstOrder; break;
            case SL_SYNTH_MULTI: o = sl::SynthesisOrder::Multi; break;
            default: throw sl::InputError("unknown synthesis order");
        }
        *out = new sl_tdr_trace{sl::synthesize_trace(profile->data, v_plus, sample_dt, total_time, o)};
    });
}

sl_status sl_tdr_extract(const sl_tdr_trace* trace, double z_c, double min_step, size_t median_window,
                         sl_profile** out) {
    return guard([&] {
        require(trace, out);
        sl::SegmentationOptions opts;
        if (min_step > 0.0) opts.min_step = min_step;
        if (median_window > 0) opts.median_window = median_window;
        *out = new sl_profile{sl::profile_from_trace(trace->data, z_c, opts)};
    });
}

// --- resonator fitting ------------------------------------------------------

sl_status sl_resonator_synthesize(const sl_resonator* model, const double* freqs, size_t n, double* s21_out) {
    return guard([&] {
        require(model, freqs, s21_out);
        write_complex(sl::synthesize_s21(to_model(*model), std::vector<double>(freqs, freqs + n)), s21_out);
    });
}

sl_status sl_resonator_normalize(const double* freqs, const double* s21, size_t n, double wing_fraction,
                                 double* s21_out, sl_baseline* baseline, char** warnings) {
    return guard([&] {
        require(freqs, s21, s21_out);
        const auto r = sl::normalize_sweep(std::vector<double>(freqs, freqs + n), read_complex(s21, n), wing_fraction);
        std::string joined;
        for (const auto& w : r.warnings) joined += (joined.empty() ? "" : "\n") + w;
        char* w = (warnings && !joined.empty()) ? dup_string(joined) : nullptr;
        write_complex(r.s21, s21_out);
        if (baseline)
            *baseline = {r.baseline.log_mag0, r.baseline.log_mag_slope, r.baseline.phase0, r.baseline.phase_slope};
        if (warnings) *warnings = w;
    });
}

sl_status sl_resonator_initial_guess(const double* freqs, const double* s21_norm, size_t n, sl_resonator* out) {
    return guard([&] {
        require(freqs, s21_norm, out);
        *out = from_model(sl::initial_guess(std::vector<double>(freqs, freqs + n), read_complex(s21_norm, n)));
    });
}

sl_status sl_resonator_fit(const double* freqs, const double* s21_norm, size_t n, const sl_resonator* initial,
                           int max_iter, sl_fit_result* out) {
    return guard([&] {
        require(freqs, s21_norm, out);
        sl::FitOptions opts;
        if (max_iter > 0) opts.max_iter = max_iter;
        std::optional<sl::ResonatorModel> init;
        if (initial) init = to_model(*initial);
        *out = from_fit(sl::fit_resonator(std::vector<double>(freqs, freqs + n), read_complex(s21_norm, n), init, opts));
    });
}

sl_status sl_resonator_fit_baseline(const double* freqs, const double* s21, size_t n, double wing_fraction,
                                    int max_iter, sl_fit_result* out, double* s21_norm_out, sl_baseline* baseline,
                                    char** warnings) {
    return guard([&] {
        require(freqs, s21, out);
        sl::FitOptions opts;
        if (max_iter > 0) opts.max_iter = max_iter;
        const auto r =
            sl::fit_with_baseline(std::vector<double>(freqs, freqs + n), read_complex(s21, n), wing_fraction, opts);
        std::string joined;
        for (const auto& w : r.sweep.warnings) joined += (joined.empty() ? "" : "\n") + w;
        char* w = (warnings && !joined.empty()) ? dup_string(joined) : nullptr;
        *out = from_fit(r.fit);
        if (s21_norm_out) write_complex(r.sweep.s21, s21_norm_out);
        const auto& b = r.fit.normalization;
        if (baseline) *baseline = {b.log_mag0, b.log_mag_slope, b.phase0, b.phase_slope};
        if (warnings) *warnings = w;
    });
}

// --- estimators -------------------------------------------------------------

sl_status sl_te_mode_frequency(double a, double b, double d, int m, int n, int l, double eps_r, double* out) {
    return guard([&] {
        require(out);
        *out = sl::te_mode_frequency(a, b, d, m, n, l, eps_r);
    });
}

sl_status sl_perturbed_mode(double f0, double eps_r, double d_s, double b, double* out) {
    return guard([&] {
        require(out);
        *out = sl::perturbed_mode(f0, eps_r, d_s, b);
    });
}

namespace {

sl::DcLineSpec to_dc(const sl_dc_line& l) {
    sl::DcLineSpec s;
    s.rho = l.rho;
    s.length_pp = l.length_pp;
    s.width_w = l.width_w;
    s.thickness_d = l.thickness_d;
    s.r_wire_chain = l.r_wire_chain;
    if (l.measured_r_io >= 0.0) s.measured_r_io = l.measured_r_io;
    return s;
}

}  // namespace

sl_status sl_trace_resistance(const sl_dc_line* line, double* out) {
    return guard([&] {
        require(line, out);
        *out = sl::trace_resistance(to_dc(*line));
    });
}

sl_status sl_contact_resistance_bound(const sl_dc_line* line, double* out) {
    return guard([&] {
        require(line, out);
        *out = sl::contact_resistance_bound(to_dc(*line));
    });
}

sl_status sl_cross_section_area(const sl_conductor* c, double* out) {
    return guard([&] {
        require(c, out);
        sl::ThermalSpec spec;
        spec.conductors.push_back({c->d_i, c->d_o, c->k_t, c->length});
        spec.validate();
        *out = sl::cross_section_area(spec.conductors.front());
    });
}

sl_status sl_heat_transfer_rate(const sl_conductor* conductors, size_t n, double* out) {
    return guard([&] {
        require(conductors, out);
        sl::ThermalSpec spec;
        for (size_t i = 0; i < n; ++i)
            spec.conductors.push_back({conductors[i].d_i, conductors[i].d_o, conductors[i].k_t, conductors[i].length});
        *out = sl::heat_transfer_rate(spec);
    });
}

sl_status sl_dipole_field_and_flux(const sl_magnetic* spec, sl_flux* out) {
    return guard([&] {
        require(spec, out);
        const auto e = sl::dipole_field_and_flux({spec->b_measured, spec->r0, spec->r_target, spec->loop_area});
        *out = {e.b_target, e.flux, e.flux_ratio};
    });
}

// --- layout -----------------------------------------------------------------

void sl_compression_plan_default(sl_compression_plan* out) {
    if (!out) return;
    const sl::CompressionPlan d;
    *out = {d.l_c, d.stroke, d.base, d.pitch, d.preferred_k};
}

sl_status sl_compression_settings(const sl_compression_plan* plan, sl_compression_setting* out, size_t cap,
                                  size_t* count) {
    return guard([&] {
        require(plan, count);
        if (cap > 0) require(out);
        const auto s = sl::compression_settings(to_plan(*plan));
        for (size_t i = 0; i < s.size() && i < cap; ++i) out[i] = from_setting(s[i]);
        *count = s.size();
        if (s.size() > cap) throw BufferError("settings buffer too small");
    });
}

sl_status sl_contraction(double coeff, double length, double* out) {
    return guard([&] {
        require(out);
        *out = sl::contraction(coeff, length);
    });
}

sl_status sl_implied_coefficient(double delta, double length, double* out) {
    return guard([&] {
        require(out);
        *out = sl::implied_coefficient(delta, length);
    });
}

void sl_lattice_spec_default(sl_lattice_spec* out) {
    if (!out) return;
    const sl::LatticeSpec d;
    *out = {d.n, d.dist_a, d.dist_b, d.dist_c, d.wire_pitch, d.max_chip_side, d.al_coeff, d.si_coeff};
}

sl_status sl_plan_lattice(const sl_lattice_spec* spec, const sl_compression_plan* compression,
                          sl_lattice_plan** out) {
    return guard([&] {
        require(spec, out);
        sl::LatticeSpec s;
        s.n = spec->n;
        s.dist_a = spec->dist_a;
        s.dist_b = spec->dist_b;
        s.dist_c = spec->dist_c;
        s.wire_pitch = spec->wire_pitch;
        s.max_chip_side = spec->max_chip_side;
        s.al_coeff = spec->al_coeff;
        s.si_coeff = spec->si_coeff;
        const auto c = compression ? to_plan(*compression) : sl::CompressionPlan{};
        *out = new sl_lattice_plan{sl::plan_lattice(s, c)};
    });
}

void sl_lattice_plan_free(sl_lattice_plan* plan) { delete plan; }

sl_status sl_lattice_plan_summary(const sl_lattice_plan* plan, sl_lattice_summary* out) {
    return guard([&] {
        require(plan, out);
        const auto& p = plan->data;
        sl_lattice_summary s{};
        s.n = p.n;
        s.cell = p.cell;
        s.chip_side = p.chip_side;
        s.max_chip_side = p.max_chip_side;
        s.wires_per_qubit = p.wires_per_qubit;
        s.total_pads = p.total_pads;
        s.readout_lines = p.readout_lines;
        s.n_qubits = p.qubits.size();
        s.n_settings = p.settings.size();
        s.al_contraction = p.contraction.al_delta;
        s.si_contraction = p.contraction.si_delta;
        s.contraction_bias = p.contraction.bias;
        *out = s;
    });
}

sl_status sl_lattice_plan_qubit(const sl_lattice_plan* plan, size_t index, double* x, double* y) {
    return guard([&] {
        require(plan, x, y);
        if (index >= plan->data.qubits.size()) throw sl::InputError("qubit index out of range");
        *x = plan->data.qubits[index].x;
        *y = plan->data.qubits[index].y;
    });
}

sl_status sl_lattice_plan_pad(const sl_lattice_plan* plan, size_t index, sl_pad* out) {
    return guard([&] {
        require(plan, out);
        if (index >= plan->data.pads.size()) throw sl::InputError("pad index out of range");
        const auto& p = plan->data.pads[index];
        sl_pad_kind kind = SL_PAD_XY;
        if (p.kind == sl::PadKind::Z) kind = SL_PAD_Z;
        if (p.kind == sl::PadKind::Readout) kind = SL_PAD_READOUT;
        *out = {kind, p.x, p.y, p.qubit};
    });
}

sl_status sl_lattice_plan_setting(const sl_lattice_plan* plan, size_t index, sl_compression_setting* out) {
    return guard([&] {
        require(plan, out);
        if (index >= plan->data.settings.size()) throw sl::InputError("setting index out of range");
        *out = from_setting(plan->data.settings[index]);
    });
}

sl_status sl_wiring_scaling(int n, sl_wiring* out) {
    return guard([&] {
        require(out);
        const auto w = sl::wiring_scaling(n);
        *out = {w.wirebond_count, w.socket_count, w.socket_exceeds ? 1 : 0};
    });
}

void sl_tolerance_spec_default(sl_tolerance_spec* out) {
    if (!out) return;
    const sl::ToleranceSpec d;
    *out = {d.lateral_tol,          d.rot_tol,   d.machining_sigma, d.dicing_sigma, d.contraction_al_coeff,
            d.contraction_si_coeff, d.chip_side, d.trials,          d.seed};
}

sl_status sl_mating_yield(const sl_tolerance_spec* spec, sl_yield_report* out) {
    return guard([&] {
        require(spec, out);
        sl::ToleranceSpec s;
        s.lateral_tol = spec->lateral_tol;
        s.rot_tol = spec->rot_tol;
        s.machining_sigma = spec->machining_sigma;
        s.dicing_sigma = spec->dicing_sigma;
        s.contraction_al_coeff = spec->contraction_al_coeff;
        s.contraction_si_coeff = spec->contraction_si_coeff;
        s.chip_side = spec->chip_side;
        s.trials = spec->trials;
        s.seed = spec->seed;
        const auto r = sl::mating_yield(s);
        sl_yield_report rep{};
        rep.yield = r.yield;
        rep.trials = r.trials;
        rep.passed = r.passed;
        rep.contraction_bias = r.contraction_bias;
        rep.lateral = {r.lateral.p50, r.lateral.p90, r.lateral.p99, r.lateral.max};
        rep.rotation = {r.rotation.p50, r.rotation.p90, r.rotation.p99, r.rotation.max};
        *out = rep;
    });
}

size_t sl_spring_count(void) {
    try {
        return sl::bundled_springs().size();
    } catch (...) {
        return 0;
    }
}

sl_status sl_spring_info(size_t index, sl_spring* out) {
    return guard([&] {
        require(out);
        const auto springs = sl::bundled_springs();
        if (index >= springs.size()) throw sl::InputError("spring index out of range");
        const auto& s = springs[index];
        sl_spring info{};
        std::strncpy(info.id, s.id.c_str(), sizeof(info.id) - 1);
        info.coil_diameter = s.coil_diameter;
        info.wire_diameter = s.wire_diameter;
        info.free_length = s.free_length;
        info.coils = s.coils;
        info.force_full = s.force_full;
        info.travel = s.travel();
        *out = info;
    });
}

sl_status sl_spring_force_lookup(const char* id, double compression, sl_spring_force* out) {
    return guard([&] {
        require(id, out);
        const auto f = sl::spring_force(sl::bundled_springs(), id, compression, sl::bundled_operating_range());
        sl_spring_force r{};
        r.force = f.force;
        r.travel = f.travel;
        if (f.inner_range && f.outer_range) {
            r.has_operating_range = 1;
            r.inner_range[0] = f.inner_range->first;
            r.inner_range[1] = f.inner_range->second;
            r.outer_range[0] = f.outer_range->first;
            r.outer_range[1] = f.outer_range->second;
        }
        *out = r;
    });
}

// --- pulses -----------------------------------------------------------------

void sl_pulse_spec_default(sl_pulse_spec* out) {
    if (!out) return;
    const sl::PulseSpec d;
    *out = {d.carrier, d.sideband, d.fwhm, d.sample_rate, d.duration};
}

sl_status sl_pulse_sample_count(const sl_pulse_spec* spec, size_t* out) {
    return guard([&] {
        require(spec, out);
        const auto s = to_pulse_spec(*spec);
        s.validate();
        *out = static_cast<size_t>(std::llround(s.duration * s.sample_rate));
    });
}

sl_status sl_pulse_synthesize(const sl_pulse_spec* spec, double* out) {
    return guard([&] {
        require(spec, out);
        const auto p = sl::synthesize_pulse(to_pulse_spec(*spec));
        std::copy(p.volts.begin(), p.volts.end(), out);
    });
}

sl_status sl_pulse_transmit(const double* in, size_t n, double sample_rate, const sl_network* net, int out_port,
                            int in_port, double* out) {
    return guard([&] {
        require(in, net, out);
        const auto y = sl::transmit(to_series(in, n, sample_rate), net->data, out_port, in_port);
        std::copy(y.volts.begin(), y.volts.end(), out);
    });
}

sl_status sl_pulse_envelope(const double* in, size_t n, double sample_rate, double* out) {
    return guard([&] {
        require(in, out);
        const auto e = sl::envelope(to_series(in, n, sample_rate));
        std::copy(e.begin(), e.end(), out);
    });
}

sl_status sl_distortion_metrics(const double* in, size_t n_in, const double* out, size_t n_out, double sample_rate,
                                sl_distortion* metrics) {
    return guard([&] {
        require(in, out, metrics);
        const auto m = sl::distortion_metrics(to_series(in, n_in, sample_rate), to_series(out, n_out, sample_rate));
        *metrics = {m.envelope_correlation, m.fwhm_change_fraction, m.delay, m.fwhm_in, m.fwhm_out};
    });
}

}  // extern "C"
