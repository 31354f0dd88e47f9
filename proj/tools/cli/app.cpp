#include "app.hpp"

#include "svg.hpp"

#include <socketlab/socketlab.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace socketlab::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr double kPi = 3.14159265358979323846;

class Failure : public std::runtime_error {
public:
    Failure(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
    int code() const noexcept { return code_; }

private:
    int code_;
};

void check(sl_status st) {
    if (st == SL_OK) return;
    std::string msg = sl_last_error();
    if (st == SL_ERR_PARSE && sl_last_error_line() == 0) msg = "parse error: " + msg;
    const int code = (st == SL_ERR_COMPUTATION || st == SL_ERR_INTERNAL) ? 1 : 2;
    throw Failure(code, msg);
}

struct NetworkDeleter {
    void operator()(sl_network* p) const { sl_network_free(p); }
};
struct TdrDeleter {
    void operator()(sl_tdr_trace* p) const { sl_tdr_free(p); }
};
struct ProfileDeleter {
    void operator()(sl_profile* p) const { sl_profile_free(p); }
};
struct PlanDeleter {
    void operator()(sl_lattice_plan* p) const { sl_lattice_plan_free(p); }
};
using NetworkPtr = std::unique_ptr<sl_network, NetworkDeleter>;
using TdrPtr = std::unique_ptr<sl_tdr_trace, TdrDeleter>;
using ProfilePtr = std::unique_ptr<sl_profile, ProfileDeleter>;
using PlanPtr = std::unique_ptr<sl_lattice_plan, PlanDeleter>;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure(2, "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

NetworkPtr load_network(const std::string& path) {
    sl_network* net = nullptr;
    check(sl_network_load(path.c_str(), &net));
    return NetworkPtr(net);
}

std::vector<double> network_freqs(const sl_network* net) {
    std::vector<double> f(sl_network_size(net));
    check(sl_network_freqs(net, f.data()));
    return f;
}

std::vector<double> trace_db(const sl_network* net, int out_port, int in_port) {
    std::vector<double> s(2 * sl_network_size(net));
    check(sl_network_trace(net, out_port, in_port, s.data()));
    std::vector<double> db(s.size() / 2);
    for (std::size_t i = 0; i < db.size(); ++i) db[i] = 20.0 * std::log10(std::hypot(s[2 * i], s[2 * i + 1]));
    return db;
}

json document(const std::string& kind) {
    json j;
    j["schema"] = "socketlab/v1";
    j["kind"] = kind;
    return j;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string shortest(double v) {
    if (!std::isfinite(v)) return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string display(double v, int digits = 6) {
    if (!std::isfinite(v)) return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

class Csv {
public:
    explicit Csv(std::vector<std::string> header) {
        for (std::size_t i = 0; i < header.size(); ++i) text_ += (i ? "," : "") + header[i];
        text_ += '\n';
    }

    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) text_ += (i ? "," : "") + shortest(values[i]);
        text_ += '\n';
    }

    void row_text(const std::vector<std::string>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) text_ += (i ? "," : "") + values[i];
        text_ += '\n';
    }

    const std::string& str() const { return text_; }

private:
    std::string text_;
};

std::size_t display_width(const std::string& s) {
    std::size_t n = 0;
    for (unsigned char c : s)
        if ((c & 0xC0) != 0x80) ++n;
    return n;
}

class Table {
public:
    explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

    void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

    std::string str() const {
        std::vector<std::size_t> w(header_.size());
        for (std::size_t c = 0; c < header_.size(); ++c) w[c] = display_width(header_[c]);
        for (const auto& r : rows_)
            for (std::size_t c = 0; c < r.size() && c < w.size(); ++c) w[c] = std::max(w[c], display_width(r[c]));
        std::string out;
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t c = 0; c < w.size(); ++c) {
                const std::string cell = c < cells.size() ? cells[c] : "";
                out += (c ? "  " : "") + cell + std::string(w[c] - display_width(cell), ' ');
            }
            while (!out.empty() && out.back() == ' ') out.pop_back();
            out += '\n';
        };
        line(header_);
        std::vector<std::string> rule;
        for (auto x : w) rule.emplace_back(x, '-');
        line(rule);
        for (const auto& r : rows_) line(r);
        return out;
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

std::string key_value_table(const std::vector<std::pair<std::string, std::string>>& rows) {
    Table t({"quantity", "value"});
    for (const auto& [k, v] : rows) t.row({k, v});
    return t.str();
}

struct Report {
    json doc;
    std::string csv;
    std::optional<std::string> svg;
    std::string table;
};

struct OutputOptions {
    std::string out_path;
    std::string format;
};

const json& constants() {
    static const json c = json::parse(sl_constants_json());
    return c;
}

// --- subcommands ------------------------------------------------------------

struct NetparamsArgs {
    std::string in;
    double zl_re = 50.0;
    double zl_im = 0.0;
    std::string sign = "conventional";
};

Report cmd_netparams(const NetparamsArgs& a) {
    const auto net = load_network(a.in);
    if (sl_network_ports(net.get()) != 2) throw Failure(2, "netparams needs 2-port data");
    const std::size_t n = sl_network_size(net.get());
    const auto f = network_freqs(net.get());
    std::vector<double> zin(2 * n), vswr(n), tphi(n), tg(n);
    const sl_load_sign sign = a.sign == "printed" ? SL_LOAD_AS_PRINTED : SL_LOAD_CONVENTIONAL;
    check(sl_microwave_params(net.get(), a.zl_re, a.zl_im, sign, zin.data(), vswr.data(), tphi.data(), tg.data()));

    Report r;
    r.doc = document("netparams");
    r.doc["source"] = a.in;
    r.doc["z_ref_ohm"] = sl_network_z_ref(net.get());
    r.doc["load"] = {{"re_ohm", a.zl_re}, {"im_ohm", a.zl_im}, {"sign", a.sign}};
    json pts = json::array();
    Csv csv({"freq_hz", "z_in_re_ohm", "z_in_im_ohm", "vswr", "phase_delay_s", "group_delay_s"});
    Table t({"f (GHz)", "Re Zin (Ω)", "Im Zin (Ω)", "VSWR", "τφ (ns)", "τg (ns)"});
    for (std::size_t i = 0; i < n; ++i) {
        pts.push_back({{"freq_hz", f[i]},
                       {"z_in_re_ohm", number(zin[2 * i])},
                       {"z_in_im_ohm", number(zin[2 * i + 1])},
                       {"vswr", number(vswr[i])},
                       {"phase_delay_s", number(tphi[i])},
                       {"group_delay_s", number(tg[i])}});
        csv.row({f[i], zin[2 * i], zin[2 * i + 1], vswr[i], tphi[i], tg[i]});
        t.row({display(f[i] * 1e-9), display(zin[2 * i], 5), display(zin[2 * i + 1], 5), display(vswr[i], 5),
               display(tphi[i] * 1e9, 5), display(tg[i] * 1e9, 5)});
    }
    r.doc["points"] = std::move(pts);
    r.csv = csv.str();
    r.table = t.str();
    r.svg = render_plot({{"S11", f, trace_db(net.get(), 1, 1)}, {"S21", f, trace_db(net.get(), 2, 1)}},
                        PlotKind::Magnitude, "Scattering parameters");
    return r;
}

struct IsolationArgs {
    std::string in;
    double f_lo = 4e9;
    double f_hi = 8e9;
};

Report cmd_isolation(const IsolationArgs& a) {
    const auto net = load_network(a.in);
    sl_isolation iso{};
    check(sl_band_isolation(net.get(), a.f_lo, a.f_hi, &iso));
    Report r;
    r.doc = document("isolation");
    r.doc["source"] = a.in;
    r.doc["band_hz"] = {a.f_lo, a.f_hi};
    r.doc["isolation_db"] = iso.isolation_db;
    r.doc["worst_freq_hz"] = iso.worst_freq;
    r.doc["worst_entry"] = iso.worst_entry;
    Csv csv({"f_lo_hz", "f_hi_hz", "isolation_db", "worst_freq_hz", "worst_entry"});
    csv.row_text({shortest(a.f_lo), shortest(a.f_hi), shortest(iso.isolation_db), shortest(iso.worst_freq),
                  iso.worst_entry});
    r.csv = csv.str();
    r.table = key_value_table({{"band (GHz)", display(a.f_lo * 1e-9) + " - " + display(a.f_hi * 1e-9)},
                               {"isolation (dB)", display(iso.isolation_db, 5)},
                               {"worst frequency (GHz)", display(iso.worst_freq * 1e-9)},
                               {"worst entry", iso.worst_entry}});
    const auto f = network_freqs(net.get());
    r.svg = render_plot({{"S31", f, trace_db(net.get(), 3, 1)},
                         {"S41", f, trace_db(net.get(), 4, 1)},
                         {"S32", f, trace_db(net.get(), 3, 2)},
                         {"S42", f, trace_db(net.get(), 4, 2)}},
                        PlotKind::Magnitude, "Crosstalk");
    return r;
}

struct DipsArgs {
    std::string in;
    double f_lo = 0.0;
    double f_hi = 0.0;
    int out_port = 2;
    int in_port = 1;
};

Report cmd_dips(const DipsArgs& a) {
    const auto net = load_network(a.in);
    sl_dip_report d{};
    check(sl_classify_dip(net.get(), a.out_port, a.in_port, a.f_lo, a.f_hi, &d));
    const std::string cls = d.is_resonance ? "resonance" : "non-resonant-anomaly";
    const std::string entry = "S" + std::to_string(a.out_port) + std::to_string(a.in_port);
    Report r;
    r.doc = document("dips");
    r.doc["source"] = a.in;
    r.doc["entry"] = entry;
    r.doc["window_hz"] = {a.f_lo, a.f_hi};
    r.doc["center_freq_hz"] = d.center_freq;
    r.doc["depth_db"] = d.depth_db;
    r.doc["bandwidth_3db_hz"] = d.bandwidth_3db;
    r.doc["phase_excursion_rad"] = d.phase_excursion;
    r.doc["classification"] = cls;
    Csv csv({"center_freq_hz", "depth_db", "bandwidth_3db_hz", "phase_excursion_rad", "classification"});
    csv.row_text({shortest(d.center_freq), shortest(d.depth_db), shortest(d.bandwidth_3db),
                  shortest(d.phase_excursion), cls});
    r.csv = csv.str();
    r.table = key_value_table({{"center (GHz)", display(d.center_freq * 1e-9)},
                               {"depth (dB)", display(d.depth_db, 4)},
                               {"bandwidth (MHz)", display(d.bandwidth_3db * 1e-6, 4)},
                               {"phase excursion (rad)", display(d.phase_excursion, 4)},
                               {"classification", cls}});
    r.svg = render_plot({{entry, network_freqs(net.get()), trace_db(net.get(), a.out_port, a.in_port)}},
                        PlotKind::Magnitude, "Dip in " + entry);
    return r;
}

struct TdrExtractArgs {
    std::string in;
    double v_plus = 0.25;
    double z_c = 50.0;
    double min_step = 2.0;
    std::size_t median_window = 5;
    std::optional<double> velocity_factor;
};

Report cmd_tdr_extract(const TdrExtractArgs& a) {
    const std::string text = read_file(a.in);
    sl_tdr_trace* raw = nullptr;
    check(sl_tdr_parse_csv(text.data(), text.size(), a.v_plus, &raw));
    const TdrPtr trace(raw);
    sl_profile* praw = nullptr;
    check(sl_tdr_extract(trace.get(), a.z_c, a.min_step, a.median_window, &praw));
    const ProfilePtr profile(praw);

    const std::size_t ns = sl_profile_segment_count(profile.get());
    std::vector<double> lengths(ns, std::nan(""));
    if (a.velocity_factor) check(sl_segment_lengths(profile.get(), *a.velocity_factor, lengths.data()));

    Report r;
    r.doc = document("tdr-profile");
    r.doc["source"] = a.in;
    r.doc["v_plus_v"] = a.v_plus;
    r.doc["z_c_ohm"] = a.z_c;
    r.doc["z_source_ohm"] = sl_profile_z_source(profile.get());
    if (a.velocity_factor) r.doc["velocity_factor"] = *a.velocity_factor;
    json segs = json::array();
    Csv csv({"index", "start_round_trip_s", "one_way_delay_s", "z_ohm", "r_series_ohm", "length_m"});
    Table t({"#", "start (ns)", "delay (ns)", "Z (Ω)", "R series (Ω)", "length (mm)"});
    double t0 = 0.0;
    for (std::size_t i = 0; i < ns; ++i) {
        sl_segment s{};
        check(sl_profile_segment(profile.get(), i, &s));
        json js = {{"index", i},
                   {"start_round_trip_s", t0},
                   {"one_way_delay_s", s.one_way_delay},
                   {"z_ohm", number(s.z)},
                   {"r_series_ohm", s.r_series}};
        if (a.velocity_factor) js["length_m"] = lengths[i];
        segs.push_back(std::move(js));
        csv.row({static_cast<double>(i), t0, s.one_way_delay, s.z, s.r_series, lengths[i]});
        t.row({std::to_string(i), display(t0 * 1e9, 5), display(s.one_way_delay * 1e9, 5), display(s.z, 5),
               display(s.r_series, 4), a.velocity_factor ? display(lengths[i] * 1e3, 4) : "-"});
        t0 += 2.0 * s.one_way_delay;
    }
    r.doc["segments"] = std::move(segs);
    r.csv = csv.str();
    r.table = t.str();

    const std::size_t n = sl_tdr_size(trace.get());
    std::vector<double> times(n), z(n);
    check(sl_tdr_samples(trace.get(), times.data(), nullptr));
    check(sl_tdr_impedance(trace.get(), a.z_c, z.data()));
    r.svg = render_plot({{"Z(t)", times, z}}, PlotKind::Impedance, "TDR impedance");
    return r;
}

struct TdrSynthArgs {
    std::string segments;
    double z_source = 50.0;
    double v_plus = 0.25;
    double dt = 1e-12;
    std::optional<double> total;
    std::string order = "first";
};

std::vector<sl_segment> parse_segments(const std::string& spec) {
    std::vector<sl_segment> out;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::vector<double> parts;
        std::stringstream is(item);
        std::string p;
        while (std::getline(is, p, ':')) {
            double v = 0.0;
            const auto* b = p.data();
            const auto res = std::from_chars(b, b + p.size(), v);
            if (res.ec != std::errc() || res.ptr != b + p.size())
                throw Failure(2, "bad segment field '" + p + "' (expected delay:z[:r_series])");
            parts.push_back(v);
        }
        if (parts.size() < 2 || parts.size() > 3)
            throw Failure(2, "bad segment '" + item + "' (expected delay:z[:r_series])");
        out.push_back({parts[0], parts[1], parts.size() == 3 ? parts[2] : 0.0});
    }
    if (out.empty()) throw Failure(2, "no segments given");
    return out;
}

Report cmd_tdr_synth(const TdrSynthArgs& a) {
    const auto segs = parse_segments(a.segments);
    sl_profile* praw = nullptr;
    check(sl_profile_create(a.z_source, &praw));
    const ProfilePtr profile(praw);
    double delay = 0.0;
    for (const auto& s : segs) {
        check(sl_profile_add_segment(profile.get(), &s));
        delay += s.one_way_delay;
    }
    const double total = a.total.value_or(2.0 * delay * 1.25);
    const sl_synthesis_order order = a.order == "multi" ? SL_SYNTH_MULTI : SL_SYNTH_FIRST_ORDER;
    sl_tdr_trace* traw = nullptr;
    check(sl_tdr_synthesize(profile.get(), a.v_plus, a.dt, total, order, &traw));
    const TdrPtr trace(traw);

    const std::size_t n = sl_tdr_size(trace.get());
    std::vector<double> times(n), volts(n), z(n);
    check(sl_tdr_samples(trace.get(), times.data(), volts.data()));
    check(sl_tdr_impedance(trace.get(), a.z_source, z.data()));

    Report r;
    r.doc = document("tdr-trace");
    r.doc["v_plus_v"] = a.v_plus;
    r.doc["z_source_ohm"] = a.z_source;
    r.doc["order"] = a.order;
    json js = json::array();
    for (const auto& s : segs)
        js.push_back({{"one_way_delay_s", s.one_way_delay}, {"z_ohm", number(s.z)}, {"r_series_ohm", s.r_series}});
    r.doc["segments"] = std::move(js);
    json samples = json::array();
    Csv csv({"time_s", "volts"});
    for (std::size_t i = 0; i < n; ++i) {
        samples.push_back({{"time_s", times[i]}, {"volts", volts[i]}});
        csv.row({times[i], volts[i]});
    }
    r.doc["samples"] = std::move(samples);
    r.csv = csv.str();

    Table t({"round trip (ns)", "V (mV)", "Z (Ω)"});
    double t0 = 0.0;
    for (const auto& s : segs) {
        const double mid = t0 + s.one_way_delay;
        const auto idx = std::min(n - 1, static_cast<std::size_t>(std::llround(mid / a.dt)));
        t.row({display(times[idx] * 1e9, 5), display(volts[idx] * 1e3, 5), display(z[idx], 5)});
        t0 += 2.0 * s.one_way_delay;
    }
    r.table = "samples: " + std::to_string(n) + ", step " + display(a.dt * 1e12, 4) + " ps\n" + t.str();
    r.svg = render_plot({{"Z(t)", times, z}}, PlotKind::Impedance, "Synthesized TDR impedance");
    return r;
}

struct ResfitArgs {
    std::string in;
    bool no_normalize = false;
    double wing = 0.1;
};

Report cmd_resfit(const ResfitArgs& a) {
    const std::string text = read_file(a.in);
    double* raw = nullptr;
    std::size_t rows = 0;
    check(sl_csv_parse(text.data(), text.size(), 3, &raw, &rows));
    std::vector<double> data(raw, raw + 3 * rows);
    sl_array_free(raw);
    std::vector<double> f(rows), s21(2 * rows);
    for (std::size_t i = 0; i < rows; ++i) {
        f[i] = data[3 * i];
        s21[2 * i] = data[3 * i + 1];
        s21[2 * i + 1] = data[3 * i + 2];
    }

    std::vector<double> norm = s21;
    sl_baseline base{0.0, 0.0, 0.0, 0.0};
    std::vector<std::string> warnings;
    sl_fit_result fit{};
    if (a.no_normalize) {
        check(sl_resonator_fit(f.data(), norm.data(), rows, nullptr, 0, &fit));
    } else {
        char* w = nullptr;
        check(sl_resonator_fit_baseline(f.data(), s21.data(), rows, a.wing, 0, &fit, norm.data(), &base, &w));
        if (w) {
            std::stringstream ws(w);
            std::string line;
            while (std::getline(ws, line)) warnings.push_back(line);
            sl_string_free(w);
        }
    }

    Report r;
    r.doc = document("resfit");
    r.doc["source"] = a.in;
    r.doc["f0_hz"] = fit.model.f0;
    r.doc["q_i"] = fit.model.q_i;
    r.doc["q_c_star"] = fit.model.q_c_star;
    r.doc["phi_rad"] = fit.model.phi;
    r.doc["loaded_q"] = fit.loaded_q;
    r.doc["std_errors"] = {{"f0_hz", number(fit.std_errors.f0)},
                           {"q_i", number(fit.std_errors.q_i)},
                           {"q_c_star", number(fit.std_errors.q_c_star)},
                           {"phi_rad", number(fit.std_errors.phi)}};
    r.doc["residual_rms"] = fit.residual_rms;
    r.doc["initial_residual_rms"] = fit.initial_residual_rms;
    r.doc["iterations"] = fit.n_iter;
    r.doc["normalized"] = !a.no_normalize;
    r.doc["baseline"] = {{"log_mag0", base.log_mag0},
                         {"log_mag_slope_per_hz", base.log_mag_slope},
                         {"phase0_rad", base.phase0},
                         {"phase_slope_rad_per_hz", base.phase_slope}};
    r.doc["warnings"] = warnings;

    Csv csv({"f0_hz", "q_i", "q_c_star", "phi_rad", "f0_err_hz", "q_i_err", "q_c_star_err", "phi_err_rad",
             "residual_rms"});
    csv.row({fit.model.f0, fit.model.q_i, fit.model.q_c_star, fit.model.phi, fit.std_errors.f0, fit.std_errors.q_i,
             fit.std_errors.q_c_star, fit.std_errors.phi, fit.residual_rms});
    r.csv = csv.str();

    Table t({"parameter", "value", "std error"});
    t.row({"f0 (GHz)", display(fit.model.f0 * 1e-9, 10), display(fit.std_errors.f0 * 1e-9, 3)});
    t.row({"Qi", display(fit.model.q_i, 6), display(fit.std_errors.q_i, 3)});
    t.row({"Qc*", display(fit.model.q_c_star, 6), display(fit.std_errors.q_c_star, 3)});
    t.row({"phi (rad)", display(fit.model.phi, 5), display(fit.std_errors.phi, 3)});
    t.row({"Ql", display(fit.loaded_q, 6), ""});
    t.row({"residual rms", display(fit.residual_rms, 3), ""});
    r.table = t.str();
    for (const auto& w : warnings) r.table += "warning: " + w + "\n";

    std::vector<double> model(2 * rows);
    check(sl_resonator_synthesize(&fit.model, f.data(), rows, model.data()));
    auto to_db = [&](const std::vector<double>& c) {
        std::vector<double> db(rows);
        for (std::size_t i = 0; i < rows; ++i) db[i] = 20.0 * std::log10(std::hypot(c[2 * i], c[2 * i + 1]));
        return db;
    };
    r.svg = render_plot({{"data", f, to_db(norm)}, {"fit", f, to_db(model)}}, PlotKind::Magnitude,
                        "Resonator fit");
    return r;
}

struct CavityArgs {
    double a = 13e-3;
    double b = 13e-3;
    double height = 2e-3;
    double eps_r = 11.68;
    double d_s = 0.0;
    std::string modes = "110,120,210";
};

Report cmd_cavity(const CavityArgs& a) {
    Report r;
    r.doc = document("cavity");
    r.doc["cavity_m"] = {a.a, a.b, a.height};
    r.doc["eps_r"] = a.eps_r;
    r.doc["d_s_m"] = a.d_s;
    json modes = json::array();
    Csv csv({"mode", "vacuum_hz", "perturbed_hz"});
    Table t({"mode", "vacuum (GHz)", "perturbed (GHz)"});
    std::stringstream ss(a.modes);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.size() != 3 || item.find_first_not_of("0123456789") != std::string::npos)
            throw Failure(2, "mode '" + item + "' must be three digits, e.g. 110");
        const int m = item[0] - '0', n = item[1] - '0', l = item[2] - '0';
        double vac = 0.0, pert = 0.0;
        check(sl_te_mode_frequency(a.a, a.b, a.height, m, n, l, 1.0, &vac));
        check(sl_perturbed_mode(vac, a.eps_r, a.d_s, a.height, &pert));
        modes.push_back({{"mode", "TE" + item}, {"indices", {m, n, l}}, {"vacuum_hz", vac}, {"perturbed_hz", pert}});
        csv.row_text({"TE" + item, shortest(vac), shortest(pert)});
        t.row({"TE" + item, display(vac * 1e-9, 5), display(pert * 1e-9, 5)});
    }
    if (modes.empty()) throw Failure(2, "no modes requested");
    r.doc["modes"] = std::move(modes);
    r.csv = csv.str();
    r.table = t.str();
    return r;
}

struct DcArgs {
    std::optional<double> rho, length, width, thickness, r_io;
    double r_wire = 0.0;
};

Report cmd_dc(const DcArgs& a) {
    struct Line {
        std::string label;
        sl_dc_line line;
    };
    std::vector<Line> lines;
    const bool custom = a.rho || a.width || a.thickness;
    const auto& dc = constants().at("dc_lines");
    if (custom) {
        if (!a.rho || !a.width || !a.thickness) throw Failure(2, "--rho, --width and --thickness go together");
        sl_dc_line l{*a.rho, a.length.value_or(dc.at("length_pp_m").get<double>()), *a.width, *a.thickness, a.r_wire,
                     a.r_io.value_or(-1.0)};
        lines.push_back({"custom", l});
    } else {
        const double lpp = a.length.value_or(dc.at("length_pp_m").get<double>());
        for (const auto& s : dc.at("samples")) {
            const std::string label = s.at("metal").get<std::string>() + " " +
                                      display(s.at("thickness_m").get<double>() * 1e9) + " nm " +
                                      display(s.at("temperature_k").get<double>()) + " K";
            lines.push_back({label,
                             {s.at("rho_ohm_m").get<double>(), lpp, s.at("width_m").get<double>(),
                              s.at("thickness_m").get<double>(), a.r_wire, s.at("r_io_ohm").get<double>()}});
        }
    }

    Report r;
    r.doc = document("dc");
    json out = json::array();
    Csv csv({"label", "rho_ohm_m", "length_m", "width_m", "thickness_m", "r_t_ohm", "r_io_ohm", "contact_bound_ohm"});
    Table t({"line", "R^t (Ω)", "R_io (Ω)", "R^c bound (Ω)"});
    for (const auto& [label, l] : lines) {
        double rt = 0.0;
        check(sl_trace_resistance(&l, &rt));
        std::optional<double> bound;
        if (l.measured_r_io >= 0.0) {
            double b = 0.0;
            const sl_status st = sl_contact_resistance_bound(&l, &b);
            if (st == SL_OK) bound = b;
            else if (custom) check(st);
        }
        json j = {{"label", label},
                  {"rho_ohm_m", l.rho},
                  {"length_m", l.length_pp},
                  {"width_m", l.width_w},
                  {"thickness_m", l.thickness_d},
                  {"r_t_ohm", rt}};
        j["r_io_ohm"] = l.measured_r_io >= 0.0 ? json(l.measured_r_io) : json(nullptr);
        j["contact_bound_ohm"] = bound ? json(*bound) : json(nullptr);
        out.push_back(std::move(j));
        csv.row_text({label, shortest(l.rho), shortest(l.length_pp), shortest(l.width_w), shortest(l.thickness_d),
                      shortest(rt), l.measured_r_io >= 0.0 ? shortest(l.measured_r_io) : "",
                      bound ? shortest(*bound) : ""});
        t.row({label, display(rt, 5), l.measured_r_io >= 0.0 ? display(l.measured_r_io, 5) : "-",
               bound ? display(*bound, 4) : "-"});
    }
    r.doc["lines"] = std::move(out);
    r.csv = csv.str();
    r.table = t.str();
    return r;
}

struct ThermalArgs {
    std::optional<double> length;
    std::vector<std::string> conductors;
};

Report cmd_thermal(const ThermalArgs& a) {
    const auto& th = constants().at("thermal");
    const double length = a.length.value_or(th.at("wire_length_m").get<double>());
    std::vector<std::pair<std::string, sl_conductor>> conds;
    if (a.conductors.empty()) {
        for (const auto& c : th.at("conductors")) {
            conds.push_back({c.at("name").get<std::string>(),
                             {c.at("d_i_m").get<double>(), c.at("d_o_m").get<double>(),
                              c.at("k_t_w_per_k_m").get<double>(),
                              a.length ? length : c.value("length_m", length)}});
        }
    } else {
        for (std::size_t i = 0; i < a.conductors.size(); ++i) {
            std::vector<double> v;
            std::stringstream ss(a.conductors[i]);
            std::string p;
            while (std::getline(ss, p, ':')) {
                try {
                    std::size_t used = 0;
                    v.push_back(std::stod(p, &used));
                    if (used != p.size()) throw std::invalid_argument(p);
                } catch (const std::exception&) {
                    throw Failure(2, "bad conductor field '" + p + "' (expected d_i:d_o:k_t)");
                }
            }
            if (v.size() != 3) throw Failure(2, "conductor '" + a.conductors[i] + "' must be d_i:d_o:k_t");
            conds.push_back({"conductor " + std::to_string(i + 1), {v[0], v[1], v[2], length}});
        }
    }

    Report r;
    r.doc = document("thermal");
    r.doc["length_m"] = length;
    json out = json::array();
    Csv csv({"name", "d_i_m", "d_o_m", "length_m", "k_t_w_per_k_m", "area_m2", "rate_w_per_k"});
    Table t({"conductor", "ℓ (mm)", "A (m²)", "Π (W/K)"});
    std::vector<sl_conductor> all;
    for (const auto& [name, c] : conds) {
        double area = 0.0, rate = 0.0;
        check(sl_cross_section_area(&c, &area));
        check(sl_heat_transfer_rate(&c, 1, &rate));
        all.push_back(c);
        out.push_back({{"name", name},
                       {"d_i_m", c.d_i},
                       {"d_o_m", c.d_o},
                       {"length_m", c.length},
                       {"k_t_w_per_k_m", c.k_t},
                       {"area_m2", area},
                       {"rate_w_per_k", rate}});
        csv.row_text({name, shortest(c.d_i), shortest(c.d_o), shortest(c.length), shortest(c.k_t), shortest(area),
                      shortest(rate)});
        t.row({name, display(c.length * 1e3, 4), display(area, 4), display(rate, 4)});
    }
    double total = 0.0;
    check(sl_heat_transfer_rate(all.data(), all.size(), &total));
    r.doc["conductors"] = std::move(out);
    r.doc["total_w_per_k"] = total;
    csv.row_text({"total", "", "", "", "", "", shortest(total)});
    t.row({"total", "", "", display(total, 4)});
    r.csv = csv.str();
    r.table = t.str();
    return r;
}

struct MagneticsArgs {
    std::optional<double> b, r0, r, area;
};

Report cmd_magnetics(const MagneticsArgs& a) {
    const auto& m = constants().at("magnetics");
    sl_magnetic spec{a.b.value_or(m.at("b_measured_t").get<double>()), a.r0.value_or(m.at("r0_m").get<double>()),
                     a.r.value_or(m.at("r_target_m").get<double>()),
                     a.area.value_or(m.at("squid_loop_m2").get<double>())};
    sl_flux flux{};
    check(sl_dipole_field_and_flux(&spec, &flux));
    Report r;
    r.doc = document("magnetics");
    r.doc["b_measured_t"] = spec.b_measured;
    r.doc["r0_m"] = spec.r0;
    r.doc["r_target_m"] = spec.r_target;
    r.doc["loop_area_m2"] = spec.loop_area;
    r.doc["b_target_t"] = flux.b_target;
    r.doc["flux_wb"] = flux.flux;
    r.doc["flux_ratio"] = flux.flux_ratio;
    Csv csv({"b_measured_t", "r0_m", "r_target_m", "loop_area_m2", "b_target_t", "flux_wb", "flux_ratio"});
    csv.row({spec.b_measured, spec.r0, spec.r_target, spec.loop_area, flux.b_target, flux.flux, flux.flux_ratio});
    r.csv = csv.str();
    r.table = key_value_table({{"B at r0 (mG)", display(spec.b_measured * 1e7, 4)},
                               {"r0 (mm)", display(spec.r0 * 1e3)},
                               {"r (mm)", display(spec.r_target * 1e3)},
                               {"B at r (mG)", display(flux.b_target * 1e7, 4)},
                               {"flux (Wb)", display(flux.flux, 4)},
                               {"flux / flux quantum", display(flux.flux_ratio, 4)}});
    return r;
}

json settings_json(const std::vector<sl_compression_setting>& s) {
    json out = json::array();
    for (const auto& x : s) out.push_back({{"k", x.k}, {"protrusion_m", x.protrusion}, {"preferred", x.preferred != 0}});
    return out;
}

struct LayoutArgs {
    int n = 10;
    double a = 2.25e-3;
    double b = 3.5e-3;
    double c = 2.25e-3;
    double pitch = 500e-6;
    double max_side = 72e-3;
};

Report cmd_layout(const LayoutArgs& a) {
    sl_lattice_spec spec{};
    sl_lattice_spec_default(&spec);
    spec.n = a.n;
    spec.dist_a = a.a;
    spec.dist_b = a.b;
    spec.dist_c = a.c;
    spec.wire_pitch = a.pitch;
    spec.max_chip_side = a.max_side;
    sl_lattice_plan* raw = nullptr;
    check(sl_plan_lattice(&spec, nullptr, &raw));
    const PlanPtr plan(raw);
    sl_lattice_summary s{};
    check(sl_lattice_plan_summary(plan.get(), &s));
    sl_wiring w{};
    check(sl_wiring_scaling(a.n, &w));

    Report r;
    r.doc = document("layout");
    r.doc["n"] = s.n;
    r.doc["cell_m"] = s.cell;
    r.doc["cells"] = (s.n - 1) * (s.n - 1);
    r.doc["chip_side_m"] = s.chip_side;
    r.doc["max_chip_side_m"] = s.max_chip_side;
    r.doc["fits"] = true;
    r.doc["wires_per_qubit"] = s.wires_per_qubit;
    r.doc["total_pads"] = s.total_pads;
    r.doc["readout_lines"] = s.readout_lines;
    r.doc["wiring"] = {{"wirebond_count", w.wirebond_count},
                       {"socket_count", w.socket_count},
                       {"socket_exceeds", w.socket_exceeds != 0}};
    json qubits = json::array();
    for (std::size_t i = 0; i < s.n_qubits; ++i) {
        double x = 0.0, y = 0.0;
        check(sl_lattice_plan_qubit(plan.get(), i, &x, &y));
        qubits.push_back({x, y});
    }
    r.doc["qubits_m"] = std::move(qubits);
    json pads = json::array();
    Csv csv({"kind", "x_m", "y_m", "qubit"});
    static const char* kinds[] = {"xy", "z", "readout"};
    for (int i = 0; i < s.total_pads; ++i) {
        sl_pad p{};
        check(sl_lattice_plan_pad(plan.get(), static_cast<std::size_t>(i), &p));
        pads.push_back({{"kind", kinds[p.kind]}, {"x_m", p.x}, {"y_m", p.y}, {"qubit", p.qubit}});
        csv.row_text({kinds[p.kind], shortest(p.x), shortest(p.y), std::to_string(p.qubit)});
    }
    r.doc["pads"] = std::move(pads);
    std::vector<sl_compression_setting> settings(s.n_settings);
    for (std::size_t i = 0; i < s.n_settings; ++i) check(sl_lattice_plan_setting(plan.get(), i, &settings[i]));
    r.doc["settings"] = settings_json(settings);
    r.doc["contraction"] = {{"al_m", s.al_contraction}, {"si_m", s.si_contraction}, {"bias_m", s.contraction_bias}};
    r.csv = csv.str();
    r.table = key_value_table({{"qubits per side", std::to_string(s.n)},
                               {"cell (mm)", display(s.cell * 1e3)},
                               {"chip side (mm)", display(s.chip_side * 1e3)},
                               {"wafer bound (mm)", display(s.max_chip_side * 1e3)},
                               {"pads", std::to_string(s.total_pads)},
                               {"readout lines", std::to_string(s.readout_lines)},
                               {"wires per qubit", std::to_string(s.wires_per_qubit)},
                               {"wire bonds (4n)", std::to_string(w.wirebond_count)},
                               {"sockets (n²)", std::to_string(w.socket_count)},
                               {"Al contraction (μm)", display(s.al_contraction * 1e6, 4)},
                               {"Si contraction (μm)", display(s.si_contraction * 1e6, 4)}});
    return r;
}

struct CompressionArgs {
    sl_compression_plan plan{};
    double spring_compression = 2.0e-3;
};

Report cmd_compression(const CompressionArgs& a) {
    std::vector<sl_compression_setting> settings(16);
    std::size_t count = 0;
    sl_status st = sl_compression_settings(&a.plan, settings.data(), settings.size(), &count);
    if (st == SL_ERR_BUFFER_TOO_SMALL) {
        settings.resize(count);
        st = sl_compression_settings(&a.plan, settings.data(), settings.size(), &count);
    }
    check(st);
    settings.resize(count);

    Report r;
    r.doc = document("compression");
    r.doc["plan"] = {{"l_c_m", a.plan.l_c},
                     {"stroke_m", a.plan.stroke},
                     {"base_m", a.plan.base},
                     {"pitch_m", a.plan.pitch},
                     {"preferred_k", a.plan.preferred_k}};
    r.doc["settings"] = settings_json(settings);
    Csv csv({"k", "protrusion_m", "preferred"});
    Table t({"k", "ℓp (mm)", "preferred"});
    for (const auto& s : settings) {
        csv.row_text({std::to_string(s.k), shortest(s.protrusion), s.preferred ? "true" : "false"});
        t.row({std::to_string(s.k), display(s.protrusion * 1e3, 4), s.preferred ? "yes" : ""});
    }

    json springs = json::array();
    Table st_table({"spring", "travel (mm)", "F (N)", "operating range (N)"});
    for (std::size_t i = 0; i < sl_spring_count(); ++i) {
        sl_spring info{};
        check(sl_spring_info(i, &info));
        sl_spring_force f{};
        check(sl_spring_force_lookup(info.id, a.spring_compression, &f));
        json j = {{"id", info.id},
                  {"travel_m", info.travel},
                  {"force_full_n", info.force_full},
                  {"compression_m", a.spring_compression},
                  {"force_n", f.force}};
        std::string range = "-";
        if (f.has_operating_range) {
            j["inner_range_n"] = {f.inner_range[0], f.inner_range[1]};
            j["outer_range_n"] = {f.outer_range[0], f.outer_range[1]};
            range = "inner " + display(f.inner_range[0]) + "-" + display(f.inner_range[1]) + ", outer " +
                    display(f.outer_range[0]) + "-" + display(f.outer_range[1]);
        }
        springs.push_back(std::move(j));
        st_table.row({info.id, display(info.travel * 1e3, 4), display(f.force, 3), range});
    }
    r.doc["springs"] = std::move(springs);
    r.csv = csv.str();
    r.table = t.str() + "\nsprings at " + display(a.spring_compression * 1e3) + " mm compression\n" + st_table.str();
    return r;
}

struct YieldArgs {
    sl_tolerance_spec spec{};
    double rot_tol_deg = 28.0;
};

Report cmd_yield(YieldArgs a) {
    a.spec.rot_tol = a.rot_tol_deg * kPi / 180.0;
    sl_yield_report y{};
    check(sl_mating_yield(&a.spec, &y));
    Report r;
    r.doc = document("yield");
    r.doc["spec"] = {{"lateral_tol_m", a.spec.lateral_tol},
                     {"rot_tol_rad", a.spec.rot_tol},
                     {"machining_sigma_m", a.spec.machining_sigma},
                     {"dicing_sigma_m", a.spec.dicing_sigma},
                     {"contraction_al_coeff", a.spec.contraction_al_coeff},
                     {"contraction_si_coeff", a.spec.contraction_si_coeff},
                     {"chip_side_m", a.spec.chip_side},
                     {"trials", a.spec.trials},
                     {"seed", a.spec.seed}};
    r.doc["yield"] = y.yield;
    r.doc["trials"] = y.trials;
    r.doc["passed"] = y.passed;
    r.doc["contraction_bias_m"] = y.contraction_bias;
    r.doc["lateral_m"] = {{"p50", y.lateral.p50}, {"p90", y.lateral.p90}, {"p99", y.lateral.p99}, {"max", y.lateral.max}};
    r.doc["rotation_rad"] = {
        {"p50", y.rotation.p50}, {"p90", y.rotation.p90}, {"p99", y.rotation.p99}, {"max", y.rotation.max}};
    Csv csv({"yield", "trials", "passed", "contraction_bias_m", "lateral_p50_m", "lateral_p90_m", "lateral_p99_m",
             "lateral_max_m", "rotation_p50_rad", "rotation_p90_rad", "rotation_p99_rad", "rotation_max_rad"});
    csv.row({y.yield, static_cast<double>(y.trials), static_cast<double>(y.passed), y.contraction_bias, y.lateral.p50,
             y.lateral.p90, y.lateral.p99, y.lateral.max, y.rotation.p50, y.rotation.p90, y.rotation.p99,
             y.rotation.max});
    r.csv = csv.str();
    Table t({"statistic", "lateral (μm)", "rotation (deg)"});
    const double deg = 180.0 / kPi;
    t.row({"p50", display(y.lateral.p50 * 1e6, 4), display(y.rotation.p50 * deg, 4)});
    t.row({"p90", display(y.lateral.p90 * 1e6, 4), display(y.rotation.p90 * deg, 4)});
    t.row({"p99", display(y.lateral.p99 * 1e6, 4), display(y.rotation.p99 * deg, 4)});
    t.row({"max", display(y.lateral.max * 1e6, 4), display(y.rotation.max * deg, 4)});
    r.table = "yield " + display(y.yield, 6) + " (" + std::to_string(y.passed) + " of " + std::to_string(y.trials) +
              "), contraction bias " + display(y.contraction_bias * 1e6, 4) + " μm\n" + t.str();
    return r;
}

struct PulseArgs {
    std::string in;
    sl_pulse_spec spec{};
    int out_port = 2;
    int in_port = 1;
};

Report cmd_pulse(const PulseArgs& a) {
    const auto net = load_network(a.in);
    std::size_t n = 0;
    check(sl_pulse_sample_count(&a.spec, &n));
    std::vector<double> x(n), y(n), ex(n), ey(n);
    check(sl_pulse_synthesize(&a.spec, x.data()));
    check(sl_pulse_transmit(x.data(), n, a.spec.sample_rate, net.get(), a.out_port, a.in_port, y.data()));
    sl_distortion m{};
    check(sl_distortion_metrics(x.data(), n, y.data(), n, a.spec.sample_rate, &m));
    check(sl_pulse_envelope(x.data(), n, a.spec.sample_rate, ex.data()));
    check(sl_pulse_envelope(y.data(), n, a.spec.sample_rate, ey.data()));

    Report r;
    r.doc = document("pulse");
    r.doc["source"] = a.in;
    r.doc["entry"] = "S" + std::to_string(a.out_port) + std::to_string(a.in_port);
    r.doc["spec"] = {{"carrier_hz", a.spec.carrier},
                     {"sideband_hz", a.spec.sideband},
                     {"fwhm_s", a.spec.fwhm},
                     {"sample_rate_hz", a.spec.sample_rate},
                     {"duration_s", a.spec.duration}};
    r.doc["metrics"] = {{"envelope_correlation", m.envelope_correlation},
                        {"fwhm_change_fraction", m.fwhm_change_fraction},
                        {"delay_s", m.delay},
                        {"fwhm_in_s", m.fwhm_in},
                        {"fwhm_out_s", m.fwhm_out}};
    Csv csv({"time_s", "volts_in", "volts_out"});
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = static_cast<double>(i) / a.spec.sample_rate;
        csv.row({t[i], x[i], y[i]});
    }
    r.csv = csv.str();
    r.table = key_value_table({{"envelope correlation", display(m.envelope_correlation, 6)},
                               {"FWHM in (ns)", display(m.fwhm_in * 1e9, 5)},
                               {"FWHM out (ns)", display(m.fwhm_out * 1e9, 5)},
                               {"FWHM change (%)", display(m.fwhm_change_fraction * 100.0, 4)},
                               {"delay (ns)", display(m.delay * 1e9, 5)}});
    r.svg = render_plot({{"input", t, ex}, {"output", t, ey}}, PlotKind::Envelope, "Pulse envelopes");
    return r;
}

// --- output -----------------------------------------------------------------

std::string resolve_format(const OutputOptions& o) {
    if (!o.format.empty()) return o.format;
    auto ends_with = [&](const char* ext) {
        const std::string e(ext);
        return o.out_path.size() >= e.size() && o.out_path.compare(o.out_path.size() - e.size(), e.size(), e) == 0;
    };
    if (ends_with(".csv")) return "csv";
    if (ends_with(".svg")) return "svg";
    return "json";
}

void emit(const std::string& name, const Report& r, const OutputOptions& o, std::ostream& out) {
    const std::string fmt = resolve_format(o);
    std::string body;
    if (fmt == "json") body = r.doc.dump(2) + "\n";
    else if (fmt == "csv") body = r.csv;
    else if (fmt == "svg") {
        if (!r.svg) throw Failure(2, "svg output is not available for '" + name + "'");
        body = *r.svg;
    }

    if (o.out_path == "-") {
        out << body;
        return;
    }
    out << r.table;
    if (!o.out_path.empty()) {
        std::ofstream f(o.out_path, std::ios::binary);
        if (!f) throw Failure(2, "cannot write '" + o.out_path + "'");
        f << body;
        if (!f) throw Failure(2, "failed writing '" + o.out_path + "'");
    }
}

void add_output(CLI::App* sub, OutputOptions& o, bool svg) {
    sub->add_option("--out", o.out_path, "Artifact path ('-' for stdout)");
    std::vector<std::string> formats{"json", "csv"};
    if (svg) formats.emplace_back("svg");
    sub->add_option("--format", o.format, "Artifact format")->check(CLI::IsMember(formats));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Microwave, TDR, resonator and packaging calculations for wire-socket qubit packages", "socketlab"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", std::string(sl_version()));

    OutputOptions output;
    std::function<Report()> action;
    std::string chosen;

    NetparamsArgs np;
    auto* s_np = app.add_subcommand("netparams", "Input impedance, VSWR, phase and group delay of a 2-port");
    s_np->add_option("--in", np.in, "Touchstone .s2p file")->required();
    s_np->add_option("--zl-re", np.zl_re, "Load resistance (ohm)");
    s_np->add_option("--zl-im", np.zl_im, "Load reactance (ohm)");
    s_np->add_option("--load-sign", np.sign, "Load term sign in the input impedance")
        ->check(CLI::IsMember({"conventional", "printed"}));
    add_output(s_np, output, true);
    s_np->callback([&] { action = [&] { return cmd_netparams(np); }; });

    IsolationArgs iso;
    auto* s_iso = app.add_subcommand("isolation", "Worst crosstalk between line pairs of a 4-port");
    s_iso->add_option("--in", iso.in, "Touchstone .s4p file")->required();
    s_iso->add_option("--f-lo", iso.f_lo, "Band start (Hz)");
    s_iso->add_option("--f-hi", iso.f_hi, "Band stop (Hz)");
    add_output(s_iso, output, true);
    s_iso->callback([&] { action = [&] { return cmd_isolation(iso); }; });

    DipsArgs dip;
    auto* s_dip = app.add_subcommand("dips", "Characterize a transmission dip");
    s_dip->add_option("--in", dip.in, "Touchstone file")->required();
    s_dip->add_option("--f-lo", dip.f_lo, "Window start (Hz)")->required();
    s_dip->add_option("--f-hi", dip.f_hi, "Window stop (Hz)")->required();
    s_dip->add_option("--out-port", dip.out_port, "Receiving port");
    s_dip->add_option("--in-port", dip.in_port, "Driven port");
    add_output(s_dip, output, true);
    s_dip->callback([&] { action = [&] { return cmd_dips(dip); }; });

    TdrExtractArgs tx;
    double vf = 0.0;
    auto* s_tx = app.add_subcommand("tdr-extract", "Impedance profile from a TDR trace");
    s_tx->add_option("--in", tx.in, "CSV with time_s, volts")->required();
    s_tx->add_option("--v-plus", tx.v_plus, "Incident step amplitude (V)");
    s_tx->add_option("--zc", tx.z_c, "Reference impedance (ohm)");
    s_tx->add_option("--min-step", tx.min_step, "Smallest impedance step kept (ohm)");
    s_tx->add_option("--median-window", tx.median_window, "Median filter length (samples)");
    auto* vf_opt = s_tx->add_option("--velocity-factor", vf, "Propagation velocity / c for segment lengths");
    add_output(s_tx, output, true);
    s_tx->callback([&] {
        if (vf_opt->count()) tx.velocity_factor = vf;
        action = [&] { return cmd_tdr_extract(tx); };
    });

    TdrSynthArgs ts;
    double total = 0.0;
    auto* s_ts = app.add_subcommand("tdr-synth", "Synthesize a TDR trace from a segment list");
    s_ts->add_option("--segments", ts.segments, "delay:z[:r_series],... (s, ohm, ohm)")->required();
    s_ts->add_option("--z-source", ts.z_source, "Source impedance (ohm)");
    s_ts->add_option("--v-plus", ts.v_plus, "Incident step amplitude (V)");
    s_ts->add_option("--dt", ts.dt, "Sample interval (s)");
    auto* total_opt = s_ts->add_option("--total", total, "Record length (s)");
    s_ts->add_option("--order", ts.order, "Reflection model")->check(CLI::IsMember({"first", "multi"}));
    add_output(s_ts, output, true);
    s_ts->callback([&] {
        if (total_opt->count()) ts.total = total;
        action = [&] { return cmd_tdr_synth(ts); };
    });

    ResfitArgs rf;
    auto* s_rf = app.add_subcommand("resfit", "Fit a notch resonator to an S21 sweep");
    s_rf->add_option("--in", rf.in, "CSV with freq_hz, re, im")->required();
    s_rf->add_flag("--no-normalize", rf.no_normalize, "Skip baseline removal");
    s_rf->add_option("--wing", rf.wing, "Baseline wing fraction per side");
    add_output(s_rf, output, true);
    s_rf->callback([&] { action = [&] { return cmd_resfit(rf); }; });

    CavityArgs cav;
    auto* s_cav = app.add_subcommand("cavity", "Rectangular box modes with substrate perturbation");
    s_cav->add_option("--a", cav.a, "x extent (m)");
    s_cav->add_option("--b", cav.b, "y extent (m)");
    s_cav->add_option("--height", cav.height, "Cavity height (m)");
    s_cav->add_option("--eps-r", cav.eps_r, "Substrate relative permittivity");
    s_cav->add_option("--ds", cav.d_s, "Substrate thickness (m)");
    s_cav->add_option("--modes", cav.modes, "Comma-separated mode indices, e.g. 110,120");
    add_output(s_cav, output, false);
    s_cav->callback([&] { action = [&] { return cmd_cavity(cav); }; });

    DcArgs dc;
    double rho = 0, len = 0, width = 0, thick = 0, rio = 0;
    auto* s_dc = app.add_subcommand("dc", "Trace resistance and contact-resistance bound");
    auto* o_rho = s_dc->add_option("--rho", rho, "Resistivity (ohm m)");
    auto* o_len = s_dc->add_option("--length", len, "Pad-to-pad length (m)");
    auto* o_w = s_dc->add_option("--width", width, "Trace width (m)");
    auto* o_t = s_dc->add_option("--thickness", thick, "Film thickness (m)");
    auto* o_rio = s_dc->add_option("--r-io", rio, "Measured inner-to-outer resistance (ohm)");
    s_dc->add_option("--r-wire", dc.r_wire, "Wire and cable inner-conductor resistance (ohm)");
    add_output(s_dc, output, false);
    s_dc->callback([&] {
        if (o_rho->count()) dc.rho = rho;
        if (o_len->count()) dc.length = len;
        if (o_w->count()) dc.width = width;
        if (o_t->count()) dc.thickness = thick;
        if (o_rio->count()) dc.r_io = rio;
        action = [&] { return cmd_dc(dc); };
    });

    ThermalArgs th;
    double th_len = 0;
    auto* s_th = app.add_subcommand("thermal", "Heat-transfer rate through wire conductors");
    auto* o_thl = s_th->add_option("--length", th_len, "Conductor length (m)");
    s_th->add_option("--conductor", th.conductors, "d_i:d_o:k_t (m, m, W/K/m); repeatable");
    add_output(s_th, output, false);
    s_th->callback([&] {
        if (o_thl->count()) th.length = th_len;
        action = [&] { return cmd_thermal(th); };
    });

    MagneticsArgs mg;
    double mb = 0, mr0 = 0, mr = 0, marea = 0;
    auto* s_mg = app.add_subcommand("magnetics", "Dipole field scaling and loop flux");
    auto* o_b = s_mg->add_option("--b", mb, "Field measured at r0 (T)");
    auto* o_r0 = s_mg->add_option("--r0", mr0, "Measurement distance (m)");
    auto* o_r = s_mg->add_option("--r", mr, "Target distance (m)");
    auto* o_area = s_mg->add_option("--area", marea, "Loop area (m^2)");
    add_output(s_mg, output, false);
    s_mg->callback([&] {
        if (o_b->count()) mg.b = mb;
        if (o_r0->count()) mg.r0 = mr0;
        if (o_r->count()) mg.r = mr;
        if (o_area->count()) mg.area = marea;
        action = [&] { return cmd_magnetics(mg); };
    });

    LayoutArgs lay;
    auto* s_lay = app.add_subcommand("layout", "Chip size and pad coordinates for an n x n lattice");
    s_lay->add_option("--n", lay.n, "Qubits per side")->required();
    s_lay->add_option("--a", lay.a, "Distance A (m)");
    s_lay->add_option("--b", lay.b, "Distance B (m)");
    s_lay->add_option("--c", lay.c, "Distance C (m)");
    s_lay->add_option("--pitch", lay.pitch, "Wire pitch (m)");
    s_lay->add_option("--max-side", lay.max_side, "Largest chip side (m)");
    add_output(s_lay, output, false);
    s_lay->callback([&] { action = [&] { return cmd_layout(lay); }; });

    CompressionArgs cp;
    sl_compression_plan_default(&cp.plan);
    auto* s_cp = app.add_subcommand("compression", "Allowed wire protrusion settings and spring forces");
    s_cp->add_option("--lc", cp.plan.l_c, "Cavity clearance (m)");
    s_cp->add_option("--stroke", cp.plan.stroke, "Wire stroke (m)");
    s_cp->add_option("--base", cp.plan.base, "Protrusion at k = 0 (m)");
    s_cp->add_option("--pitch", cp.plan.pitch, "Thread pitch (m)");
    s_cp->add_option("--preferred-k", cp.plan.preferred_k, "Preferred setting");
    s_cp->add_option("--spring-compression", cp.spring_compression, "Spring compression for force lookup (m)");
    add_output(s_cp, output, false);
    s_cp->callback([&] { action = [&] { return cmd_compression(cp); }; });

    YieldArgs yd;
    sl_tolerance_spec_default(&yd.spec);
    {
        const auto& c = constants().at("contraction");
        yd.spec.machining_sigma = 25.4e-6;
        yd.spec.dicing_sigma = 4e-6;
        yd.spec.contraction_al_coeff = c.at("al_integrated_coefficient_4k").get<double>();
        yd.spec.chip_side = c.at("recess_side_m").get<double>();
        yd.spec.contraction_si_coeff = c.at("si_contraction_m").get<double>() / yd.spec.chip_side;
        yd.spec.trials = 100000;
    }
    auto* s_y = app.add_subcommand("yield", "Monte Carlo mating yield");
    s_y->add_option("--lateral-tol", yd.spec.lateral_tol, "Lateral pass bound (m)");
    s_y->add_option("--rot-tol-deg", yd.rot_tol_deg, "Rotational pass bound (degrees)");
    s_y->add_option("--machining-sigma", yd.spec.machining_sigma, "Machining error sigma (m)");
    s_y->add_option("--dicing-sigma", yd.spec.dicing_sigma, "Dicing error sigma (m)");
    s_y->add_option("--al-coeff", yd.spec.contraction_al_coeff, "Integrated Al contraction");
    s_y->add_option("--si-coeff", yd.spec.contraction_si_coeff, "Integrated Si contraction");
    s_y->add_option("--chip-side", yd.spec.chip_side, "Chip side (m)");
    s_y->add_option("--trials", yd.spec.trials, "Monte Carlo trials");
    s_y->add_option("--seed", yd.spec.seed, "Random seed");
    add_output(s_y, output, false);
    s_y->callback([&] { action = [&] { return cmd_yield(yd); }; });

    PulseArgs pl;
    sl_pulse_spec_default(&pl.spec);
    auto* s_pl = app.add_subcommand("pulse", "Send a Gaussian pulse through measured S-parameters");
    s_pl->add_option("--in", pl.in, "Touchstone file")->required();
    s_pl->add_option("--carrier", pl.spec.carrier, "Carrier frequency (Hz)");
    s_pl->add_option("--sideband", pl.spec.sideband, "Sideband frequency (Hz)");
    s_pl->add_option("--fwhm", pl.spec.fwhm, "Envelope FWHM (s)");
    s_pl->add_option("--rate", pl.spec.sample_rate, "Sample rate (Hz)");
    s_pl->add_option("--duration", pl.spec.duration, "Record length (s)");
    s_pl->add_option("--out-port", pl.out_port, "Receiving port");
    s_pl->add_option("--in-port", pl.in_port, "Driven port");
    add_output(s_pl, output, true);
    s_pl->callback([&] { action = [&] { return cmd_pulse(pl); }; });

    if (!args.empty() && !args.front().empty() && args.front().front() != '-') {
        bool known = false;
        for (const auto* sub : app.get_subcommands({}))
            if (sub->get_name() == args.front()) known = true;
        if (!known) {
            err << "error: unknown subcommand '" << args.front() << "'\n\n" << app.help();
            return 2;
        }
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::Success& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    for (const auto* sub : app.get_subcommands())
        if (sub->parsed()) chosen = sub->get_name();

    try {
        const Report r = action();
        emit(chosen, r, output, out);
        return 0;
    } catch (const Failure& f) {
        err << "error: " << f.what() << "\n";
        return f.code();
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace socketlab::cli
