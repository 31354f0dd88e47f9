#include "touchstone.hpp"

#include "error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace socketlab {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
// Magnitudes below this are written as this floor in dB output (-3000 dB).
constexpr double kDbFloorMagnitude = 1e-150;

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        if (end == text.size()) break;
        start = end + 1;
    }
    return lines;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> toks;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) toks.push_back(s.substr(i, j - i));
        i = j;
    }
    return toks;
}

std::optional<double> to_number(std::string_view tok) {
    tok = trim(tok);
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    if (tok.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) return std::nullopt;
    return v;
}

double unit_scale(const std::string& u) {
    if (u == "HZ") return 1.0;
    if (u == "KHZ") return 1e3;
    if (u == "MHZ") return 1e6;
    if (u == "GHZ") return 1e9;
    return 0.0;
}

struct OptionLine {
    double freq_scale = 1e9;  // v1 default unit: GHz
    DataFormat format = DataFormat::MA;
    double z_ref = 50.0;
};

OptionLine parse_option_line(std::string_view body, std::size_t line_no) {
    OptionLine opt;
    const auto toks = split_ws(body);
    bool have_unit = false, have_param = false, have_format = false, have_r = false;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        const std::string t = upper(toks[i]);
        if (const double scale = unit_scale(t); scale > 0.0) {
            if (have_unit) throw ParseError("malformed option line: repeated frequency unit", line_no);
            opt.freq_scale = scale;
            have_unit = true;
        } else if (t == "S" || t == "Y" || t == "Z" || t == "H" || t == "G") {
            if (have_param) throw ParseError("malformed option line: repeated parameter type", line_no);
            if (t != "S") throw ParseError("unsupported parameter type '" + t + "' (only S is supported)", line_no);
            have_param = true;
        } else if (t == "RI" || t == "MA" || t == "DB") {
            if (have_format) throw ParseError("malformed option line: repeated data format", line_no);
            opt.format = parse_data_format(t);
            have_format = true;
        } else if (t == "R") {
            if (have_r || i + 1 >= toks.size())
                throw ParseError("malformed option line: 'R' must be followed by one impedance", line_no);
            const auto z = to_number(toks[++i]);
            if (!z || !(*z > 0.0) || !std::isfinite(*z))
                throw ParseError("malformed option line: invalid reference impedance", line_no);
            opt.z_ref = *z;
            have_r = true;
        } else {
            throw ParseError("malformed option line: unexpected token '" + std::string(toks[i]) + "'", line_no);
        }
    }
    return opt;
}

cplx pair_to_complex(double a, double b, DataFormat fmt) {
    switch (fmt) {
        case DataFormat::RI: return {a, b};
        case DataFormat::MA: return std::polar(a, b * kDegToRad);
        case DataFormat::DB: return std::polar(std::pow(10.0, a / 20.0), b * kDegToRad);
    }
    return {};
}

struct Record {
    std::size_t line = 0;
    std::vector<double> values;
};

int ports_for_count(std::size_t count) {
    if (count < 3 || count % 2 == 0) return 0;
    const std::size_t pairs = (count - 1) / 2;
    const auto p = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(pairs))));
    return p * p == pairs ? static_cast<int>(p) : 0;
}

}  // namespace

std::vector<cplx> NetworkData::trace(int out_port, int in_port) const {
    if (out_port < 1 || out_port > ports || in_port < 1 || in_port > ports)
        throw InputError("port pair (" + std::to_string(out_port) + "," + std::to_string(in_port) +
                         ") outside a " + std::to_string(ports) + "-port network");
    std::vector<cplx> out;
    out.reserve(s.size());
    for (const auto& m : s) out.push_back(m(out_port - 1, in_port - 1));
    return out;
}

void NetworkData::validate() const {
    if (ports != 2 && ports != 4) throw InputError("unsupported port count " + std::to_string(ports));
    if (!(z_ref > 0.0) || !std::isfinite(z_ref)) throw InputError("reference impedance must be positive");
    if (freqs.empty()) throw InputError("network has no frequency points");
    if (s.size() != freqs.size()) throw InputError("one S-matrix per frequency point required");
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        if (!(freqs[i] > 0.0) || !std::isfinite(freqs[i])) throw InputError("frequencies must be positive and finite");
        if (i > 0 && !(freqs[i] > freqs[i - 1])) throw InputError("frequencies must be strictly increasing");
        if (s[i].rows() != ports || s[i].cols() != ports) throw InputError("S-matrix size does not match port count");
        if (!s[i].allFinite()) throw InputError("non-finite S-parameter entry");
    }
}

void TdrTrace::validate() const {
    if (times.empty()) throw InputError("TDR trace is empty");
    if (times.size() != v_meas.size()) throw InputError("TDR time and voltage columns differ in length");
    if (!(v_plus > 0.0)) throw InputError("incident step amplitude must be positive");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw InputError("TDR times must be strictly increasing");
}

DataFormat parse_data_format(std::string_view name) {
    const std::string u = upper(name);
    if (u == "RI") return DataFormat::RI;
    if (u == "MA") return DataFormat::MA;
    if (u == "DB") return DataFormat::DB;
    throw InputError("unknown data format '" + std::string(name) + "' (expected RI, MA or DB)");
}

std::string_view to_string(DataFormat fmt) {
    switch (fmt) {
        case DataFormat::RI: return "RI";
        case DataFormat::MA: return "MA";
        case DataFormat::DB: return "DB";
    }
    return "RI";
}

NetworkData parse_touchstone(std::string_view text, std::optional<int> ports_hint) {
    if (ports_hint && *ports_hint != 2 && *ports_hint != 4)
        throw ParseError("unsupported port count " + std::to_string(*ports_hint), 0);

    OptionLine opt;
    bool seen_option = false;
    std::vector<Record> records;

    const auto lines = split_lines(text);
    for (std::size_t idx = 0; idx < lines.size(); ++idx) {
        const std::size_t line_no = idx + 1;
        std::string_view line = lines[idx];
        if (const auto bang = line.find('!'); bang != std::string_view::npos) line = line.substr(0, bang);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[')
            throw ParseError("Touchstone v2 keyword '" + std::string(line) + "' is not supported", line_no);
        if (line.front() == '#') {
            if (!records.empty()) throw ParseError("option line must precede the data", line_no);
            // Only the first option line is significant in v1.
            if (!seen_option) opt = parse_option_line(line.substr(1), line_no);
            seen_option = true;
            continue;
        }

        std::vector<double> nums;
        for (const auto tok : split_ws(line)) {
            const auto v = to_number(tok);
            if (!v) throw ParseError("non-numeric token '" + std::string(tok) + "'", line_no);
            if (!std::isfinite(*v)) throw ParseError("non-finite value", line_no);
            nums.push_back(*v);
        }
        // Odd-length lines open a record (frequency + value pairs); even-length
        // lines continue a wrapped 4-port matrix.
        if (nums.size() % 2 == 1) {
            records.push_back({line_no, std::move(nums)});
        } else {
            if (records.empty()) throw ParseError("wrong column count: continuation line without a frequency", line_no);
            auto& vals = records.back().values;
            vals.insert(vals.end(), nums.begin(), nums.end());
        }
    }

    if (records.empty()) throw ParseError("no data records", 0);

    const int ports = ports_for_count(records.front().values.size());
    if (ports == 0)
        throw ParseError("wrong column count (" + std::to_string(records.front().values.size()) +
                             " values in record)", records.front().line);
    if (ports != 2 && ports != 4) throw ParseError("unsupported port count " + std::to_string(ports), records.front().line);
    if (ports_hint && *ports_hint != ports)
        throw ParseError("record layout implies " + std::to_string(ports) + " ports, expected " +
                             std::to_string(*ports_hint), records.front().line);

    const std::size_t expected = 1 + 2 * static_cast<std::size_t>(ports * ports);
    NetworkData net;
    net.ports = ports;
    net.z_ref = opt.z_ref;
    net.freqs.reserve(records.size());
    net.s.reserve(records.size());
    for (const auto& rec : records) {
        if (rec.values.size() != expected)
            throw ParseError("wrong column count: expected " + std::to_string(expected) + " values, found " +
                                 std::to_string(rec.values.size()), rec.line);
        const double f = rec.values[0] * opt.freq_scale;
        if (!(f > 0.0)) throw ParseError("frequency must be positive", rec.line);
        if (!net.freqs.empty() && !(f > net.freqs.back()))
            throw ParseError("non-monotonic frequency", rec.line);

        Eigen::MatrixXcd m(ports, ports);
        for (int k = 0; k < ports * ports; ++k) {
            const cplx v = pair_to_complex(rec.values[1 + 2 * k], rec.values[2 + 2 * k], opt.format);
            if (ports == 2) {
                // v1 two-port order: S11 S21 S12 S22 (column-major).
                m(k % 2, k / 2) = v;
            } else {
                m(k / ports, k % ports) = v;
            }
        }
        net.freqs.push_back(f);
        net.s.push_back(std::move(m));
    }
    return net;
}

std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

std::string write_touchstone(const NetworkData& net, DataFormat fmt) {
    net.validate();
    std::ostringstream os;
    os << "! " << net.ports << "-port S-parameters\n";
    os << "# Hz S " << to_string(fmt) << " R " << format_double(net.z_ref) << "\n";

    auto write_pair = [&](const cplx& v) {
        double a = 0.0, b = 0.0;
        switch (fmt) {
            case DataFormat::RI:
                a = v.real();
                b = v.imag();
                break;
            case DataFormat::MA:
                a = std::abs(v);
                b = std::arg(v) * kRadToDeg;
                break;
            case DataFormat::DB:
                a = 20.0 * std::log10(std::max(std::abs(v), kDbFloorMagnitude));
                b = std::arg(v) * kRadToDeg;
                break;
        }
        os << ' ' << format_double(a) << ' ' << format_double(b);
    };

    for (std::size_t i = 0; i < net.size(); ++i) {
        const auto& m = net.s[i];
        os << format_double(net.freqs[i]);
        if (net.ports == 2) {
            write_pair(m(0, 0));
            write_pair(m(1, 0));
            write_pair(m(0, 1));
            write_pair(m(1, 1));
            os << '\n';
        } else {
            for (int r = 0; r < net.ports; ++r) {
                if (r > 0) os << ' ';
                for (int c = 0; c < net.ports; ++c) write_pair(m(r, c));
                os << '\n';
            }
        }
    }
    return os.str();
}

std::optional<int> ports_from_filename(std::string_view path) {
    const std::string lower = [&] {
        std::string s(path);
        std::transform(s.begin(), s.end(), s.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        return s;
    }();
    const auto dot = lower.rfind(".s");
    if (dot == std::string::npos || lower.size() < dot + 4 || lower.back() != 'p') return std::nullopt;
    const std::string digits = lower.substr(dot + 2, lower.size() - dot - 3);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); }))
        return std::nullopt;
    return std::stoi(digits);
}

std::vector<std::vector<double>> read_numeric_csv(std::string_view text, std::size_t columns) {
    std::vector<std::vector<double>> cols(columns);
    bool first_content = true;
    const auto lines = split_lines(text);
    for (std::size_t idx = 0; idx < lines.size(); ++idx) {
        const std::size_t line_no = idx + 1;
        const std::string_view line = trim(lines[idx]);
        if (line.empty() || line.front() == '#' || line.front() == '!') continue;

        std::vector<std::string_view> fields;
        if (line.find(',') != std::string_view::npos || line.find(';') != std::string_view::npos) {
            std::size_t start = 0;
            while (true) {
                const std::size_t end = line.find_first_of(",;", start);
                fields.push_back(trim(line.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start)));
                if (end == std::string_view::npos) break;
                start = end + 1;
            }
        } else {
            fields = split_ws(line);
        }

        std::vector<std::optional<double>> parsed;
        for (auto f : fields) parsed.push_back(to_number(f));
        const bool all_text = std::none_of(parsed.begin(), parsed.end(), [](const auto& v) { return v.has_value(); });
        if (first_content && all_text) {
            first_content = false;
            continue;  // header
        }
        first_content = false;

        if (fields.size() != columns)
            throw ParseError("expected " + std::to_string(columns) + " columns, found " + std::to_string(fields.size()),
                             line_no);
        for (std::size_t c = 0; c < columns; ++c) {
            if (!parsed[c] || !std::isfinite(*parsed[c]))
                throw ParseError("non-numeric field '" + std::string(fields[c]) + "' in row", line_no);
            cols[c].push_back(*parsed[c]);
        }
    }
    if (cols.front().empty()) throw ParseError("no data rows", 0);
    return cols;
}

TdrTrace parse_tdr_csv(std::string_view text, double v_plus) {
    if (!(v_plus > 0.0)) throw InputError("incident step amplitude must be positive");
    auto cols = read_numeric_csv(text, 2);
    for (std::size_t i = 1; i < cols[0].size(); ++i)
        if (!(cols[0][i] > cols[0][i - 1]))
            throw ParseError("time column must be strictly increasing (data row " + std::to_string(i + 1) + ")", 0);
    TdrTrace trace;
    trace.times = std::move(cols[0]);
    trace.v_meas = std::move(cols[1]);
    trace.v_plus = v_plus;
    return trace;
}

}  // namespace socketlab
