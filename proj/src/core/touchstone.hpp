#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace socketlab {

using cplx = std::complex<double>;

/// Frequency sweep of P x P scattering matrices referenced to a real impedance.
struct NetworkData {
    int ports = 2;
    std::vector<double> freqs;           // Hz, strictly increasing, > 0
    std::vector<Eigen::MatrixXcd> s;     // one ports x ports matrix per frequency
    double z_ref = 50.0;                 // ohms

    std::size_t size() const noexcept { return freqs.size(); }

    /// S_{out,in} trace for a (1-based) port pair, e.g. (2, 1) for S21.
    std::vector<cplx> trace(int out_port, int in_port) const;

    /// Throws InputError when an invariant does not hold.
    void validate() const;
};

/// Time-sampled reflected-voltage record of a step-pulse reflectometer.
struct TdrTrace {
    std::vector<double> times;    // s, strictly increasing
    std::vector<double> v_meas;   // V
    double v_plus = 0.25;         // incident step amplitude, V
    double rise_time = 20e-12;    // s, metadata only

    std::size_t size() const noexcept { return times.size(); }
    void validate() const;
};

enum class DataFormat { RI, MA, DB };

DataFormat parse_data_format(std::string_view name);
std::string_view to_string(DataFormat fmt);

/// Parses Touchstone v1 text. The port count is inferred from the record
/// layout unless `ports_hint` (typically from a .s2p/.s4p extension) is given.
/// Only 2- and 4-port S-parameter files are accepted.
NetworkData parse_touchstone(std::string_view text, std::optional<int> ports_hint = std::nullopt);

/// Writes Touchstone v1 with frequencies in Hz and shortest round-trip decimals.
std::string write_touchstone(const NetworkData& net, DataFormat fmt = DataFormat::RI);

/// Port count implied by a file name such as "dut.s4p"; nullopt when absent.
std::optional<int> ports_from_filename(std::string_view path);

/// Two-column CSV (time_s, volts) with at most one header line.
TdrTrace parse_tdr_csv(std::string_view text, double v_plus = 0.25);

/// Generic numeric CSV reader: each data row must have exactly `columns`
/// fields. A single leading non-numeric header row is skipped; lines starting
/// with '#' or '!' are comments. Returns one vector per column.
std::vector<std::vector<double>> read_numeric_csv(std::string_view text, std::size_t columns);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

}  // namespace socketlab
