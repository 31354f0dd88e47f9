#include "pulse.hpp"

#include "error.hpp"
#include "fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace socketlab {

void PulseSpec::validate() const {
    for (double v : {carrier, sideband, fwhm, sample_rate, duration})
        if (!std::isfinite(v)) throw InputError("pulse parameters must be finite");
    if (!(carrier >= 0.0) || !(sideband >= 0.0)) throw InputError("carrier and sideband must be non-negative");
    if (!(fwhm > 0.0)) throw InputError("pulse fwhm must be positive");
    if (!(duration > 0.0)) throw InputError("pulse duration must be positive");
    const double needed = 2.0 * (carrier + sideband + 3.0 / fwhm);
    if (!(sample_rate > needed)) {
        std::ostringstream os;
        os << "undersampled pulse: sample rate " << sample_rate << " Hz must exceed " << needed << " Hz";
        throw InputError(os.str());
    }
    if (duration * sample_rate < 8.0) throw InputError("pulse duration holds fewer than 8 samples");
}

void PulseSeries::validate() const {
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) throw InputError("sample rate must be positive");
    if (volts.size() < 2) throw InputError("pulse needs at least 2 samples");
    for (double v : volts)
        if (!std::isfinite(v)) throw InputError("pulse samples must be finite");
}

PulseSeries synthesize_pulse(const PulseSpec& spec) {
    spec.validate();
    PulseSeries p;
    p.sample_rate = spec.sample_rate;
    const auto n = static_cast<std::size_t>(std::llround(spec.duration * spec.sample_rate));
    p.volts.resize(n);
    const double t0 = spec.duration / 2.0;
    const double a = 4.0 * std::numbers::ln2 / (spec.fwhm * spec.fwhm);
    const double w = 2.0 * std::numbers::pi * (spec.carrier + spec.sideband);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = p.time(i);
        p.volts[i] = std::exp(-a * (t - t0) * (t - t0)) * std::cos(w * t);
    }
    return p;
}

namespace {

cplx interpolate_edge_hold(const std::vector<double>& f, const std::vector<cplx>& s, double x) {
    if (x <= f.front()) return s.front();
    if (x >= f.back()) return s.back();
    const auto it = std::upper_bound(f.begin(), f.end(), x);
    const auto j = static_cast<std::size_t>(it - f.begin());
    const double u = (x - f[j - 1]) / (f[j] - f[j - 1]);
    return s[j - 1] + u * (s[j] - s[j - 1]);
}

}  // namespace

PulseSeries transmit(const PulseSeries& pulse, const NetworkData& net, int out_port, int in_port) {
    pulse.validate();
    net.validate();
    const auto s = net.trace(out_port, in_port);
    const std::size_t n = pulse.size();
    auto spec = fft::forward_real(pulse.volts);

    double total = 0.0, outside = 0.0;
    for (std::size_t k = 0; k < spec.size(); ++k) {
        const double f = static_cast<double>(k) * pulse.sample_rate / static_cast<double>(n);
        const bool single = k == 0 || (n % 2 == 0 && k == n / 2);
        const double e = std::norm(spec[k]) * (single ? 1.0 : 2.0);
        total += e;
        if (f < net.freqs.front() || f > net.freqs.back()) outside += e;
    }
    if (!(total > 0.0)) throw InputError("pulse has zero energy");
    if (outside > 0.1 * total) {
        std::ostringstream os;
        os << "network data covers only " << 100.0 * (1.0 - outside / total)
           << "% of the pulse energy (band " << net.freqs.front() << " to " << net.freqs.back() << " Hz)";
        throw InputError(os.str());
    }

    for (std::size_t k = 0; k < spec.size(); ++k) {
        const double f = static_cast<double>(k) * pulse.sample_rate / static_cast<double>(n);
        spec[k] *= interpolate_edge_hold(net.freqs, s, f);
    }
    PulseSeries out;
    out.sample_rate = pulse.sample_rate;
    out.volts = fft::inverse_real(spec, n);
    return out;
}

std::vector<double> envelope(const PulseSeries& pulse) {
    pulse.validate();
    const std::size_t n = pulse.size();
    std::vector<fft::cplx> x(pulse.volts.begin(), pulse.volts.end());
    auto spec = fft::forward(x);
    for (std::size_t k = 1; k < n; ++k) {
        if (2 * k < n) spec[k] *= 2.0;
        else if (2 * k > n) spec[k] = 0.0;
    }
    const auto analytic = fft::inverse(spec);
    std::vector<double> env(n);
    for (std::size_t i = 0; i < n; ++i) env[i] = std::abs(analytic[i]);
    return env;
}

double envelope_fwhm(const std::vector<double>& env, double sample_rate) {
    if (env.size() < 3) throw InputError("envelope needs at least 3 samples");
    const auto peak_it = std::max_element(env.begin(), env.end());
    const double half = *peak_it / 2.0;
    if (!(half > 0.0)) throw InputError("envelope has zero energy");
    const auto p = static_cast<std::size_t>(peak_it - env.begin());

    std::size_t i = p;
    while (i > 0 && env[i - 1] >= half) --i;
    if (i == 0) throw ComputationError("envelope does not fall to half maximum before the record start");
    const double left = static_cast<double>(i - 1) + (half - env[i - 1]) / (env[i] - env[i - 1]);

    std::size_t j = p;
    while (j + 1 < env.size() && env[j + 1] >= half) ++j;
    if (j + 1 == env.size()) throw ComputationError("envelope does not fall to half maximum before the record end");
    const double right = static_cast<double>(j) + (env[j] - half) / (env[j] - env[j + 1]);

    return (right - left) / sample_rate;
}

DistortionMetrics distortion_metrics(const PulseSeries& in, const PulseSeries& out) {
    in.validate();
    out.validate();
    if (std::abs(in.sample_rate - out.sample_rate) > 1e-9 * in.sample_rate)
        throw InputError("pulses must share a sample rate");
    const auto e1 = envelope(in);
    const auto e2 = envelope(out);
    const double n1 = std::sqrt(std::inner_product(e1.begin(), e1.end(), e1.begin(), 0.0));
    const double n2 = std::sqrt(std::inner_product(e2.begin(), e2.end(), e2.begin(), 0.0));
    if (!(n1 > 0.0)) throw InputError("input pulse has zero energy");
    if (!(n2 > 0.0)) throw InputError("output pulse has zero energy");

    // Linear cross-correlation c[s] = sum_i e1[i] e2[i + s] by zero-padded FFT.
    const std::size_t len = e1.size() + e2.size();
    std::vector<fft::cplx> a(len), b(len);
    for (std::size_t i = 0; i < e1.size(); ++i) a[i] = e1[i];
    for (std::size_t i = 0; i < e2.size(); ++i) b[i] = e2[i];
    auto fa = fft::forward(a);
    auto fb = fft::forward(b);
    for (std::size_t k = 0; k < len; ++k) fa[k] = std::conj(fa[k]) * fb[k];
    const auto c = fft::inverse(fa);

    // Lags -(|e1| - 1) .. |e2| - 1; negative lags wrap to the end.
    const auto lag_of = [&](std::size_t idx) {
        return idx < e2.size() ? static_cast<long long>(idx) : static_cast<long long>(idx) - static_cast<long long>(len);
    };
    std::size_t best = 0;
    for (std::size_t k = 1; k < len; ++k)
        if (c[k].real() > c[best].real()) best = k;
    double frac = 0.0;
    {
        const double cm = c[(best + len - 1) % len].real();
        const double c0 = c[best].real();
        const double cp = c[(best + 1) % len].real();
        const double denom = cm - 2.0 * c0 + cp;
        if (denom < 0.0) frac = std::clamp(0.5 * (cm - cp) / denom, -0.5, 0.5);
    }

    DistortionMetrics m;
    m.envelope_correlation = std::min(1.0, c[best].real() / (n1 * n2));
    m.delay = (static_cast<double>(lag_of(best)) + frac) / in.sample_rate;
    m.fwhm_in = envelope_fwhm(e1, in.sample_rate);
    m.fwhm_out = envelope_fwhm(e2, out.sample_rate);
    m.fwhm_change_fraction = (m.fwhm_out - m.fwhm_in) / m.fwhm_in;
    return m;
}

}  // namespace socketlab
