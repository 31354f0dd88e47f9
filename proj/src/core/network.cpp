#include "network.hpp"

#include "error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace socketlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string hz_label(double f) {
    std::ostringstream os;
    os << f << " Hz";
    return os.str();
}

// Fornberg's recursion for first-derivative weights at z over `nodes`.
std::vector<double> fd_weights(double z, const std::vector<double>& nodes) {
    const std::size_t n = nodes.size();
    std::vector<std::array<double, 2>> c(n, {0.0, 0.0});
    double c1 = 1.0;
    double c4 = nodes[0] - z;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const int mn = std::min<int>(static_cast<int>(i), 1);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[i] - z;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = c[i][1];
    return w;
}

void require_uniform(const std::vector<double>& f) {
    if (f.size() < 7) throw InputError("group delay needs at least 7 frequency points");
    const double h = (f.back() - f.front()) / static_cast<double>(f.size() - 1);
    for (std::size_t i = 1; i < f.size(); ++i)
        if (std::abs((f[i] - f[i - 1]) - h) > 1e-6 * h)
            throw InputError("non-uniform frequency grid; resample onto a uniform grid first");
}

// Least-squares line y = a + b x over the selected indices.
std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y,
                                   const std::vector<std::size_t>& idx) {
    double mx = 0.0, my = 0.0;
    for (auto i : idx) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(idx.size());
    my /= static_cast<double>(idx.size());
    double sxx = 0.0, sxy = 0.0;
    for (auto i : idx) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double b = sxx > 0.0 ? sxy / sxx : 0.0;
    return {my - b * mx, b};
}

}  // namespace

std::string_view to_string(DipClass c) {
    return c == DipClass::Resonance ? "resonance" : "non-resonant-anomaly";
}

Eigen::MatrixXcd z_from_s(const Eigen::MatrixXcd& s, double z_ref) {
    const auto n = s.rows();
    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(n, n);
    const Eigen::MatrixXcd a = eye - s;
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(a);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) throw ComputationError("Z undefined: (I - S) is singular");
    return z_ref * (eye + s) * lu.inverse();
}

std::vector<Eigen::MatrixXcd> z_from_s(const NetworkData& net) {
    net.validate();
    std::vector<Eigen::MatrixXcd> out;
    out.reserve(net.size());
    for (std::size_t i = 0; i < net.size(); ++i) {
        try {
            out.push_back(z_from_s(net.s[i], net.z_ref));
        } catch (const ComputationError&) {
            throw ComputationError("Z undefined for ideal through at " + hz_label(net.freqs[i]) +
                                   ": (I - S) is singular");
        }
    }
    return out;
}

Eigen::MatrixXcd s_from_z(const Eigen::MatrixXcd& z, double z_ref) {
    const auto n = z.rows();
    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(n, n);
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(z + z_ref * eye);
    if (!lu.isInvertible()) throw ComputationError("S undefined: (Z + Zc I) is singular");
    return (z - z_ref * eye) * lu.inverse();
}

cplx input_impedance(const Eigen::Matrix2cd& z, cplx z_load, LoadSign sign) {
    const cplx denom = sign == LoadSign::Conventional ? z(1, 1) + z_load : z(1, 1) - z_load;
    const double scale = std::max(std::abs(z(1, 1)), std::abs(z_load));
    if (std::abs(denom) <= 1e-12 * scale || std::abs(denom) == 0.0)
        throw ComputationError("input impedance undefined: vanishing denominator Z22 " +
                               std::string(sign == LoadSign::Conventional ? "+" : "-") + " ZL");
    return z(0, 0) - z(0, 1) * z(1, 0) / denom;
}

double vswr(cplx s11) {
    const double g = std::abs(s11);
    if (!(g < 1.0)) throw InputError("VSWR undefined for |S11| >= 1");
    return (1.0 + g) / (1.0 - g);
}

std::vector<double> unwrap_phase(const std::vector<double>& angles) {
    std::vector<double> out(angles.size());
    if (angles.empty()) return out;
    out[0] = angles[0];
    double k = 0.0;  // accumulated correction in turns
    for (std::size_t i = 1; i < angles.size(); ++i) {
        const double d = angles[i] - angles[i - 1];
        k -= std::ceil((d - std::numbers::pi) / kTwoPi);
        out[i] = angles[i] + kTwoPi * k;
    }
    return out;
}

std::vector<double> transmission_phase(const NetworkData& net, int out_port, int in_port) {
    const auto s = net.trace(out_port, in_port);
    std::vector<double> ang(s.size());
    std::transform(s.begin(), s.end(), ang.begin(), [](const cplx& v) { return std::arg(v); });
    auto ph = unwrap_phase(ang);
    if (ph.size() >= 2) {
        const double slope = (ph[1] - ph[0]) / (net.freqs[1] - net.freqs[0]);
        const double at_dc = ph[0] - slope * net.freqs[0];
        const double turns = std::ceil((at_dc - std::numbers::pi) / kTwoPi);
        for (auto& p : ph) p -= kTwoPi * turns;
    }
    return ph;
}

std::vector<double> phase_delay(const NetworkData& net, int out_port, int in_port) {
    net.validate();
    const auto ph = transmission_phase(net, out_port, in_port);
    std::vector<double> tau(ph.size());
    for (std::size_t i = 0; i < ph.size(); ++i) tau[i] = -ph[i] / (kTwoPi * net.freqs[i]);
    return tau;
}

std::vector<double> derivative_6th_order(const std::vector<double>& y, double h) {
    const std::size_t n = y.size();
    if (n < 7) throw InputError("sixth-order derivative needs at least 7 samples");
    static constexpr std::array<double, 7> central{-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0};
    static const auto edge = [] {
        std::array<std::vector<double>, 3> w;
        const std::vector<double> nodes{0, 1, 2, 3, 4, 5, 6};
        for (int i = 0; i < 3; ++i) w[i] = fd_weights(static_cast<double>(i), nodes);
        return w;
    }();

    std::vector<double> d(n, 0.0);
    for (std::size_t i = 3; i + 3 < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < 7; ++j) acc += central[j] * y[i - 3 + j];
        d[i] = acc / (60.0 * h);
    }
    for (std::size_t i = 0; i < 3; ++i) {
        double lo = 0.0, hi = 0.0;
        for (std::size_t j = 0; j < 7; ++j) {
            lo += edge[i][j] * y[j];
            // Mirror image: reversed nodes flip the sign of the first derivative.
            hi -= edge[i][j] * y[n - 1 - j];
        }
        d[i] = lo / h;
        d[n - 1 - i] = hi / h;
    }
    return d;
}

std::size_t smoothing_window(std::size_t n) {
    auto w = static_cast<std::size_t>(std::lround(0.01 * static_cast<double>(n)));
    w = std::max<std::size_t>(w, 1);
    if (w % 2 == 0) ++w;
    return w;
}

std::vector<double> moving_average(const std::vector<double>& y, std::size_t window) {
    if (window % 2 == 0) ++window;
    const std::size_t half = window / 2;
    const std::size_t n = y.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = std::min({half, i, n - 1 - i});
        double acc = 0.0;
        for (std::size_t j = i - r; j <= i + r; ++j) acc += y[j];
        out[i] = acc / static_cast<double>(2 * r + 1);
    }
    return out;
}

std::vector<double> group_delay(const NetworkData& net, int out_port, int in_port, bool smooth) {
    net.validate();
    require_uniform(net.freqs);
    const double h = (net.freqs.back() - net.freqs.front()) / static_cast<double>(net.size() - 1);
    const auto ph = transmission_phase(net, out_port, in_port);
    auto d = derivative_6th_order(ph, h);
    for (auto& v : d) v = -v / kTwoPi;
    return smooth ? moving_average(d, smoothing_window(d.size())) : d;
}

NetworkData resample_uniform(const NetworkData& net, std::size_t points) {
    net.validate();
    if (points < 2) throw InputError("resampling needs at least 2 points");
    NetworkData out;
    out.ports = net.ports;
    out.z_ref = net.z_ref;
    const double f0 = net.freqs.front(), f1 = net.freqs.back();
    for (std::size_t i = 0; i < points; ++i) {
        const double f = i + 1 == points ? f1 : f0 + (f1 - f0) * static_cast<double>(i) / static_cast<double>(points - 1);
        auto it = std::upper_bound(net.freqs.begin(), net.freqs.end(), f);
        std::size_t hi = static_cast<std::size_t>(it - net.freqs.begin());
        hi = std::clamp<std::size_t>(hi, 1, net.size() - 1);
        const std::size_t lo = hi - 1;
        const double t = net.size() == 1 ? 0.0 : (f - net.freqs[lo]) / (net.freqs[hi] - net.freqs[lo]);
        out.freqs.push_back(f);
        out.s.push_back(net.s[lo] + t * (net.s[hi] - net.s[lo]));
    }
    return out;
}

MicrowaveParams microwave_params(const NetworkData& net, cplx z_load, LoadSign sign) {
    net.validate();
    if (net.ports != 2) throw InputError("microwave parameters are defined for 2-port data");
    MicrowaveParams p;
    p.freqs = net.freqs;
    const auto z = z_from_s(net);
    p.z_in.reserve(net.size());
    p.vswr_in.reserve(net.size());
    for (std::size_t i = 0; i < net.size(); ++i) {
        p.z_in.push_back(input_impedance(Eigen::Matrix2cd(z[i]), z_load, sign));
        p.vswr_in.push_back(vswr(net.s[i](0, 0)));
    }
    p.tau_phi = phase_delay(net, 2, 1);
    p.tau_g = group_delay(net, 2, 1, true);
    return p;
}

IsolationResult band_isolation(const NetworkData& net, double f_lo, double f_hi) {
    net.validate();
    if (net.ports != 4) throw InputError("band isolation needs 4-port data");
    if (!(f_lo < f_hi)) throw InputError("band edges must satisfy f_lo < f_hi");
    const double tol = 1e-12;
    if (f_lo < net.freqs.front() * (1.0 - tol) || f_hi > net.freqs.back() * (1.0 + tol))
        throw InputError("band [" + hz_label(f_lo) + ", " + hz_label(f_hi) + "] outside data range [" +
                         hz_label(net.freqs.front()) + ", " + hz_label(net.freqs.back()) + "]");

    static constexpr std::array<std::pair<int, int>, 4> entries{{{3, 1}, {4, 1}, {3, 2}, {4, 2}}};
    IsolationResult res;
    double worst = -1.0;
    bool any = false;
    for (std::size_t i = 0; i < net.size(); ++i) {
        if (net.freqs[i] < f_lo || net.freqs[i] > f_hi) continue;
        any = true;
        for (auto [o, in] : entries) {
            const double mag = std::abs(net.s[i](o - 1, in - 1));
            if (mag > worst) {
                worst = mag;
                res.worst_freq = net.freqs[i];
                res.worst_entry = "S" + std::to_string(o) + std::to_string(in);
            }
        }
    }
    if (!any) throw InputError("no frequency points inside the band");
    res.isolation_db = -20.0 * std::log10(worst);
    return res;
}

DipReport classify_dip(const NetworkData& net, int out_port, int in_port, double f_lo, double f_hi) {
    net.validate();
    const auto s = net.trace(out_port, in_port);
    std::vector<std::size_t> win;
    for (std::size_t i = 0; i < net.size(); ++i)
        if (net.freqs[i] >= f_lo && net.freqs[i] <= f_hi) win.push_back(i);
    if (win.size() < 7) throw InputError("dip window holds fewer than 7 frequency points");

    // Baseline from the outer 15% of the window on each side.
    const std::size_t wing = std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(0.15 * win.size())));
    std::vector<std::size_t> wings(win.begin(), win.begin() + wing);
    wings.insert(wings.end(), win.end() - wing, win.end());

    std::vector<double> logmag(net.size()), ang(net.size());
    for (std::size_t i = 0; i < net.size(); ++i) {
        logmag[i] = std::log(std::max(std::abs(s[i]), 1e-300));
        ang[i] = std::arg(s[i]);
    }
    const auto phase = unwrap_phase(ang);
    const auto [ma, mb] = fit_line(net.freqs, logmag, wings);
    const auto [pa, pb] = fit_line(net.freqs, phase, wings);

    std::vector<cplx> t(win.size());
    for (std::size_t k = 0; k < win.size(); ++k) {
        const double f = net.freqs[win[k]];
        t[k] = s[win[k]] * std::exp(-cplx(ma + mb * f, pa + pb * f));
    }

    std::size_t kmin = 0;
    for (std::size_t k = 1; k < t.size(); ++k)
        if (std::abs(t[k]) < std::abs(t[kmin])) kmin = k;
    const double tmin = std::abs(t[kmin]);
    if (kmin == 0 || kmin + 1 == t.size() || !(tmin < 1.0))
        throw InputError("no local |S" + std::to_string(out_port) + std::to_string(in_port) +
                         "| minimum inside the window");

    DipReport rep;
    rep.center_freq = net.freqs[win[kmin]];
    rep.depth = -20.0 * std::log10(tmin);

    // Width at half power depth: |T|^2 = (1 + |T_min|^2) / 2.
    const double level = 0.5 * (1.0 + tmin * tmin);
    auto crossing = [&](std::size_t a, std::size_t b) {
        const double pa2 = std::norm(t[a]), pb2 = std::norm(t[b]);
        const double fa = net.freqs[win[a]], fb = net.freqs[win[b]];
        return pb2 == pa2 ? fa : fa + (level - pa2) * (fb - fa) / (pb2 - pa2);
    };
    double f_left = net.freqs[win.front()];
    for (std::size_t k = kmin; k > 0; --k)
        if (std::norm(t[k - 1]) >= level) {
            f_left = crossing(k, k - 1);
            break;
        }
    double f_right = net.freqs[win.back()];
    for (std::size_t k = kmin; k + 1 < t.size(); ++k)
        if (std::norm(t[k + 1]) >= level) {
            f_right = crossing(k, k + 1);
            break;
        }
    rep.bandwidth_3db = f_right - f_left;

    // Phase swept by the dip residual T - 1 around the notch. A resonance
    // traces a circle (close to pi); a magnitude-only dip stays on the real axis.
    std::vector<double> dev(t.size());
    double dev_max = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        dev[k] = std::abs(t[k] - 1.0);
        dev_max = std::max(dev_max, dev[k]);
    }
    std::size_t lo = kmin, hi = kmin;
    while (lo > 0 && dev[lo - 1] >= 0.1 * dev_max) --lo;
    while (hi + 1 < t.size() && dev[hi + 1] >= 0.1 * dev_max) ++hi;
    std::vector<double> res_ang;
    for (std::size_t k = lo; k <= hi; ++k) res_ang.push_back(std::arg(t[k] - 1.0));
    const auto res_unwrapped = unwrap_phase(res_ang);
    const auto [mn, mx] = std::minmax_element(res_unwrapped.begin(), res_unwrapped.end());
    rep.phase_excursion = *mx - *mn;
    rep.classification = rep.phase_excursion > std::numbers::pi / 2.0 ? DipClass::Resonance
                                                                      : DipClass::NonResonantAnomaly;
    return rep;
}

}  // namespace socketlab
