#include "tdr.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace socketlab {

namespace {

constexpr double kSpeedOfLight = 299792458.0;
constexpr std::size_t kMaxBounceEvents = 20'000'000;
constexpr double kBounceFloor = 1e-6;  // relative to V+
constexpr int kLossySubsections = 32;

struct Section {
    double delay;
    double z;
};

// Lossy segments become a staircase so the lattice model sees the same
// rising impedance the first-order model produces.
std::vector<Section> to_sections(const ImpedanceProfile& p) {
    std::vector<Section> out;
    double r_acc = 0.0;
    for (const auto& seg : p.segments) {
        if (seg.r_series > 0.0) {
            for (int j = 0; j < kLossySubsections; ++j)
                out.push_back({seg.one_way_delay / kLossySubsections,
                               seg.z + r_acc + seg.r_series * (j + 0.5) / kLossySubsections});
        } else {
            out.push_back({seg.one_way_delay, seg.z + r_acc});
        }
        r_acc += seg.r_series;
    }
    return out;
}

std::vector<double> median_filter(const std::vector<double>& y, std::size_t window) {
    if (window % 2 == 0) ++window;
    const std::size_t half = window / 2, n = y.size();
    std::vector<double> out(n), buf;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = std::min({half, i, n - 1 - i});
        buf.assign(y.begin() + static_cast<std::ptrdiff_t>(i - r), y.begin() + static_cast<std::ptrdiff_t>(i + r + 1));
        std::nth_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(r), buf.end());
        out[i] = buf[r];
    }
    return out;
}

struct LineFit {
    double intercept = 0.0;  // value at x0
    double slope = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y, std::size_t a, std::size_t b, double x0) {
    const double n = static_cast<double>(b - a + 1);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = a; i <= b; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = a; i <= b; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
    return {my + slope * (x0 - mx), slope};
}

// Splits [a, b] at kinks until every piece is within tol of its chord.
void split_linear(const std::vector<double>& t, const std::vector<double>& z, std::size_t a, std::size_t b, double tol,
                  std::vector<std::size_t>& cuts) {
    if (b < a + 4) return;
    std::size_t worst = a;
    double worst_dev = 0.0;
    for (std::size_t i = a + 1; i < b; ++i) {
        const double chord = z[a] + (z[b] - z[a]) * (t[i] - t[a]) / (t[b] - t[a]);
        const double dev = std::abs(z[i] - chord);
        if (dev > worst_dev) {
            worst_dev = dev;
            worst = i;
        }
    }
    if (worst_dev <= tol || worst < a + 2 || worst + 2 > b) return;
    split_linear(t, z, a, worst, tol, cuts);
    cuts.push_back(worst);
    split_linear(t, z, worst, b, tol, cuts);
}

}  // namespace

void ImpedanceProfile::validate() const {
    if (!(z_source > 0.0)) throw InputError("source impedance must be positive");
    if (segments.empty()) throw InputError("impedance profile has no segments");
    for (const auto& s : segments) {
        if (!(s.one_way_delay > 0.0)) throw InputError("segment delays must be positive");
        if (!(s.z > 0.0) || !std::isfinite(s.z)) throw InputError("non-physical profile: segment impedance must be positive");
        if (!(s.r_series >= 0.0)) throw InputError("segment series resistance must be non-negative");
    }
}

double reflection_ratio(double v_meas, double v_plus) {
    if (!(v_plus > 0.0) || !std::isfinite(v_plus)) throw InputError("incident step V+ must be positive");
    return (v_meas - v_plus) / v_plus;
}

double instantaneous_impedance(double xi, double z_c) {
    if (xi >= 1.0 - 1e-9) return kOpenMarker;
    if (xi <= -1.0 + 1e-9) return 0.0;
    return z_c * (1.0 + xi) / (1.0 - xi);
}

std::vector<double> impedance_from_trace(const TdrTrace& trace, double z_c) {
    trace.validate();
    if (!(z_c > 0.0)) throw InputError("characteristic impedance must be positive");
    std::vector<double> z(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i)
        z[i] = instantaneous_impedance(reflection_ratio(trace.v_meas[i], trace.v_plus), z_c);
    return z;
}

TdrTrace synthesize_trace(const ImpedanceProfile& profile, double v_plus, double sample_dt, double total_time,
                          SynthesisOrder order) {
    profile.validate();
    if (!(v_plus > 0.0)) throw InputError("incident step amplitude must be positive");
    if (!(sample_dt > 0.0)) throw InputError("sample interval must be positive");
    const double total_delay = std::accumulate(profile.segments.begin(), profile.segments.end(), 0.0,
                                               [](double acc, const LineSegment& s) { return acc + s.one_way_delay; });
    if (total_time < 2.0 * total_delay * (1.0 - 1e-12))
        throw InputError("total_time must cover the round trip of the whole profile");

    const auto n = static_cast<std::size_t>(std::floor(total_time / sample_dt * (1.0 + 1e-12))) + 1;
    const double eps_t = 1e-9 * sample_dt;
    TdrTrace out;
    out.v_plus = v_plus;
    out.times.resize(n);
    out.v_meas.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.times[i] = static_cast<double>(i) * sample_dt;
    const double zs = profile.z_source;

    if (order == SynthesisOrder::FirstOrder) {
        const auto& segs = profile.segments;
        for (std::size_t i = 0; i < n; ++i) {
            const double pos = 0.5 * out.times[i] + 0.5 * eps_t;
            double start = 0.0, r_acc = 0.0, z_local = 0.0;
            for (std::size_t k = 0; k < segs.size(); ++k) {
                const bool last = k + 1 == segs.size();
                if (pos < start + segs[k].one_way_delay || last) {
                    const double u = std::clamp((pos - start) / segs[k].one_way_delay, 0.0, 1.0);
                    z_local = segs[k].z + r_acc + segs[k].r_series * u;
                    break;
                }
                start += segs[k].one_way_delay;
                r_acc += segs[k].r_series;
            }
            const double xi = (z_local - zs) / (z_local + zs);
            out.v_meas[i] = v_plus * (1.0 + xi);
        }
        return out;
    }

    // Lattice (bounce) diagram over step waves. Each wave arriving back at the
    // reference plane adds a step to the measured voltage.
    const auto sec = to_sections(profile);
    const int count = static_cast<int>(sec.size());
    struct Wave {
        double t;  // arrival time at the destination boundary
        int section;
        bool forward;
        double amp;
    };
    std::vector<std::pair<double, double>> steps;
    std::vector<Wave> stack;
    const double floor = kBounceFloor * v_plus;
    auto push = [&](Wave w) {
        if (std::abs(w.amp) >= floor && w.t <= total_time + eps_t) stack.push_back(w);
    };

    const double g0 = (sec[0].z - zs) / (sec[0].z + zs);
    const double v0 = v_plus * (1.0 + g0);
    push({sec[0].delay, 0, true, v0});
    std::size_t events = 0;
    while (!stack.empty()) {
        if (++events > kMaxBounceEvents) throw ComputationError("bounce diagram exceeded the event budget");
        const Wave w = stack.back();
        stack.pop_back();
        const int k = w.section;
        if (w.forward) {
            if (k + 1 == count) continue;  // matched continuation
            const double g = (sec[k + 1].z - sec[k].z) / (sec[k + 1].z + sec[k].z);
            push({w.t + sec[k].delay, k, false, w.amp * g});
            push({w.t + sec[k + 1].delay, k + 1, true, w.amp * (1.0 + g)});
        } else if (k == 0) {
            const double g = (zs - sec[0].z) / (zs + sec[0].z);
            steps.emplace_back(w.t, w.amp * (1.0 + g));
            push({w.t + sec[0].delay, 0, true, w.amp * g});
        } else {
            const double g = (sec[k - 1].z - sec[k].z) / (sec[k - 1].z + sec[k].z);
            push({w.t + sec[k].delay, k, true, w.amp * g});
            push({w.t + sec[k - 1].delay, k - 1, false, w.amp * (1.0 + g)});
        }
    }
    std::sort(steps.begin(), steps.end());
    std::size_t j = 0;
    double acc = v0;
    for (std::size_t i = 0; i < n; ++i) {
        while (j < steps.size() && steps[j].first <= out.times[i] + eps_t) acc += steps[j++].second;
        out.v_meas[i] = acc;
    }
    return out;
}

ImpedanceProfile profile_from_trace(const TdrTrace& trace, double z_c, const SegmentationOptions& opts) {
    trace.validate();
    if (trace.size() < 3) throw InputError("trace too short to segment");
    if (!(opts.min_step > 0.0)) throw InputError("min_step must be positive");
    auto z = impedance_from_trace(trace, z_c);
    for (auto& v : z)
        if (!std::isfinite(v)) v = 1e9;
    const auto zm = median_filter(z, opts.median_window);
    const auto& t = trace.times;
    const std::size_t n = zm.size();

    // A step is a transition completed within about one rise time: the
    // change across a rise-time window exceeds half the minimum step, for a
    // run no longer than a few windows. Longer runs are ramps.
    const double dt_mean = (t.back() - t.front()) / static_cast<double>(n - 1);
    const auto w = static_cast<std::size_t>(
        std::max<long long>(1, std::llround(trace.rise_time / dt_mean)));
    const std::size_t max_run = 3 * w + 4;
    struct Piece {
        std::size_t first, last;
        double t_begin, t_end;
    };
    std::vector<Piece> pieces;
    const double steep = 0.5 * opts.min_step;
    auto wdiff = [&](std::size_t k) { return std::abs(zm[k] - zm[k - w]); };
    std::size_t piece_start = 0;
    double piece_t0 = t.front();
    std::size_t i = w;
    while (i < n) {
        if (wdiff(i) <= steep) {
            ++i;
            continue;
        }
        std::size_t q = i;
        while (q + 1 < n && wdiff(q + 1) > steep) ++q;
        const std::size_t pre = i - w;
        const bool is_step = q - i + 1 <= max_run && q + 1 < n;
        if (is_step && pre >= piece_start && std::abs(zm[q] - zm[pre]) > opts.min_step) {
            const double tb = 0.5 * (t[i - 1] + t[q + 1 - w]);
            pieces.push_back({piece_start, pre, piece_t0, tb});
            piece_start = q;
            piece_t0 = tb;
        }
        i = q + 1;
    }
    pieces.push_back({piece_start, n - 1, piece_t0, t.back()});

    // Kinks inside each piece separate flat and ramped sections.
    std::vector<Piece> linear;
    for (const auto& p : pieces) {
        std::vector<std::size_t> cuts;
        split_linear(t, zm, p.first, p.last, steep, cuts);
        std::size_t a = p.first;
        double ta = p.t_begin;
        for (auto c : cuts) {
            linear.push_back({a, c, ta, t[c]});
            a = c;
            ta = t[c];
        }
        linear.push_back({a, p.last, ta, p.t_end});
    }

    ImpedanceProfile prof;
    prof.z_source = z_c;
    double r_acc = 0.0;
    for (const auto& p : linear) {
        const double duration = p.t_end - p.t_begin;
        if (!(duration > 0.0)) continue;
        const auto fit = fit_line(t, zm, p.first, p.last, p.t_begin);
        const double rise = fit.slope * duration;
        LineSegment seg;
        seg.one_way_delay = 0.5 * duration;
        if (rise >= opts.min_step) {
            seg.r_series = rise;
            seg.z = fit.intercept - r_acc;
        } else {
            double mean = 0.0;
            for (std::size_t k = p.first; k <= p.last; ++k) mean += zm[k];
            mean /= static_cast<double>(p.last - p.first + 1);
            seg.z = mean - r_acc;
        }
        const bool merge = !prof.segments.empty() && seg.r_series == 0.0 && prof.segments.back().r_series == 0.0 &&
                           std::abs(prof.segments.back().z - seg.z) < opts.min_step;
        if (merge) {
            auto& prev = prof.segments.back();
            const double w0 = prev.one_way_delay, w1 = seg.one_way_delay;
            prev.z = (prev.z * w0 + seg.z * w1) / (w0 + w1);
            prev.one_way_delay = w0 + w1;
        } else {
            prof.segments.push_back(seg);
        }
        r_acc += seg.r_series;
    }
    if (prof.segments.empty()) throw InputError("degenerate trace: no segment of positive duration");
    for (const auto& s : prof.segments)
        if (!(s.z > 0.0)) throw ComputationError("segmentation produced a non-positive impedance");
    return prof;
}

std::vector<double> segment_lengths(const ImpedanceProfile& profile, double velocity_factor) {
    if (!(velocity_factor > 0.0) || velocity_factor > 1.0) throw InputError("velocity factor must lie in (0, 1]");
    std::vector<double> out;
    out.reserve(profile.segments.size());
    for (const auto& s : profile.segments) out.push_back(s.one_way_delay * kSpeedOfLight * velocity_factor);
    return out;
}

}  // namespace socketlab
