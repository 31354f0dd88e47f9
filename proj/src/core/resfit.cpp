#include "resfit.hpp"

#include "error.hpp"
#include "network.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace socketlab {

namespace {

constexpr cplx kI{0.0, 1.0};

double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * std::numbers::pi);
    return a <= -std::numbers::pi ? a + 2.0 * std::numbers::pi : a;
}

struct Problem {
    const std::vector<double>& f;
    const std::vector<cplx>& s;
    std::vector<double> w;  // |S21|^2

    Problem(const std::vector<double>& freqs, const std::vector<cplx>& data) : f(freqs), s(data), w(data.size()) {
        for (std::size_t k = 0; k < s.size(); ++k) w[k] = std::norm(s[k]);
    }

    // p = (ln f0, ln Qi, ln Qc*, phi). Weighted residual |S|^2 M - conj(S),
    // which equals |S|^2 (M - 1/S) without dividing by a vanishing S.
    Eigen::VectorXd residual(const Eigen::Vector4d& p) const {
        const double f0 = std::exp(p[0]), qi = std::exp(p[1]), qc = std::exp(p[2]);
        const cplx ge = (qi / qc) * std::exp(kI * p[3]);
        Eigen::VectorXd r(2 * s.size());
        for (std::size_t k = 0; k < s.size(); ++k) {
            const double dx = (f[k] - f0) / f0;
            const cplx m = 1.0 + ge / (1.0 + 2.0 * kI * qi * dx);
            const cplx v = w[k] * m - std::conj(s[k]);
            r[2 * k] = v.real();
            r[2 * k + 1] = v.imag();
        }
        return r;
    }

    Eigen::MatrixXd jacobian(const Eigen::Vector4d& p) const {
        const double f0 = std::exp(p[0]), qi = std::exp(p[1]), qc = std::exp(p[2]);
        const cplx ge = (qi / qc) * std::exp(kI * p[3]);
        Eigen::MatrixXd j(2 * s.size(), 4);
        for (std::size_t k = 0; k < s.size(); ++k) {
            const double dx = (f[k] - f0) / f0;
            const cplx l = 1.0 / (1.0 + 2.0 * kI * qi * dx);
            const cplx gl = ge * l;
            const std::array<cplx, 4> d{
                ge * l * l * 2.0 * kI * qi * (f[k] / f0),  // d/d ln f0
                gl * l,                                   // d/d ln Qi
                -gl,                                      // d/d ln Qc*
                kI * gl,                                  // d/d phi
            };
            for (int c = 0; c < 4; ++c) {
                j(2 * k, c) = w[k] * d[c].real();
                j(2 * k + 1, c) = w[k] * d[c].imag();
            }
        }
        return j;
    }
};

Eigen::Vector4d to_params(const ResonatorModel& m) {
    return {std::log(m.f0), std::log(m.q_i), std::log(m.q_c_star), m.phi};
}

ResonatorModel from_params(const Eigen::Vector4d& p) {
    return {std::exp(p[0]), std::exp(p[1]), std::exp(p[2]), wrap_angle(p[3])};
}

void check_sweep(const std::vector<double>& freqs, const std::vector<cplx>& s21) {
    if (freqs.size() != s21.size()) throw InputError("frequency and S21 arrays differ in length");
    if (freqs.size() < 8) throw InputError("sweep needs at least 8 points");
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        if (!(freqs[i] > 0.0)) throw InputError("frequencies must be positive");
        if (i > 0 && !(freqs[i] > freqs[i - 1])) throw InputError("frequencies must be strictly increasing");
        if (!std::isfinite(s21[i].real()) || !std::isfinite(s21[i].imag())) throw InputError("non-finite S21 value");
    }
}

}  // namespace

void ResonatorModel::validate() const {
    if (!(f0 > 0.0) || !(q_i > 0.0) || !(q_c_star > 0.0))
        throw InputError("resonator f0, Qi and Qc* must be positive");
    if (!std::isfinite(phi)) throw InputError("resonator phase offset must be finite");
}

std::vector<cplx> synthesize_s21(const ResonatorModel& model, const std::vector<double>& freqs) {
    model.validate();
    const cplx ge = (model.q_i / model.q_c_star) * std::exp(kI * model.phi);
    std::vector<cplx> out;
    out.reserve(freqs.size());
    for (double f : freqs) {
        if (!(f > 0.0)) throw InputError("frequencies must be positive");
        const double dx = (f - model.f0) / model.f0;
        out.push_back(1.0 / (1.0 + ge / (1.0 + 2.0 * kI * model.q_i * dx)));
    }
    return out;
}

NormalizedSweep normalize_sweep(const std::vector<double>& freqs, const std::vector<cplx>& s21, double wing_fraction) {
    check_sweep(freqs, s21);
    if (!(wing_fraction > 0.0 && wing_fraction < 0.5)) throw InputError("wing fraction must lie in (0, 0.5)");
    const std::size_t n = freqs.size();
    const auto wing = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(wing_fraction * static_cast<double>(n))));
    if (2 * wing >= n) throw InputError("wings cover the whole sweep");

    std::vector<double> logmag(n), ang(n);
    for (std::size_t i = 0; i < n; ++i) {
        logmag[i] = std::log(std::max(std::abs(s21[i]), 1e-300));
        ang[i] = std::arg(s21[i]);
    }
    const auto phase = unwrap_phase(ang);

    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < wing; ++i) idx.push_back(i);
    for (std::size_t i = n - wing; i < n; ++i) idx.push_back(i);

    // Centered abscissa keeps the two-parameter fits well conditioned.
    const double fc = 0.5 * (freqs.front() + freqs.back());
    auto fit = [&](const std::vector<double>& y) {
        double mx = 0.0, my = 0.0;
        for (auto i : idx) {
            mx += freqs[i] - fc;
            my += y[i];
        }
        mx /= static_cast<double>(idx.size());
        my /= static_cast<double>(idx.size());
        double sxx = 0.0, sxy = 0.0;
        for (auto i : idx) {
            sxx += (freqs[i] - fc - mx) * (freqs[i] - fc - mx);
            sxy += (freqs[i] - fc - mx) * (y[i] - my);
        }
        const double b = sxx > 0.0 ? sxy / sxx : 0.0;
        return std::pair{my - b * mx, b};  // value at fc, slope
    };
    const auto [lm_c, lm_b] = fit(logmag);
    const auto [ph_c, ph_b] = fit(phase);

    NormalizedSweep out;
    out.baseline = {lm_c - lm_b * fc, lm_b, ph_c - ph_b * fc, ph_b};
    out.s21.resize(n);
    double wing_ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = freqs[i] - fc;
        out.s21[i] = s21[i] * std::exp(-cplx(lm_c + lm_b * x, ph_c + ph_b * x));
    }
    for (auto i : idx) {
        const double x = freqs[i] - fc;
        const double dm = logmag[i] - (lm_c + lm_b * x);
        const double dp = phase[i] - (ph_c + ph_b * x);
        wing_ss += dm * dm + dp * dp;
    }
    const double wing_rms = std::sqrt(wing_ss / static_cast<double>(idx.size()));
    double interior_dev = 0.0;
    for (std::size_t i = wing; i < n - wing; ++i) interior_dev = std::max(interior_dev, std::abs(out.s21[i] - 1.0));

    if (wing_rms > 0.02) {
        std::ostringstream os;
        os << "resonance may overlap the wings (wing residual rms " << wing_rms << ")";
        out.warnings.push_back(os.str());
    }
    if (interior_dev <= std::max(1e-9, 5.0 * wing_rms)) out.warnings.push_back("no resonance found in sweep");
    return out;
}

ResonatorModel initial_guess(const std::vector<double>& freqs, const std::vector<cplx>& s21) {
    check_sweep(freqs, s21);
    const std::size_t n = freqs.size();
    std::size_t kmin = 0;
    for (std::size_t k = 1; k < n; ++k)
        if (std::abs(s21[k]) < std::abs(s21[kmin])) kmin = k;
    const double m = std::abs(s21[kmin]);
    if (!(m < 1.0 - 1e-6)) throw ComputationError("no dip found in the normalized sweep");

    const double level = 0.5 * (1.0 + m * m);
    auto interp = [&](std::size_t a, std::size_t b) {
        const double pa = std::norm(s21[a]), pb = std::norm(s21[b]);
        return pb == pa ? freqs[a] : freqs[a] + (level - pa) * (freqs[b] - freqs[a]) / (pb - pa);
    };
    std::optional<double> left, right;
    for (std::size_t k = kmin; k > 0; --k)
        if (std::norm(s21[k - 1]) >= level) {
            left = interp(k, k - 1);
            break;
        }
    for (std::size_t k = kmin; k + 1 < n; ++k)
        if (std::norm(s21[k + 1]) >= level) {
            right = interp(k, k + 1);
            break;
        }
    const double f0 = freqs[kmin];
    double bw = 0.0;
    if (left && right) bw = *right - *left;
    else if (left) bw = 2.0 * (f0 - *left);
    else if (right) bw = 2.0 * (*right - f0);
    if (!(bw > 0.0)) throw ComputationError("no dip found: half-depth width not resolved");

    ResonatorModel g;
    g.f0 = f0;
    const double ql = f0 / bw;
    g.q_c_star = ql / (1.0 - m);
    g.q_i = ql / std::max(m, 1e-6);
    g.phi = 0.0;
    return g;
}

FitResult fit_resonator(const std::vector<double>& freqs, const std::vector<cplx>& s21_norm,
                        const std::optional<ResonatorModel>& initial, const FitOptions& opts) {
    check_sweep(freqs, s21_norm);
    const ResonatorModel start = initial ? *initial : initial_guess(freqs, s21_norm);
    start.validate();

    const Problem prob(freqs, s21_norm);
    Eigen::Vector4d p = to_params(start);
    Eigen::VectorXd r = prob.residual(p);
    double cost = r.squaredNorm();
    const double n_points = static_cast<double>(freqs.size());

    FitResult res;
    res.initial_residual_rms = std::sqrt(cost / n_points);

    double lambda = 1e-3;
    bool converged = false;
    int iter = 0;
    while (iter < opts.max_iter) {
        ++iter;
        const Eigen::MatrixXd j = prob.jacobian(p);
        const Eigen::Matrix4d a = j.transpose() * j;
        const Eigen::Vector4d g = j.transpose() * r;
        // Unit-diagonal scaling tames the ln f0 column, which is ~Qi times larger.
        Eigen::Vector4d scale = a.diagonal().cwiseSqrt();
        for (int c = 0; c < 4; ++c)
            if (!(scale[c] > 0.0)) scale[c] = 1.0;
        const Eigen::Matrix4d as = scale.cwiseInverse().asDiagonal() * a * scale.cwiseInverse().asDiagonal();
        const Eigen::Vector4d gs = g.cwiseQuotient(scale);

        bool accepted = false;
        Eigen::Vector4d step = Eigen::Vector4d::Zero();
        while (lambda < 1e16) {
            Eigen::Matrix4d damped = as;
            damped.diagonal().array() += lambda * as.diagonal().array();
            step = damped.ldlt().solve(-gs).cwiseQuotient(scale);
            const Eigen::Vector4d p_new = p + step;
            const Eigen::VectorXd r_new = prob.residual(p_new);
            const double cost_new = r_new.squaredNorm();
            if (std::isfinite(cost_new) && cost_new < cost) {
                p = p_new;
                r = r_new;
                cost = cost_new;
                lambda = std::max(lambda / 10.0, 1e-15);
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted) {
            // No descent direction left at working precision.
            converged = true;
            break;
        }
        if (step.norm() <= opts.step_tolerance * (p.norm() + opts.step_tolerance)) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        std::ostringstream os;
        os << "resonator fit did not converge after " << iter << " iterations (residual rms "
           << std::sqrt(cost / n_points) << ")";
        throw ComputationError(os.str());
    }

    res.model = from_params(p);
    res.n_iter = iter;
    res.residual_rms = std::sqrt(cost / n_points);

    const Eigen::MatrixXd j = prob.jacobian(p);
    const Eigen::Matrix4d a = j.transpose() * j;
    Eigen::Vector4d scale = a.diagonal().cwiseSqrt();
    for (int c = 0; c < 4; ++c)
        if (!(scale[c] > 0.0)) scale[c] = 1.0;
    const Eigen::Matrix4d as = scale.cwiseInverse().asDiagonal() * a * scale.cwiseInverse().asDiagonal();
    const double dof = std::max(1.0, 2.0 * n_points - 4.0);
    const Eigen::Matrix4d cov = (cost / dof) * (scale.cwiseInverse().asDiagonal() * as.inverse() *
                                                scale.cwiseInverse().asDiagonal());
    auto sd = [&](int c) { return std::sqrt(std::max(cov(c, c), 0.0)); };
    res.std_errors = {res.model.f0 * sd(0), res.model.q_i * sd(1), res.model.q_c_star * sd(2), sd(3)};
    return res;
}

BaselineFitResult fit_with_baseline(const std::vector<double>& freqs, const std::vector<cplx>& s21,
                                    double wing_fraction, const FitOptions& opts) {
    BaselineFitResult out;
    out.sweep = normalize_sweep(freqs, s21, wing_fraction);
    out.fit = fit_resonator(freqs, out.sweep.s21, std::nullopt, opts);
    Baseline base = out.sweep.baseline;

    const std::size_t n = freqs.size();
    const double fc = 0.5 * (freqs.front() + freqs.back());
    std::vector<double> lm(n), ang(n), w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = std::norm(s21[i]);

    constexpr int kMaxRounds = 50;
    for (out.rounds = 1; out.rounds <= kMaxRounds; ++out.rounds) {
        const auto model = synthesize_s21(out.fit.model, freqs);
        for (std::size_t i = 0; i < n; ++i) {
            const cplx ratio = s21[i] / model[i];
            lm[i] = std::log(std::abs(ratio));
            ang[i] = std::arg(ratio);
        }
        const auto ph = unwrap_phase(ang);

        double sw = 0.0, sx = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sw += w[i];
            sx += w[i] * (freqs[i] - fc);
        }
        const double mx = sx / sw;
        auto line = [&](const std::vector<double>& y) {
            double my = 0.0;
            for (std::size_t i = 0; i < n; ++i) my += w[i] * y[i];
            my /= sw;
            double sxx = 0.0, sxy = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double dx = freqs[i] - fc - mx;
                sxx += w[i] * dx * dx;
                sxy += w[i] * dx * (y[i] - my);
            }
            const double b = sxx > 0.0 ? sxy / sxx : 0.0;
            return std::pair{my - b * mx, b};
        };
        const auto [lm_c, lm_b] = line(lm);
        const auto [ph_c, ph_b] = line(ph);
        const Baseline next{lm_c - lm_b * fc, lm_b, ph_c - ph_b * fc, ph_b};

        double change = 0.0;
        for (double f : {freqs.front(), freqs.back()}) {
            const double dm = (next.log_mag0 + next.log_mag_slope * f) - (base.log_mag0 + base.log_mag_slope * f);
            const double dp = (next.phase0 + next.phase_slope * f) - (base.phase0 + base.phase_slope * f);
            change = std::max(change, std::hypot(dm, dp));
        }
        base = next;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = freqs[i] - fc;
            out.sweep.s21[i] = s21[i] * std::exp(-cplx(lm_c + lm_b * x, ph_c + ph_b * x));
        }
        const double initial_rms = out.fit.initial_residual_rms;
        out.fit = fit_resonator(freqs, out.sweep.s21, out.fit.model, opts);
        out.fit.initial_residual_rms = initial_rms;
        if (change < 1e-10) break;
    }
    out.rounds = std::min(out.rounds, kMaxRounds);
    out.sweep.baseline = base;
    out.fit.normalization = base;
    return out;
}

}  // namespace socketlab
