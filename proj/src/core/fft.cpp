#include "fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace socketlab::fft {

namespace {

// FFTW planning is not thread-safe; execution is.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

struct Plan {
    fftw_plan p = nullptr;
    ~Plan() {
        if (p) {
            std::lock_guard lock(plan_mutex());
            fftw_destroy_plan(p);
        }
    }
};

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

std::vector<cplx> complex_transform(const std::vector<cplx>& x, int sign) {
    const int n = static_cast<int>(x.size());
    std::vector<cplx> in = x;
    std::vector<cplx> out(x.size());
    if (n == 0) return out;
    Plan plan;
    {
        std::lock_guard lock(plan_mutex());
        plan.p = fftw_plan_dft_1d(n, as_fftw(in.data()), as_fftw(out.data()), sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan.p);
    return out;
}

}  // namespace

std::vector<cplx> forward_real(const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    std::vector<double> in = x;
    std::vector<cplx> out(x.size() / 2 + 1);
    if (n == 0) return {};
    Plan plan;
    {
        std::lock_guard lock(plan_mutex());
        plan.p = fftw_plan_dft_r2c_1d(n, in.data(), as_fftw(out.data()), FFTW_ESTIMATE);
    }
    fftw_execute(plan.p);
    return out;
}

std::vector<double> inverse_real(const std::vector<cplx>& spectrum, std::size_t n) {
    std::vector<double> out(n);
    if (n == 0) return out;
    std::vector<cplx> in(n / 2 + 1);
    for (std::size_t k = 0; k < in.size() && k < spectrum.size(); ++k) in[k] = spectrum[k];
    Plan plan;
    {
        std::lock_guard lock(plan_mutex());
        plan.p = fftw_plan_dft_c2r_1d(static_cast<int>(n), as_fftw(in.data()), out.data(), FFTW_ESTIMATE);
    }
    fftw_execute(plan.p);
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& v : out) v *= scale;
    return out;
}

std::vector<cplx> forward(const std::vector<cplx>& x) { return complex_transform(x, FFTW_FORWARD); }

std::vector<cplx> inverse(const std::vector<cplx>& x) {
    auto out = complex_transform(x, FFTW_BACKWARD);
    const double scale = out.empty() ? 1.0 : 1.0 / static_cast<double>(out.size());
    for (auto& v : out) v *= scale;
    return out;
}

}  // namespace socketlab::fft
