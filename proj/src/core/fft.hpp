#pragma once

#include <complex>
#include <vector>

namespace socketlab::fft {

using cplx = std::complex<double>;

/// Real-to-half-complex forward transform: n/2 + 1 bins, unnormalized.
std::vector<cplx> forward_real(const std::vector<double>& x);

/// Inverse of forward_real for a length-n signal, normalized by 1/n.
std::vector<double> inverse_real(const std::vector<cplx>& spectrum, std::size_t n);

/// Complex transform; the inverse is normalized by 1/n.
std::vector<cplx> forward(const std::vector<cplx>& x);
std::vector<cplx> inverse(const std::vector<cplx>& x);

}  // namespace socketlab::fft
