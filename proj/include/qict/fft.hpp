#pragma once

#include <complex>
#include <span>
#include <vector>

namespace qict::fft {

/// Unnormalized forward DFT of a real sequence; returns bins 0..N/2.
std::vector<std::complex<double>> forward_real(std::span<const double> input);

/// Unnormalized complex DFT (sign -1 forward, +1 inverse).
std::vector<std::complex<double>> transform(std::span<const std::complex<double>> input, bool inverse);

} // namespace qict::fft
