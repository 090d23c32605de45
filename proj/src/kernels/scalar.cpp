#include "qict/kernels/kernels.hpp"

#include <cmath>

namespace qict::kernels {
namespace {

void add_tone(std::span<double> out, double x0, double dx, const Tone& tone) {
  const double origin = x0 - tone.center;
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double u = std::fma(static_cast<double>(k), dx, origin);
    out[k] += tone.amplitude * std::exp(-tone.alpha * u * u) * std::sin(std::fma(tone.omega, u, tone.phase));
  }
}

void fill_gaussian(std::span<double> out, double x0, double dx, double center, double alpha) {
  const double origin = x0 - center;
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double u = std::fma(static_cast<double>(k), dx, origin);
    out[k] = std::exp(-alpha * u * u);
  }
}

void magnitude(std::span<const std::complex<double>> in, std::span<double> out) {
  for (std::size_t k = 0; k < in.size(); ++k) {
    const double re = in[k].real();
    const double im = in[k].imag();
    out[k] = std::sqrt(re * re + im * im);
  }
}

} // namespace

const Table& scalar_table() {
  static constexpr Table table{Isa::scalar, &add_tone, &fill_gaussian, &magnitude};
  return table;
}

} // namespace qict::kernels
