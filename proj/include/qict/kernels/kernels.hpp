#pragma once

// Data-parallel inner loops shared by the synthesis, reconstruction and
// imaging code. Every kernel has a scalar reference implementation and,
// where the CPU supports it, an AVX2+FMA variant selected at runtime.
// The two are equivalence-tested in tests/kernels_test.cpp.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace qict::kernels {

enum class Isa { scalar, avx2 };

/// One Gaussian-windowed sinusoid sampled on a uniform axis:
///   amplitude * exp(-alpha * u^2) * sin(omega * u + phase),  u = x - center.
/// alpha == 0 gives a pure sinusoid.
struct Tone {
  double amplitude = 0.0;
  double center = 0.0;
  double alpha = 0.0;
  double omega = 0.0;
  double phase = 0.0;
};

/// Function table for one instruction set.
struct Table {
  Isa isa;
  /// out[k] += tone(x0 + k*dx)
  void (*add_tone)(std::span<double> out, double x0, double dx, const Tone& tone);
  /// out[k] = exp(-alpha * (x0 + k*dx - center)^2)
  void (*fill_gaussian)(std::span<double> out, double x0, double dx, double center,
                        double alpha);
  /// out[k] = |in[k]|
  void (*magnitude)(std::span<const std::complex<double>> in, std::span<double> out);
};

const Table& scalar_table();

/// Null when the binary was built without AVX2 support for this target.
const Table* avx2_table();

bool cpu_has_avx2();

/// The table used by the library. Defaults to the best ISA the CPU
/// supports; the environment variable QICT_ISA=scalar forces the reference.
const Table& active();

/// Overrides the active table. Returns false if the ISA is unavailable.
bool select(Isa isa);

std::string_view name(Isa isa);

} // namespace qict::kernels
