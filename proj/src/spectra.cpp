#include "qict/spectra.hpp"

#include "qict/error.hpp"
#include "qict/kernels/kernels.hpp"

#include <cmath>
#include <string>

namespace qict {
namespace {

constexpr double kFourLn2 = 2.772588722239781;

bool same_axis(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double scale = std::max(std::abs(a[k]), std::abs(b[k]));
    if (std::abs(a[k] - b[k]) > 1e-12 * scale + 1e-300) return false;
  }
  return true;
}

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

double path_phase(double amplitude) { return amplitude < 0.0 ? kPi : 0.0; }

} // namespace

std::size_t SignalSpectrum::sample_count() const {
  return static_cast<std::size_t>(std::llround(grid_span / grid_step));
}

double SignalSpectrum::relative_wavelength(std::size_t k) const {
  const auto half = static_cast<double>(sample_count() / 2);
  return (static_cast<double>(k) - half) * grid_step;
}

std::vector<double> SignalSpectrum::axis() const {
  std::vector<double> out(sample_count());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = relative_wavelength(k);
  return out;
}

double SignalSpectrum::envelope_alpha() const { return kFourLn2 / (fwhm * fwhm); }

double SignalSpectrum::envelope(double relative_wavelength) const {
  return std::exp(-envelope_alpha() * relative_wavelength * relative_wavelength);
}

void validate(const SignalSpectrum& spec) {
  if (!(spec.center_wavelength > 0.0)) throw DomainError("spectrum.center_wavelength must be > 0");
  if (!(spec.fwhm > 0.0)) throw DomainError("spectrum.fwhm must be > 0");
  if (!(spec.grid_step > 0.0)) throw DomainError("spectrum.grid_step must be > 0");
  if (!(spec.grid_span >= 4.0 * spec.fwhm)) throw DomainError("spectrum.grid_span must cover at least 4 fwhm");
}

std::string_view to_string(FringeKind kind) {
  switch (kind) {
  case FringeKind::FD: return "FD";
  case FringeKind::TD: return "TD";
  case FringeKind::PHASE: return "PHASE";
  }
  return "?";
}

FringeKind fringe_kind_from_string(std::string_view text) {
  if (text == "FD") return FringeKind::FD;
  if (text == "TD") return FringeKind::TD;
  if (text == "PHASE") return FringeKind::PHASE;
  throw DomainError("unknown fringe kind '" + std::string(text) + "'");
}

void validate(const FringeRecord& record) {
  if (record.expected.size() != record.axis.size()) throw DomainError("fringe: expected/axis length mismatch");
  if (record.sampled && record.sampled->size() != record.axis.size()) {
    throw DomainError("fringe: sampled/axis length mismatch");
  }
  for (std::size_t k = 1; k < record.axis.size(); ++k) {
    if (!(record.axis[k] > record.axis[k - 1])) throw DomainError("fringe: scan axis must be strictly increasing");
  }
  if (!record.dc_subtracted) {
    for (double v : record.expected) {
      if (!(v >= 0.0)) throw DomainError("fringe: expected values must be non-negative");
    }
  }
}

double rolloff_factor(double depth, const SignalSpectrum& spec) {
  if (!(depth >= 0.0)) throw DomainError("rolloff_factor: depth must be >= 0");
  const double l0 = spec.center_wavelength;
  return std::abs(sinc(kPi * depth * spec.grid_step / (l0 * l0)));
}

double nyquist_depth(const SignalSpectrum& spec) {
  const double l0 = spec.center_wavelength;
  return l0 * l0 / (2.0 * spec.grid_step);
}

FringeRecord synthesize_fd_fringe(const InterferometerConfig& cfg, std::span<const ReflectionPath> paths,
                                  const SignalSpectrum& spec, const FdOptions& options) {
  validate(spec);
  if (paths.empty()) throw DomainError("synthesize_fd_fringe: at least one reflection path required");
  const double mismatch = delay_mismatch_length(cfg);
  if (!std::isfinite(mismatch)) throw DomainError("synthesize_fd_fringe: delay mismatch not finite");

  const auto& kern = kernels::active();
  const std::size_t n = spec.sample_count();
  const double l0 = spec.center_wavelength;
  const double x0 = spec.relative_wavelength(0);
  const double base_amplitude = interference_amplitude(cfg);
  const double base_phase = effective_phase_offset(cfg) + cfg.phi;

  std::vector<double> oscillation(n, 0.0);
  auto add = [&](double depth, double amplitude, double phase) {
    if (amplitude == 0.0) return;
    if (options.apply_rolloff) amplitude *= rolloff_factor(std::abs(depth), spec);
    if (options.exact_phase) {
      for (std::size_t k = 0; k < n; ++k) {
        const double dl = spec.relative_wavelength(k);
        oscillation[k] += amplitude * std::sin(2.0 * kPi * depth * (1.0 / (l0 + dl) - 1.0 / l0) + phase);
      }
    } else {
      const kernels::Tone tone{amplitude, 0.0, 0.0, -2.0 * kPi * depth / (l0 * l0), phase};
      kern.add_tone(oscillation, x0, spec.grid_step, tone);
    }
  };

  for (const auto& p : paths) {
    add(p.optical_roundtrip + mismatch, base_amplitude * std::abs(p.amplitude), base_phase + path_phase(p.amplitude));
  }
  if (options.include_cross_terms) {
    for (std::size_t j = 0; j < paths.size(); ++j) {
      for (std::size_t k = j + 1; k < paths.size(); ++k) {
        const double weight = options.cross_term_weight * std::abs(paths[j].amplitude * paths[k].amplitude);
        add(paths[k].optical_roundtrip - paths[j].optical_roundtrip, base_amplitude * weight,
            base_phase + path_phase(paths[k].amplitude) - path_phase(paths[j].amplitude));
      }
    }
  }

  std::vector<double> envelope(n);
  kern.fill_gaussian(envelope, x0, spec.grid_step, 0.0, spec.envelope_alpha());
  const double background = mean_signal_rate(cfg);

  FringeRecord out;
  out.kind = FringeKind::FD;
  out.axis = spec.axis();
  out.expected.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    // Clamp rounding-level negatives; the rate is physically non-negative.
    out.expected[k] = std::max(0.0, envelope[k] * (background + oscillation[k]));
  }
  return out;
}

FringeRecord blocked_idler_reference(const InterferometerConfig& cfg, const SignalSpectrum& spec) {
  validate(spec);
  const std::size_t n = spec.sample_count();
  std::vector<double> envelope(n);
  kernels::active().fill_gaussian(envelope, spec.relative_wavelength(0), spec.grid_step, 0.0, spec.envelope_alpha());
  const double background = mean_signal_rate(cfg);
  FringeRecord out;
  out.kind = FringeKind::FD;
  out.axis = spec.axis();
  out.expected.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.expected[k] = envelope[k] * background;
  return out;
}

FringeRecord subtract_dc(const FringeRecord& fringe, const FringeRecord& reference) {
  if (fringe.kind != reference.kind || !same_axis(fringe.axis, reference.axis)) {
    throw AlignmentError("subtract_dc: fringe and reference scan axes differ");
  }
  FringeRecord out = fringe;
  out.dc_subtracted = true;
  for (std::size_t k = 0; k < out.expected.size(); ++k) out.expected[k] -= reference.expected[k];
  if (out.sampled) {
    const auto& ref = reference.sampled ? *reference.sampled : reference.expected;
    for (std::size_t k = 0; k < out.sampled->size(); ++k) (*out.sampled)[k] -= ref[k];
  }
  return out;
}

} // namespace qict
