#pragma once

#include "qict/interferometer.hpp"
#include "qict/sample.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qict {

/// Gaussian signal spectrum sampled on a uniform relative-wavelength grid.
/// Sample k sits at (k - N/2) * grid_step with N = round(grid_span / grid_step).
struct SignalSpectrum {
  double center_wavelength = 810e-9;
  double fwhm = 2.924e-9;
  double grid_step = 0.07e-9;
  double grid_span = 20e-9;

  std::size_t sample_count() const;
  double relative_wavelength(std::size_t k) const;
  std::vector<double> axis() const;
  /// Normalized intensity envelope E(dl), E(0) = 1.
  double envelope(double relative_wavelength) const;
  /// exp(-alpha dl^2) form of the envelope.
  double envelope_alpha() const;
};

void validate(const SignalSpectrum& spec);

enum class FringeKind { FD, TD, PHASE };

std::string_view to_string(FringeKind kind);
FringeKind fringe_kind_from_string(std::string_view text);

/// Expected rates (or counts) and optional sampled counts along a scan axis.
/// Raw sampled values are integer-valued; after DC subtraction both columns
/// may go negative and dc_subtracted is set.
struct FringeRecord {
  FringeKind kind = FringeKind::FD;
  std::string axis_unit = "m";
  std::vector<double> axis;
  std::vector<double> expected;
  std::optional<std::vector<double>> sampled;
  bool dc_subtracted = false;

  std::span<const double> data() const { return sampled ? std::span<const double>(*sampled) : expected; }
};

/// Throws DomainError on length mismatch, non-monotone axis or (unless
/// dc_subtracted) negative expected values.
void validate(const FringeRecord& record);

struct FdOptions {
  bool include_cross_terms = false;
  double cross_term_weight = 1.0;
  /// Use 2 pi dd (1/(l0+dl) - 1/l0) instead of the linearized -2 pi dd dl / l0^2.
  bool exact_phase = false;
  bool apply_rolloff = true;
};

/// Signal-photon spectrum behind a sample: envelope times the incoherent
/// background plus one sinusoid per reflection path. Path k sits at
/// dd_k = optical_roundtrip + delay_mismatch_length(cfg) and carries
/// interference_amplitude(cfg) * |amplitude_k| * rolloff(|dd_k|). Cross terms
/// between paths (weight |a_j a_k|) are added when requested.
FringeRecord synthesize_fd_fringe(const InterferometerConfig& cfg, std::span<const ReflectionPath> paths,
                                  const SignalSpectrum& spec, const FdOptions& options = {});

/// The same spectrum with the idler path blocked: envelope times the mean rate.
FringeRecord blocked_idler_reference(const InterferometerConfig& cfg, const SignalSpectrum& spec);

/// |sinc(pi depth grid_step / l0^2)|: fringe washout over one spectral bin.
double rolloff_factor(double depth, const SignalSpectrum& spec);

/// Largest depth the spectral sampling resolves, l0^2 / (2 grid_step).
double nyquist_depth(const SignalSpectrum& spec);

/// Pointwise fringe - reference. A sampled fringe minus an expected-only
/// reference subtracts the reference's expected values from the samples.
FringeRecord subtract_dc(const FringeRecord& fringe, const FringeRecord& reference);

} // namespace qict
