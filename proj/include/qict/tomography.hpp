#pragma once

#include "qict/detector.hpp"
#include "qict/sample.hpp"
#include "qict/spectra.hpp"

#include <optional>
#include <span>
#include <vector>

namespace qict {

/// Folded one-sided depth profile: bin k sits at k * l0^2 / (N * grid_step)
/// for an N-point spectral grid, k = 0..N/2. Magnitudes are 2|X_k| / sum(w).
struct DepthProfile {
  std::vector<double> depth;
  std::vector<double> magnitude;

  double step() const { return depth.size() > 1 ? depth[1] - depth[0] : 0.0; }
};

struct Peak {
  double position = 0.0;
  double fwhm = 0.0;
  double amplitude = 0.0;
};

enum class Window { none, hann };

/// Time-domain scan of the signal delay: rate(delay) = B + sum_k A_k env(delay - dd_k)
/// cos(2 pi (delay - dd_k) / l0 + phi_k) where env is the coherence envelope of
/// the spectrum and dd_k = optical_roundtrip + delay_mismatch_length(cfg).
FringeRecord td_scan(const InterferometerConfig& cfg, std::span<const ReflectionPath> paths,
                     const SignalSpectrum& spec, std::span<const double> delay_grid);

/// Normalized coherence envelope |FT of the spectral envelope| at path difference u.
double coherence_envelope(double path_difference, const SignalSpectrum& spec);

/// Piezo scan of the idler reference mirror; period lambda_i0 / 2.
FringeRecord fine_phase_scan(const InterferometerConfig& cfg, std::span<const double> mirror_displacement_grid);

/// (max - min) / (max + min) of a record's expected values.
double fringe_contrast(const FringeRecord& record);

/// Magnitude of the DFT of an FD fringe over the relative-wavelength axis.
/// If `reference` is given it is subtracted first.
DepthProfile fd_reconstruct(const FringeRecord& fringe, const SignalSpectrum& spec, Window window,
                            const FringeRecord* reference = nullptr);

/// Local maxima whose height and topographic prominence both exceed
/// min_prominence * max. FWHM from linearly interpolated half-maximum
/// crossings (clamped at the axis ends); position and amplitude refined by a
/// three-point log-parabola.
std::vector<Peak> detect_peaks(const DepthProfile& profile, double min_prominence);

/// Amplitude-profile FWHM of the FT of the Gaussian spectrum, (4 ln2 / pi) l0^2 / fwhm.
double axial_resolution_theory(const SignalSpectrum& spec);

/// Spectrum FWHM that yields a given axial resolution.
double spectrum_fwhm_for_resolution(double resolution, double center_wavelength);

/// Envelope of a TD record's fringe bursts from the analytic signal of
/// (rate - baseline). The returned profile's axis is the delay axis.
DepthProfile td_burst_envelope(const FringeRecord& record, std::optional<double> baseline = std::nullopt);

struct ResolutionPoint {
  double delay = 0.0;
  double fwhm = 0.0;     ///< NaN when no peak was found
  double amplitude = 0.0;
  double position = 0.0;
};

/// Single-mirror FWHM versus signal delay through the full FD pipeline.
std::vector<ResolutionPoint> resolution_vs_delay(const InterferometerConfig& cfg, const SignalSpectrum& spec,
                                                 std::span<const double> delays);
std::vector<ResolutionPoint> resolution_vs_delay(const SignalSpectrum& spec, std::span<const double> delays);

/// A fixed FD measurement used for SNR analysis.
struct SnrScene {
  InterferometerConfig cfg;
  std::vector<ReflectionPath> paths;
  SignalSpectrum spec;
  double rate_scale = 1.0;
  double target_depth = 0.0; ///< depth of the peak whose SNR is reported
  bool noiseless = false;
  unsigned threads = 1;
};

struct SnrPoint {
  double integration_time = 0.0;
  double snr = 0.0;
};

/// SNR = peak power at target_depth / mean power of the noise floor away from
/// peaks, averaged over repeats. Noiseless scenes report +infinity.
std::vector<SnrPoint> snr_estimate(const SnrScene& scene, const DetectorModel& det,
                                   std::span<const double> integration_times, int repeats);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Thickness recovered for one layer from the peaks bounding it.
struct ThicknessEstimate {
  std::size_t layer = 0;
  double optical_spacing = 0.0; ///< NaN if a bounding peak was not found
  double thickness = 0.0;       ///< optical_spacing / (2 n_g)
};

/// Assigns each interface of `stack` the detected peak nearest its expected
/// folded depth (within `tolerance`) and converts peak spacings to layer
/// thicknesses with the layers' group indices.
std::vector<ThicknessEstimate> recover_thicknesses(const LayerStack& stack, double delay_mismatch,
                                                   std::span<const Peak> peaks, double tolerance);

} // namespace qict
