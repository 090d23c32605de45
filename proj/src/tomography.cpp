#include "qict/tomography.hpp"

#include "qict/error.hpp"
#include "qict/fft.hpp"
#include "qict/kernels/kernels.hpp"
#include "qict/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qict {
namespace {

constexpr double kLn2 = 0.6931471805599453;

double uniform_step(std::span<const double> axis) {
  if (axis.size() < 2) throw ResamplingRequiredError("scan axis needs at least two points");
  const double step = (axis.back() - axis.front()) / static_cast<double>(axis.size() - 1);
  for (std::size_t k = 1; k < axis.size(); ++k) {
    if (std::abs((axis[k] - axis[k - 1]) - step) > 1e-6 * std::abs(step)) {
      throw ResamplingRequiredError("scan axis is not uniformly spaced; resample before transforming");
    }
  }
  return step;
}

bool is_uniform(std::span<const double> axis) {
  try {
    uniform_step(axis);
    return true;
  } catch (const ResamplingRequiredError&) {
    return false;
  }
}

double td_envelope_alpha(const SignalSpectrum& spec) {
  const double l2 = spec.center_wavelength * spec.center_wavelength;
  return kPi * kPi * spec.fwhm * spec.fwhm / (4.0 * kLn2 * l2 * l2);
}

double path_phase(double amplitude) { return amplitude < 0.0 ? kPi : 0.0; }

// Evaluates `tone` on an arbitrary monotone grid, using the uniform fast
// path when the grid allows it.
void add_tone_on_grid(std::span<double> out, std::span<const double> grid, const kernels::Tone& tone) {
  const auto& kern = kernels::active();
  if (grid.size() >= 2 && is_uniform(grid)) {
    const double step = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
    kern.add_tone(out, grid.front(), step, tone);
    return;
  }
  for (std::size_t k = 0; k < grid.size(); ++k) kern.add_tone(out.subspan(k, 1), grid[k], 0.0, tone);
}

double interpolate_crossing(double x0, double y0, double x1, double y1, double level) {
  if (y0 == y1) return x0;
  return x0 + (level - y0) * (x1 - x0) / (y1 - y0);
}

} // namespace

double coherence_envelope(double path_difference, const SignalSpectrum& spec) {
  return std::exp(-td_envelope_alpha(spec) * path_difference * path_difference);
}

FringeRecord td_scan(const InterferometerConfig& cfg, std::span<const ReflectionPath> paths,
                     const SignalSpectrum& spec, std::span<const double> delay_grid) {
  validate(spec);
  for (std::size_t k = 1; k < delay_grid.size(); ++k) {
    if (!(delay_grid[k] > delay_grid[k - 1])) throw DomainError("td_scan: delay grid must be strictly increasing");
  }
  const double mismatch = delay_mismatch_length(cfg);
  const double base_amplitude = interference_amplitude(cfg);
  const double base_phase = effective_phase_offset(cfg) + cfg.phi + kPi / 2.0;
  const double alpha = td_envelope_alpha(spec);
  const double omega = 2.0 * kPi / spec.center_wavelength;

  FringeRecord out;
  out.kind = FringeKind::TD;
  out.axis.assign(delay_grid.begin(), delay_grid.end());
  out.expected.assign(delay_grid.size(), 0.0);
  for (const auto& p : paths) {
    const kernels::Tone tone{base_amplitude * std::abs(p.amplitude), p.optical_roundtrip + mismatch, alpha, omega,
                             base_phase + path_phase(p.amplitude)};
    add_tone_on_grid(out.expected, delay_grid, tone);
  }
  const double background = mean_signal_rate(cfg);
  for (auto& v : out.expected) v = std::max(0.0, background + v);
  return out;
}

FringeRecord fine_phase_scan(const InterferometerConfig& cfg, std::span<const double> mirror_displacement_grid) {
  for (std::size_t k = 1; k < mirror_displacement_grid.size(); ++k) {
    if (!(mirror_displacement_grid[k] > mirror_displacement_grid[k - 1])) {
      throw DomainError("fine_phase_scan: displacement grid must be strictly increasing");
    }
  }
  // Moving the idler mirror by x lengthens the idler roundtrip by 2x.
  const kernels::Tone tone{interference_amplitude(cfg), 0.0, 0.0, 4.0 * kPi / cfg.lambda_i0,
                           cfg.phi + effective_phase_offset(cfg)};
  FringeRecord out;
  out.kind = FringeKind::PHASE;
  out.axis.assign(mirror_displacement_grid.begin(), mirror_displacement_grid.end());
  out.expected.assign(out.axis.size(), 0.0);
  add_tone_on_grid(out.expected, out.axis, tone);
  const double background = mean_signal_rate(cfg);
  for (auto& v : out.expected) v = std::max(0.0, background + v);
  return out;
}

double fringe_contrast(const FringeRecord& record) {
  if (record.expected.empty()) throw DomainError("fringe_contrast: empty record");
  const auto [lo, hi] = std::minmax_element(record.expected.begin(), record.expected.end());
  if (*hi + *lo == 0.0) throw UndefinedVisibilityError("fringe_contrast: record is dark");
  return (*hi - *lo) / (*hi + *lo);
}

DepthProfile fd_reconstruct(const FringeRecord& fringe, const SignalSpectrum& spec, Window window,
                            const FringeRecord* reference) {
  if (fringe.kind != FringeKind::FD) throw UsageError("fd_reconstruct: expects an FD fringe record");
  const double step = uniform_step(fringe.axis);
  const FringeRecord subtracted = reference ? subtract_dc(fringe, *reference) : FringeRecord{};
  const FringeRecord& source = reference ? subtracted : fringe;

  const auto data = source.data();
  const std::size_t n = data.size();
  std::vector<double> weighted(data.begin(), data.end());
  double weight_sum = static_cast<double>(n);
  if (window == Window::hann && n > 1) {
    weight_sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double w = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(k) / static_cast<double>(n - 1)));
      weighted[k] *= w;
      weight_sum += w;
    }
  }

  const auto bins = fft::forward_real(weighted);
  DepthProfile out;
  out.magnitude.resize(bins.size());
  kernels::active().magnitude(bins, out.magnitude);
  const double scale = 2.0 / weight_sum;
  for (auto& m : out.magnitude) m *= scale;

  const double l0 = spec.center_wavelength;
  const double depth_step = l0 * l0 / (static_cast<double>(n) * step);
  out.depth.resize(bins.size());
  for (std::size_t k = 0; k < bins.size(); ++k) out.depth[k] = static_cast<double>(k) * depth_step;
  return out;
}

std::vector<Peak> detect_peaks(const DepthProfile& profile, double min_prominence) {
  const auto& m = profile.magnitude;
  const auto& x = profile.depth;
  if (m.empty()) throw DomainError("detect_peaks: empty profile");
  const double top = *std::max_element(m.begin(), m.end());
  if (!(top > 0.0)) return {};
  const double threshold = min_prominence * top;
  const std::size_t n = m.size();
  const double step = profile.step();

  std::vector<Peak> peaks;
  for (std::size_t k = 0; k < n; ++k) {
    const bool rises = k == 0 || m[k] > m[k - 1];
    const bool falls = k + 1 == n || m[k] >= m[k + 1];
    if (!rises || !falls || m[k] < threshold) continue;

    // Topographic prominence; at an axis end only the interior side counts.
    double left_base = m[k];
    for (std::size_t j = k; j-- > 0 && m[j] <= m[k];) left_base = std::min(left_base, m[j]);
    double right_base = m[k];
    for (std::size_t j = k + 1; j < n && m[j] <= m[k]; ++j) right_base = std::min(right_base, m[j]);
    double base = std::max(left_base, right_base);
    if (k == 0) base = right_base;
    if (k + 1 == n) base = left_base;
    if (m[k] - base < threshold) continue;

    Peak p;
    const double half = 0.5 * m[k];
    double left = x.front();
    for (std::size_t j = k; j-- > 0;) {
      if (m[j] <= half) {
        left = interpolate_crossing(x[j], m[j], x[j + 1], m[j + 1], half);
        break;
      }
    }
    double right = x.back();
    for (std::size_t j = k + 1; j < n; ++j) {
      if (m[j] <= half) {
        right = interpolate_crossing(x[j - 1], m[j - 1], x[j], m[j], half);
        break;
      }
    }
    p.fwhm = right - left;

    p.position = x[k];
    p.amplitude = m[k];
    // Folded axis: bin 0 is its own mirror image.
    const double lm = k > 0 ? m[k - 1] : (n > 1 ? m[1] : 0.0);
    const double rm = k + 1 < n ? m[k + 1] : 0.0;
    if (lm > 0.0 && rm > 0.0 && k + 1 < n) {
      const double a = std::log(lm);
      const double b = std::log(m[k]);
      const double c = std::log(rm);
      const double den = a - 2.0 * b + c;
      if (den < 0.0) {
        const double delta = std::clamp(0.5 * (a - c) / den, -0.5, 0.5);
        p.position = x[k] + delta * step;
        p.amplitude = std::exp(b - 0.25 * (a - c) * delta);
      }
    }
    if (p.fwhm > 0.0) peaks.push_back(p);
  }
  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.position < b.position; });
  return peaks;
}

double axial_resolution_theory(const SignalSpectrum& spec) {
  const double l0 = spec.center_wavelength;
  return 4.0 * kLn2 / kPi * l0 * l0 / spec.fwhm;
}

double spectrum_fwhm_for_resolution(double resolution, double center_wavelength) {
  return 4.0 * kLn2 / kPi * center_wavelength * center_wavelength / resolution;
}

DepthProfile td_burst_envelope(const FringeRecord& record, std::optional<double> baseline) {
  uniform_step(record.axis);
  const auto data = record.data();
  const std::size_t n = data.size();
  const double offset = baseline.value_or(std::accumulate(data.begin(), data.end(), 0.0) / static_cast<double>(n));
  std::vector<std::complex<double>> signal(n);
  for (std::size_t k = 0; k < n; ++k) signal[k] = {data[k] - offset, 0.0};

  auto spectrum = fft::transform(signal, false);
  // Analytic signal: keep DC (and Nyquist), double positive, drop negative frequencies.
  const std::size_t positive_end = (n + 1) / 2;
  for (std::size_t k = 1; k < positive_end; ++k) spectrum[k] *= 2.0;
  for (std::size_t k = n / 2 + 1; k < n; ++k) spectrum[k] = 0.0;
  const auto analytic = fft::transform(spectrum, true);

  DepthProfile out;
  out.depth = record.axis;
  out.magnitude.resize(n);
  kernels::active().magnitude(analytic, out.magnitude);
  for (auto& v : out.magnitude) v /= static_cast<double>(n);
  return out;
}

std::vector<ResolutionPoint> resolution_vs_delay(const InterferometerConfig& cfg, const SignalSpectrum& spec,
                                                 std::span<const double> delays) {
  const std::vector<ReflectionPath> mirror{{0.0, 1.0, 0}};
  std::vector<ResolutionPoint> out;
  for (double delay : delays) {
    InterferometerConfig c = cfg;
    set_delay_mismatch(c, delay);
    const auto fringe = synthesize_fd_fringe(c, mirror, spec);
    const auto reference = blocked_idler_reference(c, spec);
    const auto profile = fd_reconstruct(fringe, spec, Window::none, &reference);
    const auto peaks = detect_peaks(profile, 0.05);
    ResolutionPoint point{delay, std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0};
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : peaks) {
      const double distance = std::abs(p.position - std::abs(delay));
      if (distance < best) {
        best = distance;
        point.fwhm = p.fwhm;
        point.amplitude = p.amplitude;
        point.position = p.position;
      }
    }
    out.push_back(point);
  }
  return out;
}

std::vector<ResolutionPoint> resolution_vs_delay(const SignalSpectrum& spec, std::span<const double> delays) {
  const auto source = from_efficiencies(1.0, 1.0);
  return resolution_vs_delay(make_config(source, source, 532e-9, spec.center_wavelength), spec, delays);
}

std::vector<SnrPoint> snr_estimate(const SnrScene& scene, const DetectorModel& det,
                                   std::span<const double> integration_times, int repeats) {
  if (repeats < 10) throw DomainError("snr_estimate: at least 10 repeats required");
  validate(det);
  const auto rates = synthesize_fd_fringe(scene.cfg, scene.paths, scene.spec);
  const auto reference_rates = blocked_idler_reference(scene.cfg, scene.spec);
  const double resolution = axial_resolution_theory(scene.spec);

  std::vector<SnrPoint> out;
  for (std::size_t t = 0; t < integration_times.size(); ++t) {
    DetectorModel d = det;
    d.integration_time = integration_times[t];
    const auto mean = to_counts(rates, d, scene.rate_scale, false);
    const auto reference = to_counts(reference_rates, d, scene.rate_scale, false);
    const auto clean = fd_reconstruct(mean, scene.spec, Window::none, &reference);

    std::size_t peak_bin = 0;
    double peak_value = -1.0;
    for (std::size_t k = 0; k < clean.depth.size(); ++k) {
      if (std::abs(clean.depth[k] - scene.target_depth) <= resolution && clean.magnitude[k] > peak_value) {
        peak_value = clean.magnitude[k];
        peak_bin = k;
      }
    }
    if (!(peak_value > 0.0)) throw UndefinedSnrError("snr_estimate: no signal at the target depth");
    if (scene.noiseless) {
      out.push_back({d.integration_time, std::numeric_limits<double>::infinity()});
      continue;
    }

    // Noise floor: bins where the noiseless profile is negligible.
    std::vector<std::size_t> floor_bins;
    for (std::size_t k = 0; k < clean.magnitude.size(); ++k) {
      if (clean.magnitude[k] < 1e-6 * peak_value) floor_bins.push_back(k);
    }
    if (floor_bins.empty()) throw UndefinedSnrError("snr_estimate: no signal-free bins for the noise floor");

    std::vector<double> peak_power(static_cast<std::size_t>(repeats));
    std::vector<double> noise_power(static_cast<std::size_t>(repeats));
    const std::uint64_t t_seed = derive_seed(det.rng_seed, t);
    parallel_for(peak_power.size(), scene.threads, [&](std::size_t r) {
      DetectorModel dr = d;
      dr.rng_seed = derive_seed(t_seed, r);
      FringeRecord noisy = mean;
      const auto draws = sample_counts(mean.expected, dr);
      noisy.sampled.emplace(draws.begin(), draws.end());
      const auto profile = fd_reconstruct(noisy, scene.spec, Window::none, &reference);
      peak_power[r] = profile.magnitude[peak_bin] * profile.magnitude[peak_bin];
      double sum = 0.0;
      for (std::size_t k : floor_bins) sum += profile.magnitude[k] * profile.magnitude[k];
      noise_power[r] = sum / static_cast<double>(floor_bins.size());
    });
    const double signal = std::accumulate(peak_power.begin(), peak_power.end(), 0.0);
    const double noise = std::accumulate(noise_power.begin(), noise_power.end(), 0.0);
    out.push_back({d.integration_time, signal / noise});
  }
  return out;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("fit_line: need two or more (x, y) pairs");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (sxx == 0.0) throw DomainError("fit_line: x values are all equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

std::vector<ThicknessEstimate> recover_thicknesses(const LayerStack& stack, double delay_mismatch,
                                                   std::span<const Peak> peaks, double tolerance) {
  const auto positions = interface_positions(stack);
  std::vector<double> matched(positions.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const double target = std::abs(positions[i] + delay_mismatch);
    double best = tolerance;
    for (const auto& p : peaks) {
      const double distance = std::abs(p.position - target);
      if (distance <= best) {
        best = distance;
        matched[i] = p.position;
      }
    }
  }
  std::vector<ThicknessEstimate> out;
  for (std::size_t l = 0; l < stack.layers.size(); ++l) {
    const double spacing = std::abs(matched[l + 1] - matched[l]);
    out.push_back({l, spacing, spacing / (2.0 * stack.layers[l].group_index)});
  }
  return out;
}

} // namespace qict
