#include "qict/error.hpp"
#include "qict/spectra.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace qict;

namespace {

InterferometerConfig config(double mismatch = 0.0) {
  const auto s = from_efficiencies(0.9, 0.9);
  auto cfg = make_config(s, s);
  set_delay_mismatch(cfg, mismatch);
  return cfg;
}

std::vector<ReflectionPath> mirror(double depth = 0.0, double amplitude = 1.0) { return {{depth, amplitude, 0}}; }

// Oscillatory part of the fringe, (expected - reference) / envelope.
std::vector<double> oscillation(const FringeRecord& f, const InterferometerConfig& cfg, const SignalSpectrum& spec) {
  std::vector<double> out(f.axis.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double e = std::exp(-4.0 * std::log(2.0) * f.axis[k] * f.axis[k] / (spec.fwhm * spec.fwhm));
    out[k] = f.expected[k] / e - mean_signal_rate(cfg);
  }
  return out;
}

struct ToneFit {
  double amplitude;
  double residual; ///< max abs deviation
};

// Least squares y ~ a sin(k x) + b cos(k x).
ToneFit fit_tone(const std::vector<double>& x, const std::vector<double>& y, double k) {
  double ss = 0, sc = 0, cc = 0, ys = 0, yc = 0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double s = std::sin(k * x[j]), c = std::cos(k * x[j]);
    ss += s * s;
    sc += s * c;
    cc += c * c;
    ys += y[j] * s;
    yc += y[j] * c;
  }
  const double det = ss * cc - sc * sc;
  const double a = (ys * cc - yc * sc) / det;
  const double b = (yc * ss - ys * sc) / det;
  double worst = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    worst = std::max(worst, std::abs(y[j] - a * std::sin(k * x[j]) - b * std::cos(k * x[j])));
  }
  return {std::hypot(a, b), worst};
}

int sign_changes(const std::vector<double>& v) {
  int n = 0;
  for (std::size_t k = 1; k < v.size(); ++k) n += (v[k - 1] < 0.0) != (v[k] < 0.0);
  return n;
}

} // namespace

TEST_CASE("spectral grid") {
  SignalSpectrum spec;
  CHECK(spec.sample_count() == 286);
  const auto axis = spec.axis();
  CHECK(axis[143] == 0.0);
  CHECK(axis[0] == doctest::Approx(-143 * 0.07e-9).epsilon(1e-12));
  CHECK(axis[1] - axis[0] == doctest::Approx(0.07e-9).epsilon(1e-9));
  CHECK(spec.envelope(0.0) == 1.0);
  CHECK(spec.envelope(spec.fwhm / 2) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_NOTHROW(validate(spec));
  spec.grid_span = 3.0 * spec.fwhm;
  CHECK_THROWS_AS(validate(spec), DomainError);
  spec = {};
  spec.grid_step = 0.0;
  CHECK_THROWS_AS(validate(spec), DomainError);
}

TEST_CASE("zero-depth path gives a constant-phase fringe") {
  const auto cfg = config();
  SignalSpectrum spec;
  const auto f = synthesize_fd_fringe(cfg, mirror(), spec);
  const auto osc = oscillation(f, cfg, spec);
  for (double v : osc) CHECK(v == doctest::Approx(osc[0]).epsilon(1e-9));
}

TEST_CASE("1 mm signal offset gives 1 mm / l0^2 cycles per unit wavelength") {
  const auto cfg = config(1e-3);
  SignalSpectrum spec;
  FdOptions opt;
  opt.apply_rolloff = false;
  const auto f = synthesize_fd_fringe(cfg, mirror(), spec, opt);
  const double k = 2.0 * oracle::pi * 1e-3 / std::pow(spec.center_wavelength, 2);
  const auto fit = fit_tone(f.axis, oscillation(f, cfg, spec), k);
  const double amp = interference_amplitude(cfg);
  CHECK(fit.residual < 1e-9 * amp);
  CHECK(fit.amplitude == doctest::Approx(amp).epsilon(1e-9));
  // A neighbouring frequency does not fit.
  CHECK(fit_tone(f.axis, oscillation(f, cfg, spec), 1.05 * k).residual > 0.1 * amp);
}

TEST_CASE("envelope factorization: constant oscillation amplitude") {
  const auto cfg = config(0.7e-3);
  SignalSpectrum spec;
  FdOptions opt;
  opt.apply_rolloff = false;
  const auto f = synthesize_fd_fringe(cfg, mirror(0.0, -0.5), spec, opt);
  const double k = 2.0 * oracle::pi * 0.7e-3 / std::pow(spec.center_wavelength, 2);
  const auto osc = oscillation(f, cfg, spec);
  const double amp = 0.5 * interference_amplitude(cfg);
  // Fit separately on each half of the grid: same amplitude on both.
  const std::size_t h = f.axis.size() / 2;
  const std::vector<double> xa(f.axis.begin(), f.axis.begin() + h), xb(f.axis.begin() + h, f.axis.end());
  const std::vector<double> ya(osc.begin(), osc.begin() + h), yb(osc.begin() + h, osc.end());
  const auto fa = fit_tone(xa, ya, k);
  const auto fb = fit_tone(xb, yb, k);
  CHECK(std::abs(fa.amplitude - amp) < 1e-9 * amp);
  CHECK(std::abs(fb.amplitude - amp) < 1e-9 * amp);
  CHECK(fa.residual < 1e-9 * amp);
}

TEST_CASE("fringe frequency increases with depth") {
  SignalSpectrum spec;
  int previous = -1;
  for (double d : {0.2e-3, 0.5e-3, 1e-3, 2e-3, 3e-3}) {
    const auto cfg = config(d);
    const int n = sign_changes(oscillation(synthesize_fd_fringe(cfg, mirror(), spec), cfg, spec));
    CHECK(n > previous);
    previous = n;
  }
}

TEST_CASE("rolloff factor") {
  SignalSpectrum spec;
  CHECK(rolloff_factor(0.0, spec) == 1.0);
  CHECK(rolloff_factor(nyquist_depth(spec), spec) == doctest::Approx(2.0 / oracle::pi).epsilon(1e-14));
  CHECK(nyquist_depth(spec) == doctest::Approx(4.69e-3).epsilon(1e-3));
  CHECK(nyquist_depth(spec) == doctest::Approx(810e-9 * 810e-9 / (2 * 0.07e-9)).epsilon(1e-14));
  const double first_zero = std::pow(spec.center_wavelength, 2) / spec.grid_step;
  CHECK(rolloff_factor(first_zero, spec) < 1e-15);
  const double d = 1.3e-3;
  CHECK(rolloff_factor(d, spec) ==
        doctest::Approx(oracle::sinc(oracle::pi * d * spec.grid_step / std::pow(spec.center_wavelength, 2))).epsilon(1e-14));
  CHECK_THROWS_AS(rolloff_factor(-1e-3, spec), DomainError);
  double prev = 2.0;
  for (double x = 0.0; x <= nyquist_depth(spec); x += 0.25e-3) {
    CHECK(rolloff_factor(x, spec) < prev);
    prev = rolloff_factor(x, spec);
  }
}

TEST_CASE("roll-off scales the synthesized amplitude") {
  const auto cfg = config(3e-3);
  SignalSpectrum spec;
  FdOptions off;
  off.apply_rolloff = false;
  const auto with = oscillation(synthesize_fd_fringe(cfg, mirror(), spec), cfg, spec);
  const auto without = oscillation(synthesize_fd_fringe(cfg, mirror(), spec, off), cfg, spec);
  const double ratio = rolloff_factor(3e-3, spec);
  for (std::size_t k = 0; k < with.size(); k += 11) CHECK(with[k] == doctest::Approx(ratio * without[k]).epsilon(1e-9));
}

TEST_CASE("subtract_dc") {
  SignalSpectrum spec;
  const auto cfg = config(1e-3);
  const auto f = synthesize_fd_fringe(cfg, mirror(), spec);
  const auto zero = subtract_dc(f, f);
  CHECK(zero.dc_subtracted);
  for (double v : zero.expected) CHECK(v == 0.0);

  const auto ref = blocked_idler_reference(cfg, spec);
  const auto osc = subtract_dc(f, ref);
  const auto dft = oracle::naive_dft(osc.expected);
  double peak = 0.0;
  for (std::size_t k = 1; k < dft.size() / 2; ++k) peak = std::max(peak, std::abs(dft[k]));
  CHECK(std::abs(dft[0]) < 1e-9 * peak);

  FringeRecord shifted = ref;
  shifted.axis[3] += 1e-12;
  CHECK_THROWS_AS(subtract_dc(f, shifted), AlignmentError);
  FringeRecord shorter = ref;
  shorter.axis.pop_back();
  shorter.expected.pop_back();
  CHECK_THROWS_AS(subtract_dc(f, shorter), AlignmentError);
}

TEST_CASE("noisy fringe minus noiseless reference has zero mean") {
  SignalSpectrum spec;
  const auto cfg = config(1e-3);
  const auto f = synthesize_fd_fringe(cfg, mirror(), spec);
  const auto ref = blocked_idler_reference(cfg, spec);
  const double scale = 1e5;
  FringeRecord noisy = f;
  noisy.sampled.emplace();
  std::mt19937_64 rng(42);
  double var = 0.0;
  for (std::size_t k = 0; k < f.expected.size(); ++k) {
    const double mean = f.expected[k] * scale;
    noisy.expected[k] = mean;
    noisy.sampled->push_back(static_cast<double>(std::poisson_distribution<long long>(mean)(rng)));
    var += mean;
  }
  FringeRecord scaled_ref = ref;
  for (auto& v : scaled_ref.expected) v *= scale;
  const auto diff = subtract_dc(noisy, scaled_ref);
  const double mean = std::accumulate(diff.sampled->begin(), diff.sampled->end(), 0.0) / static_cast<double>(diff.sampled->size());
  const double sigma = std::sqrt(var) / static_cast<double>(diff.sampled->size());
  CHECK(std::abs(mean) < 3.0 * sigma);
}

TEST_CASE("cross terms") {
  SignalSpectrum spec;
  const auto cfg = config(0.2e-3);
  std::vector<ReflectionPath> two{{0.0, 0.5, 0}, {1e-3, -0.4, 0}};
  FdOptions on;
  on.include_cross_terms = true;
  const auto plain = synthesize_fd_fringe(cfg, two, spec);
  const auto cross = synthesize_fd_fringe(cfg, two, spec, on);
  double diff = 0.0;
  for (std::size_t k = 0; k < plain.expected.size(); ++k) diff = std::max(diff, std::abs(plain.expected[k] - cross.expected[k]));
  CHECK(diff > 1e-3 * interference_amplitude(cfg));

  two[1].amplitude = 0.0;
  const auto a = synthesize_fd_fringe(cfg, two, spec);
  const auto b = synthesize_fd_fringe(cfg, two, spec, on);
  for (std::size_t k = 0; k < a.expected.size(); ++k) CHECK(a.expected[k] == b.expected[k]);
}

TEST_CASE("blocked reference is envelope times mean rate") {
  SignalSpectrum spec;
  const auto cfg = config();
  const auto ref = blocked_idler_reference(cfg, spec);
  for (std::size_t k = 0; k < ref.axis.size(); ++k) {
    CHECK(ref.expected[k] == doctest::Approx(mean_signal_rate(cfg) * spec.envelope(ref.axis[k])).epsilon(1e-12));
  }
  auto blocked = cfg;
  blocked.eta_i = 0.0;
  const auto f = synthesize_fd_fringe(blocked, mirror(1e-3), spec);
  for (std::size_t k = 0; k < f.axis.size(); ++k) CHECK(f.expected[k] == doctest::Approx(ref.expected[k]).epsilon(1e-12));
}

TEST_CASE("fringe records") {
  SignalSpectrum spec;
  const auto f = synthesize_fd_fringe(config(1e-3), mirror(), spec);
  CHECK_NOTHROW(validate(f));
  for (double v : f.expected) CHECK(v >= 0.0);
  auto bad = f;
  bad.expected[5] = -1.0;
  CHECK_THROWS_AS(validate(bad), DomainError);
  bad.dc_subtracted = true;
  CHECK_NOTHROW(validate(bad));
  bad = f;
  std::swap(bad.axis[2], bad.axis[3]);
  CHECK_THROWS_AS(validate(bad), DomainError);
  CHECK(fringe_kind_from_string(to_string(FringeKind::TD)) == FringeKind::TD);
  CHECK_THROWS_AS(fringe_kind_from_string("XX"), DomainError);
  CHECK_THROWS_AS(synthesize_fd_fringe(config(), std::vector<ReflectionPath>{}, spec), DomainError);
}
