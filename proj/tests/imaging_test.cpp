#include "qict/error.hpp"
#include "qict/imaging.hpp"
#include "qict/tomography.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace qict;

namespace {

// Silicon cover plate on chrome-patterned glass; the chrome sits at interface 1.
RegionStacks target() {
  LayerStack covered;
  covered.layers = {{0.5e-3, 3.61, {}}};
  covered.substrate_index = 1.5;
  covered.interface_reflectivity = {std::nullopt, kDefaultChromeReflectivity};
  LayerStack uncovered = covered;
  uncovered.interface_reflectivity.clear();
  return {covered, uncovered};
}

InterferometerConfig config() {
  const auto s = from_efficiencies(0.9, 0.9);
  auto cfg = make_config(s, s);
  set_delay_mismatch(cfg, 0.3e-3);
  return cfg;
}

constexpr double kChromeDepth = 0.3e-3 + 2.0 * 3.61 * 0.5e-3;

ScanGrid strip(std::size_t n, double step, double x0) {
  ScanGrid g;
  g.nx = n;
  g.ny = 1;
  g.step = step;
  g.origin_x = x0;
  return g;
}

} // namespace

TEST_CASE("overlap fraction examples") {
  const BeamProfile beam;
  CHECK(overlap_fraction(beam, PatternMask::uniform(true), 3e-6, -2e-6) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(overlap_fraction(beam, PatternMask::uniform(false), 0.0, 0.0) == 0.0);
  CHECK(overlap_fraction(beam, PatternMask::half_plane(0.0, true), 0.0, 0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(overlap_fraction(beam, PatternMask::half_plane(0.0, false), 0.0, 0.0) == doctest::Approx(0.5).epsilon(1e-14));

  // Edge one FWHM from the centre: Phi(-2 sqrt(2 ln 2)).
  const double expect = oracle::normal_cdf(-beam.fwhm_x / oracle::sigma_of_fwhm(beam.fwhm_x));
  CHECK(expect == doctest::Approx(0.009267).epsilon(1e-3));
  CHECK(std::abs(overlap_fraction(beam, PatternMask::half_plane(beam.fwhm_x, true), 0.0, 0.0) - expect) < 1e-4);
}

TEST_CASE("overlap fraction follows the error function across an edge") {
  const BeamProfile beam;
  const auto mask = PatternMask::half_plane(0.0, true);
  const double s = oracle::sigma_of_fwhm(beam.fwhm_x);
  for (double x = -30e-6; x <= 30e-6; x += 3.7e-6) {
    CHECK(std::abs(overlap_fraction(beam, mask, x, 0.0, Coupling::linear) - oracle::normal_cdf(x / s)) < 1e-14);
    // Mode overlap weights by I^2, a Gaussian narrower by sqrt 2.
    CHECK(std::abs(overlap_fraction(beam, mask, x, 0.0, Coupling::mode_overlap) -
                   oracle::normal_cdf(std::sqrt(2.0) * x / s)) < 1e-14);
  }
}

TEST_CASE("overlap fraction is bounded and monotone in coverage") {
  const BeamProfile beam{12e-6, 30e-6};
  double previous = -1.0;
  for (double edge = 40e-6; edge >= -40e-6; edge -= 5e-6) {
    const double f = overlap_fraction(beam, PatternMask::half_plane(edge, true), 0.0, 0.0);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    CHECK(f >= previous);
    previous = f;
  }
  const auto bars = PatternMask::bars(3, 10e-6, 50e-6, false);
  const auto inverse = PatternMask::bars(3, 10e-6, 50e-6, true);
  for (double x : {-20e-6, 0.0, 7e-6}) {
    CHECK(overlap_fraction(beam, bars, x, 0.0) + overlap_fraction(beam, inverse, x, 0.0) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("pattern masks") {
  const auto edge = PatternMask::half_plane(1.0, true);
  CHECK(edge(2.0, 0.0) == 1.0);
  CHECK(edge(0.0, 0.0) == 0.0);
  CHECK(edge(1.0, 5.0) == 0.5);
  const auto moved = edge.translated(1.0, 0.0);
  CHECK(moved(1.5, 0.0) == 0.0);
  CHECK(moved(2.5, 0.0) == 1.0);
  const auto bars = PatternMask::bars(3, 2.0, 10.0, true);
  CHECK(bars(0.0, 0.0) == 0.0);
  CHECK(bars(2.0, 0.0) == 1.0);
  CHECK(bars(4.0, 0.0) == 0.0);
  CHECK(bars(0.0, 6.0) == 1.0);
  CHECK_THROWS_AS(validate(BeamProfile{0.0, 1.0}), DomainError);
}

TEST_CASE("uniform target gives a constant image") {
  ScanGrid g;
  g.nx = 6;
  g.ny = 5;
  const auto img = scan_image(config(), SignalSpectrum{}, target(), PatternMask::uniform(true), BeamProfile{}, g, kChromeDepth);
  REQUIRE(img.values.size() == 30);
  for (double v : img.values) CHECK(v == doctest::Approx(img.values[0]).epsilon(1e-12));
  CHECK(img.values[0] > 0.0);
}

TEST_CASE("edge image is affine in the coupled overlap") {
  const SignalSpectrum spec;
  const BeamProfile beam;
  const auto mask = PatternMask::half_plane(0.0, true);
  const auto g = strip(24, 2.5e-6, -30e-6);
  ImagingOptions fast;
  fast.full_pipeline = false;
  for (bool full : {false, true}) {
    ImagingOptions opt;
    opt.full_pipeline = full;
    const auto img = scan_image(config(), spec, target(), mask, beam, g, kChromeDepth, opt);
    const double lo = img.values.front(), hi = img.values.back();
    CHECK(hi > lo);
    const double s = oracle::sigma_of_fwhm(beam.fwhm_x) / std::sqrt(2.0);
    for (std::size_t k = 0; k < g.nx; ++k) {
      const double x = g.origin_x + static_cast<double>(k) * g.step;
      const double f = oracle::normal_cdf(x / s);
      const double f0 = oracle::normal_cdf(g.origin_x / s);
      const double f1 = oracle::normal_cdf((g.origin_x + (g.nx - 1) * g.step) / s);
      const double predicted = lo + (hi - lo) * (f - f0) / (f1 - f0);
      CHECK(std::abs(img.values[k] - predicted) < 2e-3 * hi);
    }
  }
}

TEST_CASE("fast and full pipelines agree") {
  const SignalSpectrum spec;
  const auto g = strip(8, 6e-6, -20e-6);
  const auto mask = PatternMask::half_plane(0.0, true);
  ImagingOptions fast;
  fast.full_pipeline = false;
  const auto a = scan_image(config(), spec, target(), mask, BeamProfile{}, g, kChromeDepth);
  const auto b = scan_image(config(), spec, target(), mask, BeamProfile{}, g, kChromeDepth, fast);
  for (std::size_t k = 0; k < a.values.size(); ++k) CHECK(b.values[k] == doctest::Approx(a.values[k]).epsilon(0.03));
}

TEST_CASE("sqrt 2 law and the linear-coupling control") {
  const SignalSpectrum spec;
  for (const BeamProfile beam : {BeamProfile{17e-6, 20e-6}, BeamProfile{20e-6, 17e-6}}) {
    const auto g = strip(64, 1e-6, -31.5e-6);
    ImagingOptions opt;
    const auto img = scan_image(config(), spec, target(), PatternMask::half_plane(0.0, true), beam, g, kChromeDepth, opt);
    const double ratio = edge_response_fwhm(img.row(0)) / beam.fwhm_x;
    CHECK(ratio >= 0.68);
    CHECK(ratio <= 0.74);
    opt.coupling = Coupling::linear;
    const auto ctrl = scan_image(config(), spec, target(), PatternMask::half_plane(0.0, true), beam, g, kChromeDepth, opt);
    CHECK(edge_response_fwhm(ctrl.row(0)) == doctest::Approx(beam.fwhm_x).epsilon(0.02));
  }
}

TEST_CASE("vertical scan uses the y beam width") {
  ScanGrid g;
  g.nx = 1;
  g.ny = 64;
  g.step = 1e-6;
  g.origin_y = -31.5e-6;
  ImagingOptions opt;
  opt.full_pipeline = false;
  const auto img = scan_image(config(), SignalSpectrum{}, target(), PatternMask::half_plane(0.0, false), BeamProfile{},
                              g, kChromeDepth, opt);
  CHECK(edge_response_fwhm(img.column(0)) == doctest::Approx(20e-6 / std::sqrt(2.0)).epsilon(0.02));
}

TEST_CASE("three-bar pattern at pitch of three resolutions is resolved") {
  const SignalSpectrum spec;
  const BeamProfile beam;
  const double lsf = beam.fwhm_x / std::sqrt(2.0);
  const double width = 1.5 * lsf; // pitch 2 * width = 3 resolutions
  const auto mask = PatternMask::bars(3, width, 100e-6, true);
  const std::size_t n = 41;
  const double x0 = -2.0 * width;
  const auto g = strip(n, 4.0 * width / (n - 1), x0);
  const auto img = scan_image(config(), spec, target(), mask, beam, g, kChromeDepth);
  const auto uniform_c = scan_image(config(), spec, target(), PatternMask::uniform(true), beam, strip(1, 1e-6, 0.0), kChromeDepth);
  const auto uniform_u = scan_image(config(), spec, target(), PatternMask::uniform(false), beam, strip(1, 1e-6, 0.0), kChromeDepth);
  const double ctf = contrast_transfer(img.row(0), uniform_c.values[0], uniform_u.values[0]);
  CHECK(ctf > 0.5);
  CHECK(ctf <= 1.0);
  CHECK(modulation(img.row(0)) > 0.0);
}

TEST_CASE("translation equivariance is exact") {
  const SignalSpectrum spec;
  ScanGrid g;
  g.nx = 10;
  g.ny = 3;
  g.step = 4e-6;
  g.origin_x = -20e-6;
  g.origin_y = -4e-6;
  const auto mask = PatternMask::bars(3, 8e-6, 30e-6, true);
  const auto a = scan_image(config(), spec, target(), mask, BeamProfile{}, g, kChromeDepth);
  const double dx = std::ldexp(1.0, -17), dy = std::ldexp(1.0, -18);
  ScanGrid moved = g;
  moved.origin_x += dx;
  moved.origin_y += dy;
  const auto b = scan_image(config(), spec, target(), mask.translated(dx, dy), BeamProfile{}, moved, kChromeDepth);
  CHECK(a.values == b.values);
}

TEST_CASE("imaging is independent of the thread count and seeded noise is reproducible") {
  const SignalSpectrum spec;
  const auto g = strip(12, 3e-6, -18e-6);
  ImagingOptions opt;
  opt.detector = DetectorModel{1.0, 0.0, 1.0, 99};
  opt.rate_scale = 1e6;
  opt.threads = 1;
  const auto a = scan_image(config(), spec, target(), PatternMask::half_plane(0.0, true), BeamProfile{}, g, kChromeDepth, opt);
  opt.threads = 3;
  const auto b = scan_image(config(), spec, target(), PatternMask::half_plane(0.0, true), BeamProfile{}, g, kChromeDepth, opt);
  CHECK(a.values == b.values);
  opt.detector->rng_seed = 100;
  const auto c = scan_image(config(), spec, target(), PatternMask::half_plane(0.0, true), BeamProfile{}, g, kChromeDepth, opt);
  CHECK(a.values != c.values);
}

TEST_CASE("depth selection outside the range") {
  const auto g = strip(2, 1e-6, 0.0);
  CHECK_THROWS_AS(scan_image(config(), SignalSpectrum{}, target(), PatternMask::uniform(true), BeamProfile{}, g, -1e-4),
                  RangeError);
  CHECK_THROWS_AS(scan_image(config(), SignalSpectrum{}, target(), PatternMask::uniform(true), BeamProfile{}, g, 5e-3),
                  RangeError);
}

TEST_CASE("edge fit") {
  std::vector<std::pair<double, double>> line;
  const double sigma = 4e-6;
  for (int k = 0; k < 50; ++k) {
    const double x = -25e-6 + k * 1e-6;
    line.emplace_back(x, 0.2 + 0.7 * oracle::normal_cdf((x - 1.3e-6) / sigma));
  }
  const auto fit = fit_edge_response(line);
  CHECK(fit.offset == doctest::Approx(0.2).epsilon(1e-6));
  CHECK(fit.height == doctest::Approx(0.7).epsilon(1e-6));
  CHECK(fit.center == doctest::Approx(1.3e-6).epsilon(1e-6));
  CHECK(fit.sigma == doctest::Approx(sigma).epsilon(1e-6));
  CHECK(fit.lsf_fwhm == doctest::Approx(2.0 * std::sqrt(2.0 * std::log(2.0)) * sigma).epsilon(1e-6));

  auto falling = line;
  for (auto& p : falling) p.second = 1.0 - p.second;
  CHECK(edge_response_fwhm(falling) == doctest::Approx(fit.lsf_fwhm).epsilon(1e-6));

  std::vector<std::pair<double, double>> flat(20, {0.0, 1.0});
  for (int k = 0; k < 20; ++k) flat[k].first = k;
  CHECK_THROWS_AS(fit_edge_response(flat), FitError);
  CHECK_THROWS_AS(fit_edge_response(std::span(line).first(3)), FitError);
}

TEST_CASE("modulation and contrast transfer") {
  const std::vector<std::pair<double, double>> line{{0, 1.0}, {1, 3.0}, {2, 1.0}};
  CHECK(modulation(line) == doctest::Approx(0.5));
  CHECK(contrast_transfer(line, 4.0, 0.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(contrast_transfer(line, 1.0, 1.0), DomainError);
}
