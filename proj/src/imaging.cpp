#include "qict/imaging.hpp"

#include "qict/error.hpp"
#include "qict/parallel.hpp"
#include "qict/tomography.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace qict {
namespace {

constexpr double kFwhmPerSigma = 2.3548200450309493;
constexpr double kInf = std::numeric_limits<double>::infinity();

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi); }

// Standard deviations of the coupling weight. I^2 halves the variance.
std::pair<double, double> coupling_sigmas(const BeamProfile& beam, Coupling coupling) {
  const double shrink = coupling == Coupling::mode_overlap ? std::sqrt(2.0) : 1.0;
  return {beam.fwhm_x / kFwhmPerSigma / shrink, beam.fwhm_y / kFwhmPerSigma / shrink};
}

// Gaussian mass of [lo, hi] for a unit normal centred at c.
double interval_mass(double lo, double hi, double c, double sigma) {
  const double a = (lo - c) / sigma;
  const double b = (hi - c) / sigma;
  // Difference of erfc on the far side keeps precision in the tails.
  if (a >= 0.0) return normal_cdf(-a) - normal_cdf(-b);
  return normal_cdf(b) - normal_cdf(a);
}

std::vector<ReflectionPath> weighted_paths(std::span<const ReflectionPath> covered,
                                           std::span<const ReflectionPath> uncovered, double fraction) {
  std::vector<ReflectionPath> out;
  for (const auto& p : covered) {
    if (fraction != 0.0) out.push_back({p.optical_roundtrip, p.amplitude * fraction, p.order});
  }
  for (const auto& p : uncovered) {
    if (fraction != 1.0) out.push_back({p.optical_roundtrip, p.amplitude * (1.0 - fraction), p.order});
  }
  return out;
}

double sample_profile(const DepthProfile& profile, double depth) {
  const double step = profile.step();
  const double pos = depth / step;
  const auto k = static_cast<std::size_t>(std::floor(pos));
  if (k + 1 >= profile.magnitude.size()) return profile.magnitude.back();
  const double t = pos - static_cast<double>(k);
  return (1.0 - t) * profile.magnitude[k] + t * profile.magnitude[k + 1];
}

} // namespace

void validate(const BeamProfile& beam) {
  if (!(beam.fwhm_x > 0.0) || !(beam.fwhm_y > 0.0)) throw DomainError("beam fwhm must be > 0");
  if (!std::isfinite(beam.fwhm_x) || !std::isfinite(beam.fwhm_y)) throw DomainError("beam fwhm must be finite");
}

PatternMask::PatternMask(std::vector<MaskRect> rects, std::string description)
    : rects_(std::move(rects)), description_(std::move(description)) {}

PatternMask PatternMask::uniform(bool covered) {
  PatternMask m({}, covered ? "uniform covered" : "uniform uncovered");
  m.invert_ = covered;
  return m;
}

PatternMask PatternMask::half_plane(double edge, bool along_x) {
  const MaskRect r = along_x ? MaskRect{edge, kInf, -kInf, kInf} : MaskRect{-kInf, kInf, edge, kInf};
  return PatternMask({r}, along_x ? "vertical edge" : "horizontal edge");
}

PatternMask PatternMask::bars(int count, double bar_width, double bar_length, bool negative) {
  std::vector<MaskRect> rects;
  for (int i = 0; i < count; ++i) {
    const double c = (static_cast<double>(i) - 0.5 * static_cast<double>(count - 1)) * 2.0 * bar_width;
    rects.push_back({c - 0.5 * bar_width, c + 0.5 * bar_width, -0.5 * bar_length, 0.5 * bar_length});
  }
  PatternMask m(std::move(rects), std::to_string(count) + "-bar pattern");
  m.invert_ = negative;
  return m;
}

PatternMask PatternMask::translated(double dx, double dy) const {
  PatternMask m = *this;
  m.origin_x_ += dx;
  m.origin_y_ += dy;
  return m;
}

double PatternMask::operator()(double x, double y) const {
  const double lx = x - origin_x_;
  const double ly = y - origin_y_;
  double value = 0.0;
  for (const auto& r : rects_) {
    if (lx > r.x_min && lx < r.x_max && ly > r.y_min && ly < r.y_max) {
      value = 1.0;
      break;
    }
    if (lx >= r.x_min && lx <= r.x_max && ly >= r.y_min && ly <= r.y_max) value = 0.5;
  }
  return invert_ ? 1.0 - value : value;
}

double PatternMask::gaussian_coverage(double x, double y, double sigma_x, double sigma_y) const {
  const double lx = x - origin_x_;
  const double ly = y - origin_y_;
  double covered = 0.0;
  for (const auto& r : rects_) {
    covered += interval_mass(r.x_min, r.x_max, lx, sigma_x) * interval_mass(r.y_min, r.y_max, ly, sigma_y);
  }
  covered = std::clamp(covered, 0.0, 1.0);
  return invert_ ? 1.0 - covered : covered;
}

double overlap_fraction(const BeamProfile& beam, const PatternMask& mask, double center_x, double center_y,
                        Coupling coupling) {
  validate(beam);
  const auto [sx, sy] = coupling_sigmas(beam, coupling);
  return mask.gaussian_coverage(center_x, center_y, sx, sy);
}

std::vector<std::pair<double, double>> ScanImage::row(std::size_t y) const {
  std::vector<std::pair<double, double>> out;
  for (std::size_t x = 0; x < nx; ++x) out.emplace_back(origin_x + static_cast<double>(x) * step, at(x, y));
  return out;
}

std::vector<std::pair<double, double>> ScanImage::column(std::size_t x) const {
  std::vector<std::pair<double, double>> out;
  for (std::size_t y = 0; y < ny; ++y) out.emplace_back(origin_y + static_cast<double>(y) * step, at(x, y));
  return out;
}

ScanImage scan_image(const InterferometerConfig& cfg, const SignalSpectrum& spec, const RegionStacks& stacks,
                     const PatternMask& mask, const BeamProfile& beam, const ScanGrid& grid, double depth_select,
                     const ImagingOptions& options) {
  validate(beam);
  validate(spec);
  if (!(grid.step > 0.0)) throw DomainError("scan grid step must be > 0");
  if (!(depth_select >= 0.0 && depth_select <= nyquist_depth(spec))) {
    throw RangeError("depth_select lies outside the reconstructable depth range");
  }
  const auto covered = enumerate_paths(stacks.covered, options.max_order);
  const auto uncovered = enumerate_paths(stacks.uncovered, options.max_order);
  const auto [sigma_x, sigma_y] = coupling_sigmas(beam, options.coupling);
  const auto reference = blocked_idler_reference(cfg, spec);
  const double mismatch = delay_mismatch_length(cfg);

  // Mean spectral envelope: the DFT scale of a unit-amplitude fringe.
  const auto axis = spec.axis();
  double envelope_mean = 0.0;
  for (double dl : axis) envelope_mean += spec.envelope(dl);
  envelope_mean /= static_cast<double>(axis.size());

  // Pixel centres in mask coordinates, so shifting the mask and the scan
  // origin together leaves every sample point unchanged.
  const double rel_x = grid.origin_x - mask.origin_x();
  const double rel_y = grid.origin_y - mask.origin_y();
  const PatternMask local = mask.translated(-mask.origin_x(), -mask.origin_y());

  ScanImage image{grid.nx, grid.ny, grid.step, grid.origin_x, grid.origin_y, {}};
  image.values.assign(grid.nx * grid.ny, 0.0);
  parallel_for(image.values.size(), options.threads, [&](std::size_t index) {
    const std::size_t ix = index % grid.nx;
    const std::size_t iy = index / grid.nx;
    const double cx = rel_x + static_cast<double>(ix) * grid.step;
    const double cy = rel_y + static_cast<double>(iy) * grid.step;
    const double fraction = local.gaussian_coverage(cx, cy, sigma_x, sigma_y);
    const auto paths = weighted_paths(covered, uncovered, fraction);

    if (!options.full_pipeline) {
      const double alpha = std::log(16.0) / std::pow(axial_resolution_theory(spec), 2.0);
      double sum = 0.0;
      for (const auto& p : paths) {
        const double depth = std::abs(p.optical_roundtrip + mismatch);
        const double u = depth - depth_select;
        sum += p.amplitude * rolloff_factor(depth, spec) * std::exp(-alpha * u * u);
      }
      image.values[index] = std::abs(sum) * interference_amplitude(cfg) * envelope_mean;
      return;
    }

    if (paths.empty()) return;
    auto fringe = synthesize_fd_fringe(cfg, paths, spec, options.fd);
    FringeRecord ref = reference;
    if (options.detector) {
      DetectorModel det = *options.detector;
      det.rng_seed = derive_seed(det.rng_seed, index);
      fringe = to_counts(fringe, det, options.rate_scale, true);
      ref = to_counts(reference, det, options.rate_scale, false);
    }
    const auto profile = fd_reconstruct(fringe, spec, Window::none, &ref);
    image.values[index] = sample_profile(profile, depth_select);
  });
  return image;
}

EdgeFit fit_edge_response(std::span<const std::pair<double, double>> line) {
  if (line.size() < 5) throw FitError("edge fit needs at least 5 samples");
  std::vector<std::pair<double, double>> pts(line.begin(), line.end());
  std::sort(pts.begin(), pts.end());
  const auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(),
                                            [](const auto& a, const auto& b) { return a.second < b.second; });
  const double span = hi->second - lo->second;
  const double level = std::max(std::abs(hi->second), std::abs(lo->second));
  if (!(span > 1e-9 * level) || span == 0.0) throw FitError("no edge transition in the profile");

  // Start: plateau levels from the ends, centre and width from the 16/50/84 % crossings.
  const double start = pts.front().second;
  const double height = pts.back().second - start;
  if (std::abs(height) < 0.25 * span) throw FitError("profile is not a monotone edge");
  auto crossing = [&](double fraction) {
    const double target = start + fraction * height;
    for (std::size_t k = 1; k < pts.size(); ++k) {
      const double a = pts[k - 1].second - target;
      const double b = pts[k].second - target;
      if (a == 0.0) return pts[k - 1].first;
      if ((a < 0.0) != (b < 0.0)) return pts[k - 1].first + a / (a - b) * (pts[k].first - pts[k - 1].first);
    }
    return pts[pts.size() / 2].first;
  };
  const double range = pts.back().first - pts.front().first;
  Eigen::Vector4d theta(start, height, crossing(0.5), std::max(0.5 * std::abs(crossing(0.84) - crossing(0.16)), 1e-3 * range));

  auto residuals = [&](const Eigen::Vector4d& t, Eigen::MatrixX4d* jac) {
    Eigen::VectorXd r(pts.size());
    if (jac) jac->resize(static_cast<Eigen::Index>(pts.size()), 4);
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const double z = (pts[k].first - t(2)) / t(3);
      const auto i = static_cast<Eigen::Index>(k);
      r(i) = t(0) + t(1) * normal_cdf(z) - pts[k].second;
      if (jac) {
        const double pdf = normal_pdf(z);
        (*jac)(i, 0) = 1.0;
        (*jac)(i, 1) = normal_cdf(z);
        (*jac)(i, 2) = -t(1) * pdf / t(3);
        (*jac)(i, 3) = -t(1) * pdf * z / t(3);
      }
    }
    return r;
  };

  double lambda = 1e-3;
  Eigen::MatrixX4d jac;
  Eigen::VectorXd r = residuals(theta, &jac);
  double cost = r.squaredNorm();
  for (int iter = 0; iter < 500; ++iter) {
    const Eigen::Matrix4d jtj = jac.transpose() * jac;
    const Eigen::Vector4d grad = jac.transpose() * r;
    Eigen::Matrix4d damped = jtj;
    damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-300);
    const Eigen::Vector4d delta = damped.ldlt().solve(-grad);
    Eigen::Vector4d trial = theta + delta;
    if (trial(3) <= 0.0) trial(3) = 0.5 * theta(3);
    const Eigen::VectorXd trial_r = residuals(trial, nullptr);
    const double trial_cost = trial_r.squaredNorm();
    if (std::isfinite(trial_cost) && trial_cost <= cost) {
      const double improvement = cost - trial_cost;
      theta = trial;
      r = residuals(theta, &jac);
      cost = trial_cost;
      lambda = std::max(lambda * 0.3, 1e-12);
      if (improvement <= 1e-15 * std::max(cost, 1e-300) || delta.norm() <= 1e-14 * theta.norm()) break;
    } else {
      lambda *= 10.0;
      if (lambda > 1e12) break;
    }
  }
  if (!theta.allFinite() || !(theta(3) > 0.0)) throw FitError("edge fit did not converge");
  return {theta(0), theta(1), theta(2), theta(3), kFwhmPerSigma * theta(3)};
}

double edge_response_fwhm(std::span<const std::pair<double, double>> line) { return fit_edge_response(line).lsf_fwhm; }

double modulation(std::span<const std::pair<double, double>> line) {
  if (line.empty()) throw DomainError("modulation: empty profile");
  double lo = line.front().second;
  double hi = lo;
  for (const auto& [x, v] : line) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi + lo == 0.0) return 0.0;
  return (hi - lo) / (hi + lo);
}

double contrast_transfer(std::span<const std::pair<double, double>> line, double level_covered,
                         double level_uncovered) {
  if (line.empty()) throw DomainError("contrast_transfer: empty profile");
  const double full = std::abs(level_covered - level_uncovered);
  if (full == 0.0) throw DomainError("contrast_transfer: regions are indistinguishable");
  const auto [lo, hi] = std::minmax_element(line.begin(), line.end(),
                                            [](const auto& a, const auto& b) { return a.second < b.second; });
  return (hi->second - lo->second) / full;
}

} // namespace qict
