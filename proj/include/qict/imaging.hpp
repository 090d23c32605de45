#pragma once

#include "qict/detector.hpp"
#include "qict/sample.hpp"
#include "qict/spectra.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qict {

/// Half-maximum diameters of the focused idler intensity spot.
struct BeamProfile {
  double fwhm_x = 17e-6;
  double fwhm_y = 20e-6;
};

void validate(const BeamProfile& beam);

/// Axis-aligned rectangle of a pattern; infinite bounds give half-planes and strips.
struct MaskRect {
  double x_min, x_max, y_min, y_max;
};

/// Coverage map of a patterned target: 1 where the covering region (e.g. the
/// chrome coating) is present, 0 where it is absent, 1/2 exactly on an edge.
/// Coordinates are relative to `origin_x/origin_y`. Rectangles must not overlap.
class PatternMask {
public:
  PatternMask() = default;
  PatternMask(std::vector<MaskRect> rects, std::string description);

  static PatternMask uniform(bool covered);
  /// Covered for x >= edge_x (vertical edge) when along_x, else y >= edge_y.
  static PatternMask half_plane(double edge, bool along_x);
  /// `count` vertical bars of width `bar_width` at pitch 2 * bar_width,
  /// centred on the origin, each `bar_length` tall. Bars are uncovered
  /// (negative pattern) when `negative` is set.
  static PatternMask bars(int count, double bar_width, double bar_length, bool negative);

  PatternMask translated(double dx, double dy) const;

  double operator()(double x, double y) const;

  /// Integral of the mask against a normalized separable Gaussian of
  /// standard deviations (sigma_x, sigma_y) centred at (x, y).
  double gaussian_coverage(double x, double y, double sigma_x, double sigma_y) const;

  const std::string& description() const { return description_; }
  double origin_x() const { return origin_x_; }
  double origin_y() const { return origin_y_; }

private:
  std::vector<MaskRect> rects_;
  bool invert_ = false;
  double origin_x_ = 0.0;
  double origin_y_ = 0.0;
  std::string description_;
};

/// How the return into the collecting mode weights the illuminated area.
enum class Coupling {
  /// Weight by the intensity profile I: amplitude proportional to f.
  linear,
  /// Weight by I_illumination * I_collection = I^2, the mode-overlap f^2 law;
  /// the effective spot is narrower by sqrt(2).
  mode_overlap,
};

/// Weighted fraction of the beam on covered area with the beam centred on
/// (center_x, center_y). Coupling::linear gives the plain intensity overlap
/// f = int I m / int I. Closed form: sums of erf products over the rectangles.
double overlap_fraction(const BeamProfile& beam, const PatternMask& mask, double center_x, double center_y,
                        Coupling coupling = Coupling::linear);

struct RegionStacks {
  LayerStack covered;
  LayerStack uncovered;
};

struct ScanGrid {
  std::size_t nx = 64;
  std::size_t ny = 64;
  double step = 2e-6;
  double origin_x = 0.0; ///< centre of pixel (0, 0)
  double origin_y = 0.0;
};

struct ScanImage {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double step = 0.0;
  double origin_x = 0.0;
  double origin_y = 0.0;
  std::vector<double> values; ///< row-major, index y * nx + x

  double at(std::size_t x, std::size_t y) const { return values[y * nx + x]; }
  std::vector<std::pair<double, double>> row(std::size_t y) const;
  std::vector<std::pair<double, double>> column(std::size_t x) const;
};

struct ImagingOptions {
  Coupling coupling = Coupling::mode_overlap;
  /// Run synthesis + FD reconstruction per pixel; otherwise read the
  /// amplitude analytically.
  bool full_pipeline = true;
  int max_order = 2;
  FdOptions fd;
  std::optional<DetectorModel> detector; ///< Poisson noise per pixel when set
  double rate_scale = 1.0;
  unsigned threads = 0;
};

/// Raster scan: each pixel's reflection paths are the covered-region paths
/// weighted by the coupled fraction plus the uncovered-region paths weighted
/// by its complement; the image value is the reconstructed magnitude at
/// depth_select.
ScanImage scan_image(const InterferometerConfig& cfg, const SignalSpectrum& spec, const RegionStacks& stacks,
                     const PatternMask& mask, const BeamProfile& beam, const ScanGrid& grid, double depth_select,
                     const ImagingOptions& options = {});

struct EdgeFit {
  double offset = 0.0;
  double height = 0.0;
  double center = 0.0;
  double sigma = 0.0;
  double lsf_fwhm = 0.0;
};

/// Least-squares fit of offset + height * Phi((x - center) / sigma) to an edge
/// profile; the line spread function is its derivative, a Gaussian of FWHM
/// 2 sqrt(2 ln 2) sigma. Throws FitError when no transition is present.
EdgeFit fit_edge_response(std::span<const std::pair<double, double>> line);

double edge_response_fwhm(std::span<const std::pair<double, double>> line);

/// Michelson contrast (max - min) / (max + min) of a line profile.
double modulation(std::span<const std::pair<double, double>> line);

/// Bar contrast relative to the contrast between the two regions,
/// (max - min) / |level_covered - level_uncovered|, i.e. the square-wave
/// contrast transfer of a bar target.
double contrast_transfer(std::span<const std::pair<double, double>> line, double level_covered,
                         double level_uncovered);

/// Row-major value matrix, one image row per line.
void write_image_csv(std::ostream& os, const ScanImage& image);
/// Binary 8-bit PGM (P5), scaled so the image maximum maps to 255.
void write_image_pgm(std::ostream& os, const ScanImage& image);

} // namespace qict
