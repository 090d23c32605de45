#include "scenario.hpp"

#include "qict/error.hpp"
#include "qict/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace qict::cli {
namespace {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

class Artifacts {
public:
  explicit Artifacts(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  template <class Fn>
  void write(const std::string& name, Fn&& fn, bool binary = false) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    fn(out);
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + path.string());
    files.push_back(path);
  }

  std::vector<fs::path> files;

private:
  fs::path dir_;
};

ojson peaks_json(const std::vector<Peak>& peaks) {
  ojson out = ojson::array();
  for (const auto& p : peaks) out.push_back({{"position_m", p.position}, {"fwhm_m", p.fwhm}, {"amplitude", p.amplitude}});
  return out;
}

ojson thickness_json(const std::vector<ThicknessEstimate>& est, const LayerStack& stack) {
  ojson out = ojson::array();
  for (const auto& e : est) {
    const double configured = stack.layers[e.layer].thickness;
    out.push_back({{"layer", e.layer},
                   {"group_index", stack.layers[e.layer].group_index},
                   {"optical_spacing_m", e.optical_spacing},
                   {"thickness_m", e.thickness},
                   {"configured_thickness_m", configured},
                   {"relative_error", configured > 0.0 ? (e.thickness - configured) / configured : 0.0}});
  }
  return out;
}

double safe_visibility(const InterferometerConfig& cfg) {
  try {
    return fringe_visibility(cfg);
  } catch (const UndefinedVisibilityError&) {
    return std::nan("");
  }
}

void write_series(std::ostream& os, const std::string& header, const std::vector<std::vector<double>>& cols) {
  os << header << '\n';
  for (std::size_t k = 0; k < cols.front().size(); ++k) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) os << ',';
      os << io::format_number(cols[c][k]);
    }
    os << '\n';
  }
}

FringeRecord read_fringe(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read fringe file " + file.string());
  return io::read_fringe_csv(in);
}

} // namespace

RunResult run_scenario(const Scenario& sc, const RunOptions& options) {
  const std::uint64_t seed = options.seed.value_or(sc.seed);
  std::optional<DetectorModel> detector = sc.detector;
  if (detector) detector->rng_seed = seed;
  const double mismatch = delay_mismatch_length(sc.cfg);

  Artifacts out(options.out_dir);
  ojson summary;
  summary["scenario"] = sc.name;
  summary["experiment"] = std::string(to_string(sc.kind));
  summary["seed"] = seed;
  summary["visibility"] = safe_visibility(sc.cfg);
  summary["axial_resolution_theory_m"] = axial_resolution_theory(sc.spec);
  summary["nyquist_depth_m"] = nyquist_depth(sc.spec);

  auto fd_pipeline = [&](FringeRecord fringe, FringeRecord reference) {
    if (detector) {
      fringe = to_counts(fringe, *detector, sc.rate_scale, true);
      reference = to_counts(reference, *detector, sc.rate_scale, false);
    }
    out.write("fringe.csv", [&](std::ostream& os) { io::write_fringe_csv(os, fringe); });
    out.write("reference.csv", [&](std::ostream& os) { io::write_fringe_csv(os, reference); });
    const auto profile = fd_reconstruct(fringe, sc.spec, sc.window, &reference);
    const auto peaks = detect_peaks(profile, sc.min_prominence);
    out.write("depth_profile.csv", [&](std::ostream& os) { io::write_depth_profile_csv(os, profile); });
    out.write("peaks.csv", [&](std::ostream& os) { io::write_peaks_csv(os, peaks); });
    summary["depth_bin_m"] = profile.step();
    summary["peaks"] = peaks_json(peaks);
    return peaks;
  };

  switch (sc.kind) {
  case Experiment::fd_scan: {
    const auto paths = enumerate_paths(sc.sample, sc.max_order);
    summary["path_count"] = paths.size();
    const auto peaks = fd_pipeline(synthesize_fd_fringe(sc.cfg, paths, sc.spec, sc.fd), blocked_idler_reference(sc.cfg, sc.spec));
    if (!sc.sample.layers.empty()) {
      const double tol = sc.thickness_tolerance.value_or(0.5 * axial_resolution_theory(sc.spec));
      summary["thicknesses"] = thickness_json(recover_thicknesses(sc.sample, mismatch, peaks, tol), sc.sample);
    }
    break;
  }
  case Experiment::reconstruct: {
    const auto resolve = [&](const fs::path& p) { return p.is_absolute() ? p : sc.base_dir / p; };
    FringeRecord fringe = read_fringe(resolve(sc.input));
    std::optional<FringeRecord> reference;
    if (!sc.reference.empty()) reference = read_fringe(resolve(sc.reference));
    const auto profile = fd_reconstruct(fringe, sc.spec, sc.window, reference ? &*reference : nullptr);
    const auto peaks = detect_peaks(profile, sc.min_prominence);
    out.write("depth_profile.csv", [&](std::ostream& os) { io::write_depth_profile_csv(os, profile); });
    out.write("peaks.csv", [&](std::ostream& os) { io::write_peaks_csv(os, peaks); });
    summary["depth_bin_m"] = profile.step();
    summary["peaks"] = peaks_json(peaks);
    break;
  }
  case Experiment::td_scan: {
    std::vector<double> grid;
    const auto n = static_cast<std::size_t>(std::floor((sc.delay_stop - sc.delay_start) / sc.delay_step + 1e-9)) + 1;
    for (std::size_t k = 0; k < n; ++k) grid.push_back(sc.delay_start + static_cast<double>(k) * sc.delay_step);
    const auto paths = enumerate_paths(sc.sample, sc.max_order);
    auto record = td_scan(sc.cfg, paths, sc.spec, grid);
    double baseline = mean_signal_rate(sc.cfg);
    if (detector) {
      record = to_counts(record, *detector, sc.rate_scale, true);
      baseline = expected_counts(baseline, *detector, sc.rate_scale);
    }
    out.write("fringe.csv", [&](std::ostream& os) { io::write_fringe_csv(os, record); });
    const auto envelope = td_burst_envelope(record, baseline);
    const auto peaks = detect_peaks(envelope, sc.min_prominence);
    out.write("burst_envelope.csv", [&](std::ostream& os) { write_series(os, "delay_m,envelope", {envelope.depth, envelope.magnitude}); });
    out.write("peaks.csv", [&](std::ostream& os) { io::write_peaks_csv(os, peaks); });
    summary["bursts"] = peaks_json(peaks);
    break;
  }
  case Experiment::phase_scan: {
    std::vector<double> grid;
    for (int k = 0; k < sc.points; ++k) grid.push_back(sc.displacement_stop * k / (sc.points - 1));
    auto record = fine_phase_scan(sc.cfg, grid);
    summary["contrast"] = fringe_contrast(record);
    summary["period_m"] = sc.cfg.lambda_i0 / 2.0;
    if (detector) record = to_counts(record, *detector, sc.rate_scale, true);
    out.write("fringe.csv", [&](std::ostream& os) { io::write_fringe_csv(os, record); });
    break;
  }
  case Experiment::visibility_sweep: {
    const auto pts = sweep_arm_loss(sc.cfg, sc.arm, sc.transmissions, sc.double_pass);
    std::vector<double> t, g;
    for (const auto& p : pts) {
      t.push_back(p.transmission);
      g.push_back(p.gamma);
    }
    out.write("visibility.csv", [&](std::ostream& os) { write_series(os, "transmission,gamma", {t, g}); });
    summary["arm"] = sc.arm == Arm::idler ? "idler" : "signal";
    summary["double_pass"] = sc.double_pass;
    if (t.size() >= 2) {
      const auto fit = fit_line(t, g);
      summary["fit"] = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r_squared", fit.r_squared}};
    }
    auto unit = sc.cfg;
    unit.eta_i = 1.0;
    unit.eta_s = 1.0;
    summary["gamma_at_unit_transmission"] = safe_visibility(unit);
    break;
  }
  case Experiment::resolution_curve: {
    const auto pts = resolution_vs_delay(sc.cfg, sc.spec, sc.delays);
    std::vector<double> d, f, a, p;
    for (const auto& r : pts) {
      d.push_back(r.delay);
      f.push_back(r.fwhm);
      a.push_back(r.amplitude);
      p.push_back(r.position);
    }
    out.write("resolution.csv", [&](std::ostream& os) { write_series(os, "delay_m,fwhm_m,amplitude,position_m", {d, f, a, p}); });
    ojson points = ojson::array();
    for (const auto& r : pts) points.push_back({{"delay_m", r.delay}, {"fwhm_m", r.fwhm}, {"position_m", r.position}});
    summary["resolution"] = points;
    break;
  }
  case Experiment::snr_curve: {
    SnrScene scene;
    scene.cfg = sc.cfg;
    scene.paths = enumerate_paths(sc.sample, sc.max_order);
    scene.spec = sc.spec;
    scene.rate_scale = sc.rate_scale;
    scene.target_depth = sc.target_depth.value_or(std::abs(scene.paths.front().optical_roundtrip + mismatch));
    scene.threads = options.threads;
    const auto pts = snr_estimate(scene, *detector, sc.integration_times, sc.repeats);
    std::vector<double> t, s, lt, ls;
    for (const auto& p : pts) {
      t.push_back(p.integration_time);
      s.push_back(p.snr);
      lt.push_back(std::log10(p.integration_time));
      ls.push_back(std::log10(p.snr));
    }
    out.write("snr.csv", [&](std::ostream& os) { write_series(os, "integration_time_s,snr", {t, s}); });
    summary["target_depth_m"] = scene.target_depth;
    summary["repeats"] = sc.repeats;
    if (pts.size() >= 2) {
      const auto fit = fit_line(lt, ls);
      summary["loglog_slope"] = fit.slope;
      summary["loglog_r_squared"] = fit.r_squared;
    }
    break;
  }
  case Experiment::image: {
    ImagingOptions opt = sc.imaging;
    opt.threads = options.threads;
    opt.detector = detector;
    const auto img = scan_image(sc.cfg, sc.spec, sc.regions, sc.mask, sc.beam, sc.grid, sc.depth_select, opt);
    out.write("image.csv", [&](std::ostream& os) { write_image_csv(os, img); });
    out.write("image.pgm", [&](std::ostream& os) { write_image_pgm(os, img); }, true);
    summary["beam_fwhm_x_m"] = sc.beam.fwhm_x;
    summary["beam_fwhm_y_m"] = sc.beam.fwhm_y;
    summary["coupling"] = opt.coupling == Coupling::mode_overlap ? "mode-overlap" : "linear";
    const auto line = sc.mask_along_x ? img.row(img.ny / 2) : img.column(img.nx / 2);
    if (sc.mask_type == "half-plane" && line.size() >= 5) {
      try {
        const auto fit = fit_edge_response(line);
        summary["edge"] = {{"lsf_fwhm_m", fit.lsf_fwhm}, {"center_m", fit.center}, {"height", fit.height}};
      } catch (const FitError& e) {
        summary["edge"] = {{"error", e.what()}};
      }
    } else if (sc.mask_type == "bars") {
      ScanGrid one = sc.grid;
      one.nx = one.ny = 1;
      ImagingOptions clean = opt;
      clean.detector.reset();
      const double covered = scan_image(sc.cfg, sc.spec, sc.regions, PatternMask::uniform(true), sc.beam, one, sc.depth_select, clean).values[0];
      const double bare = scan_image(sc.cfg, sc.spec, sc.regions, PatternMask::uniform(false), sc.beam, one, sc.depth_select, clean).values[0];
      summary["bars"] = {{"modulation", modulation(line)}, {"contrast_transfer", contrast_transfer(line, covered, bare)}};
    }
    break;
  }
  }

  out.write("summary.json", [&](std::ostream& os) { os << summary.dump(2) << '\n'; });
  return {std::move(summary), std::move(out.files)};
}

} // namespace qict::cli
