#include "scenario.hpp"

#include "qict/error.hpp"
#include "qict/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace qict::cli {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// Typed access to one JSON object with the dotted path kept for messages.
// finish() rejects keys nobody asked for, which catches typos and unit
// suffixes smuggled into key names.
class Section {
public:
  Section(const json* obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (obj_ && !obj_->is_object()) throw ValidationError(path_, "expected an object");
  }

  bool present() const { return obj_ != nullptr; }
  bool has(const std::string& key) const { return obj_ && obj_->contains(key); }
  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* raw(const std::string& key) {
    if (!has(key)) return nullptr;
    seen_.insert(key);
    return &(*obj_)[key];
  }

  Section child(const std::string& key) {
    const json* j = raw(key);
    return Section(j, at(key));
  }

  double number(const std::string& key, double fallback) {
    const json* j = raw(key);
    return j ? as_number(*j, at(key)) : fallback;
  }

  double number(const std::string& key) {
    const json* j = raw(key);
    if (!j) throw ValidationError(at(key), "required");
    return as_number(*j, at(key));
  }

  std::optional<double> optional_number(const std::string& key) {
    const json* j = raw(key);
    if (!j || j->is_null()) return std::nullopt;
    return as_number(*j, at(key));
  }

  int integer(const std::string& key, int fallback) {
    const json* j = raw(key);
    if (!j) return fallback;
    if (!j->is_number_integer()) throw ValidationError(at(key), "expected an integer");
    return j->get<int>();
  }

  bool boolean(const std::string& key, bool fallback) {
    const json* j = raw(key);
    if (!j) return fallback;
    if (!j->is_boolean()) throw ValidationError(at(key), "expected true or false");
    return j->get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    const json* j = raw(key);
    if (!j) return fallback;
    if (!j->is_string()) throw ValidationError(at(key), "expected a string");
    return j->get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json* j = raw(key);
    if (!j) throw ValidationError(at(key), "required");
    if (!j->is_array() || j->empty()) throw ValidationError(at(key), "expected a non-empty array of numbers");
    std::vector<double> out;
    for (std::size_t k = 0; k < j->size(); ++k) out.push_back(as_number((*j)[k], at(key) + "[" + std::to_string(k) + "]"));
    return out;
  }

  Complex complex(const std::string& key, Complex fallback) {
    const json* j = raw(key);
    if (!j) return fallback;
    if (j->is_number()) return {as_number(*j, at(key)), 0.0};
    if (j->is_array() && j->size() == 2) {
      return {as_number((*j)[0], at(key) + "[0]"), as_number((*j)[1], at(key) + "[1]")};
    }
    throw ValidationError(at(key), "expected a number or [re, im]");
  }

  void finish() const {
    if (!obj_) return;
    for (const auto& [key, value] : obj_->items()) {
      if (!seen_.count(key)) throw ValidationError(at(key), "unknown key");
    }
  }

  const std::string& path() const { return path_; }

  static double as_number(const json& j, const std::string& where) {
    if (!j.is_number()) {
      if (j.is_string()) throw ValidationError(where, "expected a number in SI units, got a string");
      throw ValidationError(where, "expected a number");
    }
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ValidationError(where, "must be finite");
    return v;
  }

private:
  const json* obj_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class Fn>
void guard(const std::string& where, Fn&& fn) {
  try {
    fn();
  } catch (const qict::Error& e) {
    throw ValidationError(where, e.what());
  }
}

Experiment experiment_from_string(const std::string& s, const std::string& where) {
  static const std::map<std::string, Experiment> kinds{
      {"td-scan", Experiment::td_scan},
      {"fd-scan", Experiment::fd_scan},
      {"phase-scan", Experiment::phase_scan},
      {"reconstruct", Experiment::reconstruct},
      {"visibility-sweep", Experiment::visibility_sweep},
      {"resolution-curve", Experiment::resolution_curve},
      {"snr-curve", Experiment::snr_curve},
      {"image", Experiment::image},
  };
  const auto it = kinds.find(s);
  if (it == kinds.end()) throw ValidationError(where, "unknown experiment kind '" + s + "'");
  return it->second;
}

PairSourceParams parse_source(Section s) {
  if (!s.present()) throw ValidationError(s.path(), "required");
  PairSourceParams src;
  const bool by_efficiency = s.has("mu_s_to_i") || s.has("mu_i_to_s");
  const bool by_amplitude = s.has("p") || s.has("q") || s.has("r");
  if (by_efficiency && by_amplitude) throw ValidationError(s.path(), "give either efficiencies or p/q/r, not both");
  if (by_efficiency) {
    const double a = s.number("mu_s_to_i");
    const double b = s.number("mu_i_to_s");
    guard(s.path(), [&] { src = from_efficiencies(a, b); });
  } else {
    src.p = s.complex("p", 1.0);
    src.q = s.complex("q", 0.0);
    src.r = s.complex("r", 0.0);
    guard(s.path(), [&] { validate(src); });
  }
  src.c_gain = s.complex("c_gain", Complex{std::nan(""), 0.0});
  s.finish();
  return src;
}

LayerStack parse_stack(Section s, int* max_order) {
  LayerStack stack;
  if (!s.present()) {
    stack.interface_reflectivity = {1.0};
    return stack;
  }
  stack.ambient_index = s.number("ambient_index", 1.0);
  stack.substrate_index = s.number("substrate_index", 1.0);
  stack.reference_plane_offset = s.number("reference_plane_offset", 0.0);
  if (const json* layers = s.raw("layers")) {
    if (!layers->is_array()) throw ValidationError(s.at("layers"), "expected an array");
    for (std::size_t k = 0; k < layers->size(); ++k) {
      Section l(&(*layers)[k], s.at("layers") + "[" + std::to_string(k) + "]");
      Layer layer;
      layer.thickness = l.number("thickness");
      layer.group_index = l.number("group_index");
      layer.phase_index = l.optional_number("phase_index");
      l.finish();
      stack.layers.push_back(layer);
    }
  }
  if (const json* refl = s.raw("interface_reflectivity")) {
    if (!refl->is_array()) throw ValidationError(s.at("interface_reflectivity"), "expected an array of numbers or nulls");
    for (std::size_t k = 0; k < refl->size(); ++k) {
      const auto& v = (*refl)[k];
      if (v.is_null()) {
        stack.interface_reflectivity.emplace_back();
      } else {
        stack.interface_reflectivity.emplace_back(
            Section::as_number(v, s.at("interface_reflectivity") + "[" + std::to_string(k) + "]"));
      }
    }
  }
  if (max_order) *max_order = s.integer("max_order", *max_order);
  s.finish();
  guard(s.path(), [&] { validate(stack); });
  return stack;
}

PatternMask parse_mask(Section s) {
  if (!s.present()) throw ValidationError(s.path(), "required");
  const std::string type = s.string("type", "");
  PatternMask mask;
  if (type == "half-plane") {
    const std::string orientation = s.string("orientation", "x");
    if (orientation != "x" && orientation != "y") throw ValidationError(s.at("orientation"), "expected x or y");
    mask = PatternMask::half_plane(s.number("edge", 0.0), orientation == "x");
  } else if (type == "bars") {
    const int count = s.integer("count", 3);
    const double width = s.number("bar_width");
    const double length = s.number("bar_length");
    if (count < 1 || !(width > 0.0) || !(length > 0.0)) throw ValidationError(s.path(), "bars need count >= 1 and positive sizes");
    mask = PatternMask::bars(count, width, length, s.boolean("negative", true));
  } else if (type == "uniform") {
    mask = PatternMask::uniform(s.boolean("covered", true));
  } else {
    throw ValidationError(s.at("type"), "expected half-plane, bars or uniform");
  }
  mask = mask.translated(s.number("origin_x", 0.0), s.number("origin_y", 0.0));
  s.finish();
  return mask;
}

} // namespace

std::string_view to_string(Experiment kind) {
  switch (kind) {
  case Experiment::td_scan: return "td-scan";
  case Experiment::fd_scan: return "fd-scan";
  case Experiment::phase_scan: return "phase-scan";
  case Experiment::reconstruct: return "reconstruct";
  case Experiment::visibility_sweep: return "visibility-sweep";
  case Experiment::resolution_curve: return "resolution-curve";
  case Experiment::snr_curve: return "snr-curve";
  case Experiment::image: return "image";
  }
  return "?";
}

nlohmann::json parse_json(const std::string& text, const std::string& origin) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }
}

nlohmann::json load_json_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ParseError("cannot read scenario file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), file.string());
}

void apply_override(nlohmann::json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ParseError("override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ParseError("override key '" + key + "' has an empty segment");
    if (node->is_array()) {
      std::size_t index = 0;
      try {
        index = std::stoul(part);
      } catch (const std::exception&) {
        throw ParseError("override key '" + key + "': '" + part + "' is not an array index");
      }
      if (index >= node->size()) throw ParseError("override key '" + key + "': index out of range");
      node = &(*node)[index];
    } else {
      if (!node->is_object() && !node->is_null()) throw ParseError("override key '" + key + "' descends into a scalar");
      node = &(*node)[part];
    }
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = value;
}

Scenario parse_scenario(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
  Section root(&doc, "");
  Scenario sc;
  sc.base_dir = base_dir;
  sc.name = root.string("name", "scenario");
  if (const json* seed = root.raw("seed")) {
    if (!seed->is_number_unsigned() && !(seed->is_number_integer() && seed->get<std::int64_t>() >= 0)) {
      throw ValidationError("seed", "expected a non-negative integer");
    }
    sc.seed = seed->get<std::uint64_t>();
  }

  // Sources.
  {
    Section s = root.child("sources");
    auto src1 = parse_source(s.child("src1"));
    auto src2 = parse_source(s.child("src2"));
    const std::string gains = s.string("gains", "balanced");
    if (gains == "balanced") {
      std::pair<Complex, Complex> g;
      guard(s.at("gains"), [&] { g = balanced_gains(src1, src2); });
      if (std::isnan(src1.c_gain.real())) src1.c_gain = g.first;
      if (std::isnan(src2.c_gain.real())) src2.c_gain = g.second;
    } else if (gains == "equal") {
      if (std::isnan(src1.c_gain.real())) src1.c_gain = 1.0 / std::sqrt(2.0);
      if (std::isnan(src2.c_gain.real())) src2.c_gain = 1.0 / std::sqrt(2.0);
    } else {
      throw ValidationError(s.at("gains"), "expected balanced or equal");
    }
    s.finish();
    sc.cfg.src1 = src1;
    sc.cfg.src2 = src2;
  }

  // Interferometer.
  {
    Section s = root.child("interferometer");
    auto& c = sc.cfg;
    c.eta_s = s.number("eta_s", 1.0);
    c.eta_i = s.number("eta_i", 1.0);
    c.phi = s.number("phi", 0.0);
    c.phi0 = s.number("phi0", 0.0);
    c.lambda_s0 = s.number("lambda_s0", 810e-9);
    c.lambda_pump = s.number("lambda_pump", 532e-9);
    if (!(c.lambda_s0 > c.lambda_pump && c.lambda_pump > 0.0)) {
      throw ValidationError(s.at("lambda_pump"), "must be positive and shorter than lambda_s0");
    }
    c.lambda_i0 = s.number("lambda_i0", idler_wavelength(c.lambda_pump, c.lambda_s0));
    const bool by_length = s.has("delay_mismatch");
    const bool by_time = s.has("tau0") || s.has("tau1") || s.has("tau2");
    if (by_length && by_time) throw ValidationError(s.at("delay_mismatch"), "give delay_mismatch or tau0/tau1/tau2, not both");
    if (by_length) {
      set_delay_mismatch(c, s.number("delay_mismatch"));
    } else {
      c.tau0 = s.number("tau0", 0.0);
      c.tau1 = s.number("tau1", 0.0);
      c.tau2 = s.number("tau2", 0.0);
    }
    c.merge_idlers = s.boolean("merge_idlers", true);
    s.finish();
    guard(s.present() ? "interferometer" : "sources", [&] { validate(c); });
  }

  // Spectrum.
  {
    Section s = root.child("spectrum");
    sc.spec.center_wavelength = s.number("center_wavelength", sc.cfg.lambda_s0);
    if (s.has("fwhm") && s.has("axial_resolution")) throw ValidationError(s.at("fwhm"), "give fwhm or axial_resolution, not both");
    if (s.has("axial_resolution")) {
      const double res = s.number("axial_resolution");
      if (!(res > 0.0)) throw ValidationError(s.at("axial_resolution"), "must be > 0");
      sc.spec.fwhm = spectrum_fwhm_for_resolution(res, sc.spec.center_wavelength);
    } else {
      sc.spec.fwhm = s.number("fwhm", sc.spec.fwhm);
    }
    sc.spec.grid_step = s.number("grid_step", sc.spec.grid_step);
    sc.spec.grid_span = s.number("grid_span", sc.spec.grid_span);
    s.finish();
    guard("spectrum", [&] { validate(sc.spec); });
  }

  sc.sample = parse_stack(root.child("sample"), &sc.max_order);
  if (sc.max_order < 0) throw ValidationError("sample.max_order", "must be >= 0");

  // Detector.
  {
    Section s = root.child("detector");
    if (s.present()) {
      DetectorModel det;
      det.efficiency = s.number("efficiency", 1.0);
      det.dark_rate = s.number("dark_rate", 0.0);
      det.integration_time = s.number("integration_time", 1.0);
      sc.rate_scale = s.number("rate_scale", 1.0);
      if (!(sc.rate_scale > 0.0)) throw ValidationError(s.at("rate_scale"), "must be > 0");
      guard("detector", [&] { validate(det); });
      if (s.boolean("noise", true)) sc.detector = det;
      s.finish();
    }
  }

  // Analysis.
  {
    Section s = root.child("analysis");
    sc.fd.include_cross_terms = s.boolean("cross_terms", false);
    sc.fd.cross_term_weight = s.number("cross_term_weight", 1.0);
    sc.fd.exact_phase = s.boolean("exact_phase", false);
    sc.fd.apply_rolloff = s.boolean("rolloff", true);
    const std::string window = s.string("window", "none");
    if (window == "none") {
      sc.window = Window::none;
    } else if (window == "hann") {
      sc.window = Window::hann;
    } else {
      throw ValidationError(s.at("window"), "expected none or hann");
    }
    sc.min_prominence = s.number("min_prominence", 0.05);
    if (!(sc.min_prominence >= 0.0 && sc.min_prominence < 1.0)) throw ValidationError(s.at("min_prominence"), "must lie in [0, 1)");
    sc.thickness_tolerance = s.optional_number("thickness_tolerance");
    s.finish();
  }

  // Experiment.
  {
    Section s = root.child("experiment");
    if (!s.present()) throw ValidationError("experiment", "required");
    sc.kind = experiment_from_string(s.string("kind", ""), s.at("kind"));
    switch (sc.kind) {
    case Experiment::td_scan:
      sc.delay_start = s.number("delay_start");
      sc.delay_stop = s.number("delay_stop");
      sc.delay_step = s.number("delay_step");
      if (!(sc.delay_step > 0.0) || !(sc.delay_stop > sc.delay_start)) {
        throw ValidationError(s.at("delay_step"), "need delay_step > 0 and delay_stop > delay_start");
      }
      if ((sc.delay_stop - sc.delay_start) / sc.delay_step > 5e7) throw ValidationError(s.at("delay_step"), "too many scan points");
      break;
    case Experiment::fd_scan: break;
    case Experiment::phase_scan:
      sc.displacement_stop = s.number("displacement_stop", 2.0 * sc.cfg.lambda_i0);
      sc.points = s.integer("points", 401);
      if (!(sc.displacement_stop > 0.0) || sc.points < 2) throw ValidationError(s.at("points"), "need points >= 2 and displacement_stop > 0");
      break;
    case Experiment::reconstruct:
      sc.input = s.string("input", "");
      if (sc.input.empty()) throw ValidationError(s.at("input"), "required");
      sc.reference = s.string("reference", "");
      break;
    case Experiment::visibility_sweep: {
      const std::string arm = s.string("arm", "idler");
      if (arm == "idler") {
        sc.arm = Arm::idler;
      } else if (arm == "signal") {
        sc.arm = Arm::signal;
      } else {
        throw ValidationError(s.at("arm"), "expected idler or signal");
      }
      sc.double_pass = s.boolean("double_pass", sc.arm == Arm::idler);
      sc.transmissions = s.numbers("transmissions");
      for (double t : sc.transmissions) {
        if (!(t >= 0.0 && t <= 1.0)) throw ValidationError(s.at("transmissions"), "values must lie in [0, 1]");
      }
      break;
    }
    case Experiment::resolution_curve:
      sc.delays = s.numbers("delays");
      break;
    case Experiment::snr_curve:
      sc.integration_times = s.numbers("integration_times");
      for (double t : sc.integration_times) {
        if (!(t > 0.0)) throw ValidationError(s.at("integration_times"), "values must be > 0");
      }
      sc.repeats = s.integer("repeats", 20);
      if (sc.repeats < 10) throw ValidationError(s.at("repeats"), "must be >= 10");
      sc.target_depth = s.optional_number("target_depth");
      if (!sc.detector) throw ValidationError("detector", "snr-curve needs a detector section with noise enabled");
      break;
    case Experiment::image: {
      Section beam = s.child("beam");
      sc.beam.fwhm_x = beam.number("fwhm_x", sc.beam.fwhm_x);
      sc.beam.fwhm_y = beam.number("fwhm_y", sc.beam.fwhm_y);
      beam.finish();
      guard(s.at("beam"), [&] { validate(sc.beam); });
      if (const json* m = s.raw("mask"); m && m->is_object()) {
        if (m->contains("type") && (*m)["type"].is_string()) sc.mask_type = (*m)["type"].get<std::string>();
        sc.mask_along_x = !(m->contains("orientation") && (*m)["orientation"] == "y");
      }
      sc.mask = parse_mask(Section(s.raw("mask"), s.at("mask")));
      Section grid = s.child("grid");
      const int nx = grid.integer("nx", 64);
      const int ny = grid.integer("ny", 64);
      if (nx < 1 || ny < 1 || static_cast<long long>(nx) * ny > 4'000'000) throw ValidationError(grid.path(), "nx, ny must be >= 1 and nx*ny <= 4e6");
      sc.grid.nx = static_cast<std::size_t>(nx);
      sc.grid.ny = static_cast<std::size_t>(ny);
      sc.grid.step = grid.number("step", sc.grid.step);
      if (!(sc.grid.step > 0.0)) throw ValidationError(grid.at("step"), "must be > 0");
      sc.grid.origin_x = grid.number("origin_x", 0.0);
      sc.grid.origin_y = grid.number("origin_y", 0.0);
      grid.finish();
      sc.depth_select = s.number("depth_select");
      sc.regions.covered = parse_stack(s.child("covered"), nullptr);
      sc.regions.uncovered = parse_stack(s.child("uncovered"), nullptr);
      if (!s.has("covered") || !s.has("uncovered")) throw ValidationError(s.path(), "covered and uncovered stacks are required");
      const std::string coupling = s.string("coupling", "mode-overlap");
      if (coupling == "mode-overlap") {
        sc.imaging.coupling = Coupling::mode_overlap;
      } else if (coupling == "linear") {
        sc.imaging.coupling = Coupling::linear;
      } else {
        throw ValidationError(s.at("coupling"), "expected mode-overlap or linear");
      }
      sc.imaging.full_pipeline = s.boolean("full_pipeline", true);
      break;
    }
    }
    s.finish();
  }
  root.finish();

  sc.imaging.max_order = sc.max_order;
  sc.imaging.fd = sc.fd;
  sc.imaging.detector = sc.detector;
  sc.imaging.rate_scale = sc.rate_scale;
  return sc;
}

} // namespace qict::cli
