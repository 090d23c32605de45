#pragma once

#include "qict/detector.hpp"
#include "qict/imaging.hpp"
#include "qict/interferometer.hpp"
#include "qict/sample.hpp"
#include "qict/spectra.hpp"
#include "qict/tomography.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qict::cli {

/// Malformed input: unreadable file, bad JSON, bad override syntax. Exit 2.
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Well-formed input that violates the scenario schema or a physical
/// invariant. Exit 3.
class ValidationError : public std::runtime_error {
public:
  ValidationError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

private:
  std::string field_;
};

enum class Experiment { td_scan, fd_scan, phase_scan, reconstruct, visibility_sweep, resolution_curve, snr_curve, image };

std::string_view to_string(Experiment kind);

struct Scenario {
  std::string name;
  Experiment kind = Experiment::fd_scan;
  std::uint64_t seed = 0;
  std::filesystem::path base_dir; ///< relative input paths resolve here

  InterferometerConfig cfg;
  SignalSpectrum spec;
  LayerStack sample;
  int max_order = 2;

  std::optional<DetectorModel> detector; ///< set when counts are sampled
  double rate_scale = 1.0;

  FdOptions fd;
  Window window = Window::none;
  double min_prominence = 0.05;

  // td-scan
  double delay_start = 0.0, delay_stop = 0.0, delay_step = 0.0;
  // phase-scan
  double displacement_stop = 0.0;
  int points = 0;
  // reconstruct
  std::filesystem::path input, reference;
  // visibility-sweep
  Arm arm = Arm::idler;
  bool double_pass = true;
  std::vector<double> transmissions;
  // resolution-curve
  std::vector<double> delays;
  // snr-curve
  std::vector<double> integration_times;
  int repeats = 20;
  std::optional<double> target_depth;
  // fd-scan
  std::optional<double> thickness_tolerance;
  // image
  BeamProfile beam;
  PatternMask mask;
  std::string mask_type;  ///< half-plane, bars or uniform
  bool mask_along_x = true;
  ScanGrid grid;
  RegionStacks regions;
  double depth_select = 0.0;
  ImagingOptions imaging;
};

nlohmann::json parse_json(const std::string& text, const std::string& origin);
nlohmann::json load_json_file(const std::filesystem::path& file);

/// Applies one dotted-path `key=value` assignment. The value is read as JSON
/// when it parses, otherwise as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

Scenario parse_scenario(const nlohmann::json& doc, const std::filesystem::path& base_dir);

struct RunOptions {
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::filesystem::path out_dir;
};

struct RunResult {
  nlohmann::ordered_json summary;
  std::vector<std::filesystem::path> files;
};

/// Runs the experiment and writes its artifacts plus summary.json to out_dir.
RunResult run_scenario(const Scenario& scenario, const RunOptions& options);

/// Scenarios shipped with the binary, by name.
const std::map<std::string, std::string>& bundled_scenarios();

} // namespace qict::cli
