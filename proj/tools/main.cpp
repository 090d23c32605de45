#include "scenario.hpp"

#include "qict/error.hpp"
#include "qict/kernels/kernels.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace qict::cli;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitValidation = 3;
constexpr int kExitRuntime = 4;

// A path that exists is a scenario file; anything else names a bundled scenario.
Scenario load(const std::string& ref, const std::vector<std::string>& overrides) {
  nlohmann::json doc;
  fs::path base = fs::current_path();
  if (fs::exists(ref)) {
    doc = load_json_file(ref);
    base = fs::absolute(ref).parent_path();
  } else {
    const auto& bundled = bundled_scenarios();
    const auto it = bundled.find(ref);
    if (it == bundled.end()) throw ParseError("no scenario file or bundled scenario named '" + ref + "'");
    doc = parse_json(it->second, "bundled:" + ref);
  }
  for (const auto& o : overrides) apply_override(doc, o);
  return parse_scenario(doc, base);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Induced-coherence tomography simulator"};
  app.require_subcommand(1);

  std::string scenario;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::string out_dir;

  auto* run = app.add_subcommand("run", "Run a scenario and write its artifacts");
  run->add_option("scenario", scenario, "Scenario file or bundled scenario name")->required();
  run->add_option("--seed", seed, "Override the detector noise seed");
  run->add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");
  run->add_option("--out-dir", out_dir, "Output directory (default out/<name>)");
  run->add_option("--override,-o", overrides, "Set a scenario field, e.g. detector.integration_time=2");

  auto* check = app.add_subcommand("validate", "Parse and validate a scenario without running it");
  check->add_option("scenario", scenario, "Scenario file or bundled scenario name")->required();
  check->add_option("--override,-o", overrides, "Set a scenario field");

  auto* list = app.add_subcommand("list-scenarios", "List bundled scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  try {
    if (list->parsed()) {
      for (const auto& [name, text] : bundled_scenarios()) std::cout << name << '\n';
      return 0;
    }
    const Scenario sc = load(scenario, overrides);
    if (check->parsed()) {
      std::cout << "ok: " << sc.name << " (" << to_string(sc.kind) << ")\n";
      return 0;
    }
    RunOptions opt;
    opt.seed = seed;
    opt.threads = threads;
    opt.out_dir = out_dir.empty() ? fs::path("out") / sc.name : fs::path(out_dir);
    const auto result = run_scenario(sc, opt);
    std::cerr << "isa: " << qict::kernels::name(qict::kernels::active().isa) << '\n';
    for (const auto& f : result.files) std::cout << f.string() << '\n';
    return 0;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const ValidationError& e) {
    std::cerr << "invalid scenario: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << '\n';
    return kExitRuntime;
  }
}
