#include "dlp/qasm.hpp"
#include "dlp/scenario.hpp"
#include "dlp/theory.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace dlp;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
};

Scenario prepare(const std::string& source, const Overrides& ov) {
  Scenario s = load_scenario(source);
  if (ov.epochs) {
    nlohmann::json doc = s.source;
    doc["epochs"] = *ov.epochs;
    s = parse_scenario(doc);
  }
  if (ov.seed) s = with_seed(s, *ov.seed);
  return s;
}

std::filesystem::path run_dir(const Scenario& s) {
  return output_root() / s.name / ("seed_" + std::to_string(s.seed));
}

void print_summary(const RunResult& r, double seconds, const std::filesystem::path& dir) {
  const auto& sm = r.summary;
  std::cout << r.scenario.name << " (seed " << r.scenario.seed << ")  " << seconds << " s\n";
  if (sm.value("kind", "") == "routing") {
    for (const auto& [arm, data] : sm["arms"].items()) {
      const auto& f = data["fidelity"];
      std::cout << "  " << arm << ": final fidelity " << f.back().get<double>() << ", final efficiency "
                << data["efficiency"].back().get<double>() << '\n';
    }
  } else {
    std::cout << "  survivors " << sm["survivors"].dump() << "  undecided " << sm["undecided"].dump() << '\n';
    if (sm.contains("last_epoch_losses")) std::cout << "  losses " << sm["last_epoch_losses"].dump() << '\n';
    std::cout << "  extracted " << sm["extracted"].dump() << '\n';
    if (sm.contains("hardware")) std::cout << "  hardware " << sm["hardware"].dump() << '\n';
    if (sm.contains("tiling")) std::cout << "  tiling " << sm["tiling"].dump() << '\n';
    if (sm.value("aborted", false)) std::cout << "  ABORTED: " << sm.value("error", "") << '\n';
  }
  std::cout << "  -> " << dir.string() << '\n';
}

// A scaffold document, or a run directory holding one.
Scaffold load_scaffold_file(const std::string& path) {
  std::filesystem::path p(path);
  if (std::filesystem::is_directory(p)) p /= "scaffold.json";
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot open " + p.string());
  return scaffold_from_json(nlohmann::json::parse(in));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentiable logical programming for quantum circuit discovery"};
  app.require_subcommand(1);
  Overrides ov;
  std::uint64_t seed_arg = 0;
  int epochs_arg = 0;

  std::string source;
  auto* run = app.add_subcommand("run", "Train one scenario and write its artifact bundle");
  run->add_option("scenario", source, "Preset name or JSON file")->required();
  run->add_option("--seed", seed_arg, "Override the scenario seed");
  run->add_option("--epochs", epochs_arg, "Override the epoch count");
  std::string variant;
  run->add_option("--variant", variant, "Apply a named variant from the scenario");

  auto* sweep = app.add_subcommand("sweep", "Run every variant x seed of a scenario in parallel");
  sweep->add_option("scenario", source, "Preset name or JSON file")->required();
  sweep->add_option("--seed", seed_arg, "Override the scenario seed");
  sweep->add_option("--epochs", epochs_arg, "Override the epoch count");
  unsigned threads = 0;
  sweep->add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");

  auto* vg = app.add_subcommand("verify-gradients", "Analytic gradients against finite differences");
  int scaffolds = 50;
  std::uint64_t suite_seed = 11;
  vg->add_option("--seed", suite_seed, "Random scaffold seed");
  vg->add_option("--scaffolds", scaffolds, "Number of random scaffolds");

  auto* vt = app.add_subcommand("verify-theory", "Relaxation property suite");
  std::uint64_t theory_seed = 7;
  vt->add_option("--seed", theory_seed, "Random seed");

  double threshold = 0.5;
  std::string scaffold_path;
  auto* ex = app.add_subcommand("extract", "Discrete circuit from a trained scaffold");
  ex->add_option("scaffold", scaffold_path, "scaffold.json or run directory")->required();
  ex->add_option("--threshold", threshold, "Switch threshold");

  auto* qa = app.add_subcommand("export-qasm", "OpenQASM 2.0 for the extracted circuit");
  qa->add_option("scaffold", scaffold_path, "scaffold.json or run directory")->required();
  qa->add_option("--threshold", threshold, "Switch threshold");
  std::string out_file;
  qa->add_option("-o,--output", out_file, "Write to file instead of stdout");

  auto* rd = app.add_subcommand("render", "Text diagram of a scenario scaffold or trained scaffold");
  rd->add_option("source", source, "Preset, scenario file, scaffold.json or run directory")->required();
  bool no_switches = false;
  rd->add_flag("--no-switches", no_switches, "Omit switch values");

  app.add_subcommand("presets", "List built-in presets");

  CLI11_PARSE(app, argc, argv);

  try {
    auto* cmd = app.get_subcommands().front();
    if (cmd == run || cmd == sweep) {
      if (cmd->count("--seed")) ov.seed = seed_arg;
      if (cmd->count("--epochs")) ov.epochs = epochs_arg;
    }
    const std::string name = cmd->get_name();

    if (name == "run") {
      Scenario s = prepare(source, ov);
      if (!variant.empty()) {
        auto it = std::find_if(s.variants.begin(), s.variants.end(), [&](const Variant& v) { return v.label == variant; });
        if (it == s.variants.end()) throw ConfigError("scenario has no variant '" + variant + "'");
        s = apply_variant(s, *it);
        if (ov.seed) s = with_seed(s, *ov.seed);
      }
      const auto t0 = std::chrono::steady_clock::now();
      RunResult r = run_scenario(s);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      const auto dir = run_dir(s);
      write_bundle(r, dir);
      print_summary(r, secs, dir);
      return r.trace.aborted ? 2 : 0;
    }
    if (name == "sweep") {
      Scenario s = prepare(source, ov);
      const auto t0 = std::chrono::steady_clock::now();
      const auto results = run_sweep(s, threads);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      for (const auto& r : results) {
        const auto dir = run_dir(r.scenario);
        write_bundle(r, dir);
        print_summary(r, secs, dir);
      }
      return 0;
    }
    if (name == "verify-gradients") {
      const SuiteReport rep = verify_gradients(suite_seed, scaffolds);
      std::cout << format_report(rep);
      return rep.all_pass() ? 0 : 1;
    }
    if (name == "verify-theory") {
      const SuiteReport rep = verify_theory(theory_seed);
      std::cout << format_report(rep);
      return rep.all_pass() ? 0 : 1;
    }
    if (name == "extract" || name == "export-qasm") {
      const Scaffold sc = load_scaffold_file(scaffold_path);
      const Extraction ex_result = extract_discrete(sc, threshold);
      if (name == "extract") {
        std::cout << render_circuit_text(ex_result.circuit);
        std::cout << "slots kept:";
        for (int p : ex_result.circuit.provenance) std::cout << ' ' << p;
        std::cout << "\nundecided:";
        for (int u : ex_result.undecided) std::cout << ' ' << u;
        std::cout << '\n';
        return 0;
      }
      const std::string text = export_qasm(ex_result.circuit);
      if (out_file.empty()) {
        std::cout << text;
      } else {
        std::ofstream os(out_file);
        os << text;
      }
      return 0;
    }
    if (name == "render") {
      const bool is_scaffold_file = std::filesystem::is_directory(source) ||
                                    std::filesystem::path(source).filename() == "scaffold.json";
      const Scaffold sc = is_scaffold_file ? load_scaffold_file(source) : build_scaffold(load_scenario(source));
      std::cout << render_circuit_text(sc, !no_switches);
      return 0;
    }
    if (name == "presets") {
      for (const auto& p : preset_names()) std::cout << p << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
