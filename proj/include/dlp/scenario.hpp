#pragma once

#include "dlp/hardware.hpp"
#include "dlp/trainer.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dlp {

struct ConfigError : ValidationError {
  using ValidationError::ValidationError;
};

struct TargetSpec {
  std::string type;  // qft | hamiltonian_evolution | circuit
  int n = 0;
  HamiltonianSpec hamiltonian;
  double time = 0.0;
  std::vector<GateSpec> gates;
};

struct AxiomConfig {
  std::optional<TargetSpec> target;
  std::optional<HamiltonianSpec> hamiltonian;
  double w_fid = 0.0, w_energy = 0.0, w_simp = 0.0, w_ent = 0.0, w_rob = 0.0;
  SimplicityMode simp_mode = SimplicityMode::Linear;
  double alpha = 0.1;
  std::vector<int> ent_keep;
  double ent_k = 1.0;
  std::vector<GateSpec> channels;
};

struct InitConfig {
  InitPolicy policy = InitPolicy::BiasedOff;
  double logit = -2.0;
  double angle_noise = 0.0;
};

struct HardwareConfig {
  CouplingMap coupling;
  bool assign_costs = true;
};

struct TilingConfig {
  int n_total = 20;
  int stride = 2;
};

struct RoutingConfig {
  int cycles = 1;
  std::vector<RoutedCircuit> paths;
  DriftParams drift;
  RouterConfig router;
};

struct Variant {
  std::string label;
  nlohmann::json patch;
};

struct Scenario {
  std::string name;
  std::string kind = "train";  // train | routing
  std::uint64_t seed = 0;
  int n = 0;
  Interpolation interpolation = Interpolation::Linear;
  std::vector<GateSpec> slots;
  InitConfig init;
  AxiomConfig axioms;
  TrainConfig train;
  std::optional<HardwareConfig> hardware;
  std::optional<TilingConfig> tiling;
  std::optional<RoutingConfig> routing;
  std::vector<Variant> variants;
  std::vector<std::uint64_t> seeds;
  double extract_threshold = 0.5;
  nlohmann::json source;  // document the scenario was parsed from
};

Scenario parse_scenario(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::string& preset_or_path);
std::filesystem::path preset_dir();
std::vector<std::string> preset_names();

// Variant `label` applied as a JSON merge patch; the name gains a suffix.
Scenario apply_variant(const Scenario& base, const Variant& v);
Scenario with_seed(const Scenario& base, std::uint64_t seed);

nlohmann::json gate_to_json(const GateSpec& g);
GateSpec gate_from_json(const nlohmann::json& j, const std::string& where);
nlohmann::json hamiltonian_to_json(const HamiltonianSpec& h);
HamiltonianSpec hamiltonian_from_json(const nlohmann::json& j, const std::string& where);

// Built objects.
Scaffold build_scaffold(const Scenario& s);
AxiomSet build_axioms(const Scenario& s);
Matrix target_unitary(const TargetSpec& t);
// Hamiltonian the final circuit is judged against (H_hard under annealing).
std::optional<HamiltonianSpec> final_hamiltonian(const Scenario& s);

nlohmann::json scaffold_to_json(const Scaffold& sc);
Scaffold scaffold_from_json(const nlohmann::json& j);

struct RunResult {
  Scenario scenario;
  Scaffold scaffold;
  TrainingTrace trace;
  Extraction extraction;
  Eigen::VectorXd final_s;
  nlohmann::json summary;
  std::optional<PairedTrace> routing;
};

RunResult run_scenario(const Scenario& s);
// Writes the artifact bundle into dir (created if needed).
void write_bundle(const RunResult& r, const std::filesystem::path& dir);
std::filesystem::path output_root();

// Fans variants x seeds across threads; results in deterministic order.
std::vector<RunResult> run_sweep(const Scenario& s, unsigned threads = 0);

}  // namespace dlp
