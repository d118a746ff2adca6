#pragma once

#include "dlp/optimizer.hpp"
#include "dlp/scaffold.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace dlp {

using Edge = std::pair<int, int>;  // stored with first < second
Edge make_edge(int a, int b);

enum class PenaltyPolicy { Fixed, SwapRoundtrip };

struct CouplingMap {
  int n = 0;
  std::vector<Edge> edges;
  double native_cost = 1.0;
  double single_qubit_cost = 1.0;
  PenaltyPolicy policy = PenaltyPolicy::Fixed;
  double penalty = 100.0;    // Fixed policy
  double swap_cost = 50.0;   // SwapRoundtrip: per SWAP, two per extra hop

  bool adjacent(int a, int b) const;
  int distance(int a, int b) const;  // -1 when disconnected
  std::vector<int> shortest_path(int a, int b) const;
  void validate() const;
};

CouplingMap linear_map(int n);

double gate_cost(const GateSpec& g, const CouplingMap& map);
bool is_native(const GateSpec& g, const CouplingMap& map);

// Replaces every non-adjacent two-qubit gate by a SWAP chain towards the
// target, the gate, and the reverse chain; SWAP is expanded to three CNOTs.
DiscreteCircuit compile_native(const DiscreteCircuit& c, const CouplingMap& map);

// Random engine that counts its draws, for stream-position checks.
class CountingRng {
 public:
  using result_type = std::mt19937_64::result_type;
  explicit CountingRng(std::uint64_t seed) : eng_(seed) {}
  CountingRng(std::initializer_list<std::uint64_t> seeds);
  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() {
    ++draws_;
    return eng_();
  }
  std::uint64_t draws() const { return draws_; }

 private:
  std::mt19937_64 eng_;
  std::uint64_t draws_ = 0;
};

struct FailureEvent {
  int cycle = 0;
  Edge edge{0, 1};
  std::optional<double> cost;
  std::optional<double> error_rate;
};

struct DriftParams {
  std::map<Edge, double> base_error;
  std::map<Edge, double> base_cost;
  double walk_sigma = 0.0;
  double amplitude = 0.0;
  double period = 10.0;
  double cost_per_error = 0.0;  // cost(t) = base_cost + cost_per_error * error(t)
  std::vector<FailureEvent> failures;
};

struct NoiseProfile {
  int cycles = 0;
  std::map<Edge, std::vector<double>> error;
  std::map<Edge, std::vector<double>> cost;

  double error_at(Edge e, int cycle) const;
  double cost_at(Edge e, int cycle) const;
};

NoiseProfile drift_profile(std::uint64_t seed, int cycles, const DriftParams& params);

using Counts = std::map<std::string, int>;

// Two-qubit gates map to device edges via `edges` (one entry per two-qubit
// gate, in order).  After each such gate, with probability e(edge), one of the
// 15 non-identity two-qubit Paulis is applied uniformly at random.
struct RoutedCircuit {
  std::string name;
  DiscreteCircuit circuit;
  std::vector<Edge> edges;
};

Counts backend_sample(const RoutedCircuit& rc, int shots, const NoiseProfile& profile, int cycle, CountingRng& rng);
double ghz_fidelity_estimate(const Counts& counts);

double path_cost(const RoutedCircuit& rc, const NoiseProfile& profile, int cycle);

struct RouterConfig {
  int iterations = 5;
  int shots = 512;
  double lr = 0.5;
  double cost_weight = 0.5;
  double weight_decay = 0.0;
  int warmup_iterations = 5;
  double cost_reference = 100.0;  // efficiency = max(0, F - cost / cost_reference)
};

struct RouterState {
  std::vector<RoutedCircuit> paths;
  Eigen::VectorXd logits;
  AdamW optimizer;
  std::vector<double> history;

  RouterState() = default;
  RouterState(std::vector<RoutedCircuit> p, const RouterConfig& cfg);
  Eigen::VectorXd probabilities() const;
  std::size_t best() const;
};

// One router gradient step from per-path losses: grad_j = p_j (l_j - sum_k p_k l_k).
Eigen::VectorXd router_gradient(const Eigen::VectorXd& probs, const Eigen::VectorXd& losses);

struct CycleResult {
  double fidelity = 0.0;
  std::size_t path = 0;
};

CycleResult adaptive_cycle(RouterState& router, const NoiseProfile& profile, int cycle, const RouterConfig& cfg,
                           CountingRng& train_rng, CountingRng& eval_rng);

struct RoutingRow {
  int cycle = 0;
  std::string arm;
  double fidelity = 0.0;
  double efficiency = 0.0;
  std::size_t path = 0;
  std::vector<double> probs;
  std::vector<double> costs;
  std::uint64_t eval_stream_draws = 0;
};

struct PairedTrace {
  std::vector<RoutingRow> rows;
  std::vector<std::string> path_names;
};

PairedTrace run_static_vs_adaptive(const std::vector<RoutedCircuit>& paths, const NoiseProfile& profile,
                                   const RouterConfig& cfg, std::uint64_t seed);

void write_routing_csv(std::ostream& os, const PairedTrace& trace);

}  // namespace dlp
