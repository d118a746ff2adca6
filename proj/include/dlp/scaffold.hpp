#pragma once

#include "dlp/gates.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dlp {

enum class Interpolation { Linear, Geodesic };

struct GateSpec {
  GateKind kind = GateKind::H;
  std::vector<int> qubits;
  double angle = 0.0;
  bool trainable_angle = true;
  double cost = 1.0;
  std::optional<double> logit;
  bool frozen = false;
  std::string label;
  HamiltonianSpec ham;             // HAM_EVO: acts on qubits.size() qubits
  Matrix matrix;                   // FROZEN: local unitary
  std::vector<GateSpec> expansion;  // FROZEN: source gates, qubits relative to the motif
};

// Raw gate G(theta) on the slot's own qubits.
Matrix local_unitary(const GateSpec& g, double angle);
Matrix local_unitary(const GateSpec& g);

double switch_value(double logit);

class Scaffold {
 public:
  Scaffold() = default;
  Scaffold(int n, std::vector<GateSpec> slots, Interpolation mode = Interpolation::Linear);

  int n() const { return n_; }
  std::size_t dim() const { return std::size_t{1} << n_; }
  std::size_t size() const { return slots_.size(); }
  Interpolation mode() const { return mode_; }
  const std::vector<GateSpec>& slots() const { return slots_; }
  const GateSpec& slot(std::size_t i) const { return slots_[i]; }

  Eigen::VectorXd& logits() { return logits_; }
  const Eigen::VectorXd& logits() const { return logits_; }
  // One entry per slot; ignored for non-parameterized slots.
  Eigen::VectorXd& angles() { return angles_; }
  const Eigen::VectorXd& angles() const { return angles_; }

  Eigen::VectorXd switches() const;
  bool has_angle(std::size_t i) const;
  bool angle_trainable(std::size_t i) const;
  bool structure_trainable(std::size_t i) const { return !slots_[i].frozen; }

  Matrix gate(std::size_t i, double theta) const;
  Matrix effective_gate(std::size_t i, double s, double theta) const;
  Matrix d_effective_ds(std::size_t i, double s, double theta) const;
  Matrix d_effective_dtheta(std::size_t i, double s, double theta) const;
  // Hermitian generator used by geodesic mode (angle generator or principal log).
  const Matrix& geodesic_generator(std::size_t i) const { return geo_gen_[i]; }

 private:
  int n_ = 0;
  Interpolation mode_ = Interpolation::Linear;
  std::vector<GateSpec> slots_;
  Eigen::VectorXd logits_;
  Eigen::VectorXd angles_;
  std::vector<Matrix> fixed_;    // non-parameterized raw gates
  std::vector<Matrix> gen_;      // angle generators of parameterized gates
  std::vector<Matrix> geo_gen_;  // generators for geodesic interpolation
};

Matrix effective_gate(const GateSpec& slot, double s, std::optional<double> theta, Interpolation mode);

// Products over the slots given explicit switches and angles; slot 0 acts first.
Matrix forward_unitary(const Scaffold& sc, const Eigen::VectorXd& s, const Eigen::VectorXd& theta);
Matrix forward_unitary(const Scaffold& sc);
State forward_state(const Scaffold& sc, const Eigen::VectorXd& s, const Eigen::VectorXd& theta);
State forward_state(const Scaffold& sc);

struct DiscreteCircuit {
  int n = 0;
  std::vector<GateSpec> gates;
  std::vector<int> provenance;
};

inline constexpr double kUndecidedLow = 0.01;
inline constexpr double kUndecidedHigh = 0.99;

struct Extraction {
  DiscreteCircuit circuit;
  std::vector<int> undecided;
};

Extraction extract_discrete(const Scaffold& sc, double threshold = 0.5);
// Extraction against explicit switch values (e.g. a hard Gumbel architecture).
Extraction extract_discrete(const Scaffold& sc, const Eigen::VectorXd& s, double threshold = 0.5);

Matrix simulate(const DiscreteCircuit& c);
State simulate_state(const DiscreteCircuit& c, const State& input);
State simulate_state(const DiscreteCircuit& c);

// Expands FROZEN gates into their source gates (recursively).
DiscreteCircuit flatten(const DiscreteCircuit& c);
std::size_t circuit_depth(const DiscreteCircuit& c);

GateSpec freeze_motif(const Scaffold& sc, const std::string& label = "motif");
GateSpec freeze_circuit(const DiscreteCircuit& c, const std::string& label = "motif");

struct TiledCircuit {
  DiscreteCircuit circuit;  // description only; n may exceed the simulation limit
  int placements = 0;
  std::size_t gate_count = 0;
  std::size_t depth = 0;
};

TiledCircuit tile_motif(const DiscreteCircuit& motif, int n_total, int stride);

}  // namespace dlp
