#include "dlp/scaffold.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dlp {

namespace {

void validate_slot(const GateSpec& g, int n, std::size_t index) {
  const std::string where = "slot " + std::to_string(index) + " (" + kind_name(g.kind) + ")";
  if (g.qubits.empty()) throw ValidationError(where + ": no qubits");
  for (std::size_t a = 0; a < g.qubits.size(); ++a) {
    if (g.qubits[a] < 0 || g.qubits[a] >= n) throw ValidationError(where + ": qubit out of range");
    for (std::size_t b = a + 1; b < g.qubits.size(); ++b)
      if (g.qubits[a] == g.qubits[b]) throw ValidationError(where + ": repeated qubit");
  }
  const int k = static_cast<int>(g.qubits.size());
  if (arity(g.kind) != 0 && arity(g.kind) != k) throw ValidationError(where + ": wrong number of qubits");
  if (g.kind == GateKind::HAM_EVO && g.ham.n != k)
    throw ValidationError(where + ": Hamiltonian size does not match qubit list");
  if (g.kind == GateKind::FROZEN && static_cast<std::size_t>(g.matrix.rows()) != (std::size_t{1} << k))
    throw ValidationError(where + ": frozen matrix size does not match qubit list");
  if (!(g.cost >= 0.0) || !std::isfinite(g.cost)) throw ValidationError(where + ": cost must be finite and >= 0");
}

}  // namespace

Matrix local_unitary(const GateSpec& g, double angle) {
  switch (g.kind) {
    case GateKind::HAM_EVO: return matexp_hermitian(hamiltonian_matrix(g.ham), angle);
    case GateKind::FROZEN: return g.matrix;
    default:
      return is_parameterized(g.kind) ? base_unitary(g.kind, angle) : base_unitary(g.kind);
  }
}

Matrix local_unitary(const GateSpec& g) { return local_unitary(g, g.angle); }

double switch_value(double logit) {
  if (logit >= 0) return 1.0 / (1.0 + std::exp(-logit));
  const double e = std::exp(logit);
  return e / (1.0 + e);
}

Scaffold::Scaffold(int n, std::vector<GateSpec> slots, Interpolation mode)
    : n_(n), mode_(mode), slots_(std::move(slots)) {
  if (n < 1) throw ValidationError("scaffold needs at least one qubit");
  if ((std::size_t{1} << n) > kMaxDim) throw SizeError("scaffold exceeds 12 qubits");
  const std::size_t k = slots_.size();
  logits_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
  angles_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
  fixed_.resize(k);
  gen_.resize(k);
  geo_gen_.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const GateSpec& g = slots_[i];
    validate_slot(g, n, i);
    logits_(i) = g.logit.value_or(0.0);
    angles_(i) = g.angle;
    if (g.kind == GateKind::HAM_EVO) {
      gen_[i] = hamiltonian_matrix(g.ham);
      geo_gen_[i] = gen_[i];
    } else if (is_parameterized(g.kind)) {
      gen_[i] = angle_generator(g.kind);
      geo_gen_[i] = gen_[i];
    } else {
      fixed_[i] = local_unitary(g);
      if (mode_ == Interpolation::Geodesic) geo_gen_[i] = principal_generator(fixed_[i]);
    }
  }
}

Eigen::VectorXd Scaffold::switches() const {
  Eigen::VectorXd s(logits_.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = switch_value(logits_(i));
  return s;
}

bool Scaffold::has_angle(std::size_t i) const { return is_parameterized(slots_[i].kind); }

bool Scaffold::angle_trainable(std::size_t i) const {
  return has_angle(i) && slots_[i].trainable_angle && !slots_[i].frozen;
}

Matrix Scaffold::gate(std::size_t i, double theta) const {
  if (!has_angle(i)) return fixed_[i];
  return local_unitary(slots_[i], theta);
}

Matrix Scaffold::effective_gate(std::size_t i, double s, double theta) const {
  if (slots_[i].frozen) return gate(i, theta);
  if (mode_ == Interpolation::Linear) {
    Matrix g = s * gate(i, theta);
    g.diagonal().array() += (1.0 - s);
    return g;
  }
  const double scale = has_angle(i) ? s * theta : s;
  return matexp_hermitian(geo_gen_[i], scale);
}

Matrix Scaffold::d_effective_ds(std::size_t i, double s, double theta) const {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << slots_[i].qubits.size());
  if (slots_[i].frozen) return Matrix::Zero(dim, dim);
  if (mode_ == Interpolation::Linear) {
    Matrix g = gate(i, theta);
    g.diagonal().array() -= 1.0;
    return g;
  }
  const double rate = has_angle(i) ? theta : 1.0;
  return cplx(0, -rate) * geo_gen_[i] * effective_gate(i, s, theta);
}

Matrix Scaffold::d_effective_dtheta(std::size_t i, double s, double theta) const {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << slots_[i].qubits.size());
  if (!angle_trainable(i)) return Matrix::Zero(dim, dim);
  if (mode_ == Interpolation::Linear) return cplx(0, -s) * gen_[i] * gate(i, theta);
  return cplx(0, -s) * gen_[i] * effective_gate(i, s, theta);
}

Matrix effective_gate(const GateSpec& slot, double s, std::optional<double> theta, Interpolation mode) {
  if (s < 0.0 || s > 1.0) throw ValidationError("effective_gate: switch outside [0,1]");
  if (is_parameterized(slot.kind) && !theta) throw ValidationError("effective_gate: missing angle");
  GateSpec copy = slot;
  copy.angle = theta.value_or(0.0);
  const int k = static_cast<int>(slot.qubits.size());
  std::vector<int> local(k);
  for (int j = 0; j < k; ++j) local[j] = j;
  copy.qubits = local;
  Scaffold single(k, {copy}, mode);
  return single.effective_gate(0, s, copy.angle);
}

Matrix forward_unitary(const Scaffold& sc, const Eigen::VectorXd& s, const Eigen::VectorXd& theta) {
  Matrix u = identity(sc.dim());
  for (std::size_t i = 0; i < sc.size(); ++i)
    apply_local_left(u, sc.effective_gate(i, s(i), theta(i)), sc.slot(i).qubits, sc.n());
  return u;
}

Matrix forward_unitary(const Scaffold& sc) { return forward_unitary(sc, sc.switches(), sc.angles()); }

State forward_state(const Scaffold& sc, const Eigen::VectorXd& s, const Eigen::VectorXd& theta) {
  State psi = basis_state(sc.n());
  for (std::size_t i = 0; i < sc.size(); ++i)
    apply_local(psi, sc.effective_gate(i, s(i), theta(i)), sc.slot(i).qubits, sc.n());
  return psi;
}

State forward_state(const Scaffold& sc) { return forward_state(sc, sc.switches(), sc.angles()); }

Extraction extract_discrete(const Scaffold& sc, double threshold) {
  return extract_discrete(sc, sc.switches(), threshold);
}

Extraction extract_discrete(const Scaffold& sc, const Eigen::VectorXd& s, double threshold) {
  Extraction out;
  out.circuit.n = sc.n();
  for (std::size_t i = 0; i < sc.size(); ++i) {
    const bool keep = sc.slot(i).frozen || s(i) >= threshold;
    if (!sc.slot(i).frozen && s(i) >= kUndecidedLow && s(i) <= kUndecidedHigh)
      out.undecided.push_back(static_cast<int>(i));
    if (!keep) continue;
    GateSpec g = sc.slot(i);
    g.angle = sc.angles()(i);
    g.logit.reset();
    out.circuit.gates.push_back(g);
    out.circuit.provenance.push_back(static_cast<int>(i));
  }
  return out;
}

Matrix simulate(const DiscreteCircuit& c) {
  Matrix u = identity(std::size_t{1} << c.n);
  for (const auto& g : c.gates) apply_local_left(u, local_unitary(g), g.qubits, c.n);
  return u;
}

State simulate_state(const DiscreteCircuit& c, const State& input) {
  State psi = input;
  for (const auto& g : c.gates) apply_local(psi, local_unitary(g), g.qubits, c.n);
  return psi;
}

State simulate_state(const DiscreteCircuit& c) {
  if (c.n > 12) throw SizeError("simulation refused above 12 qubits");
  return simulate_state(c, basis_state(c.n));
}

DiscreteCircuit flatten(const DiscreteCircuit& c) {
  DiscreteCircuit out;
  out.n = c.n;
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    const GateSpec& g = c.gates[i];
    const int prov = i < c.provenance.size() ? c.provenance[i] : static_cast<int>(i);
    if (g.kind != GateKind::FROZEN || g.expansion.empty()) {
      out.gates.push_back(g);
      out.provenance.push_back(prov);
      continue;
    }
    DiscreteCircuit inner{static_cast<int>(g.qubits.size()), g.expansion, {}};
    for (GateSpec sub : flatten(inner).gates) {
      for (int& q : sub.qubits) q = g.qubits[q];
      out.gates.push_back(sub);
      out.provenance.push_back(prov);
    }
  }
  return out;
}

std::size_t circuit_depth(const DiscreteCircuit& c) {
  std::vector<std::size_t> level(static_cast<std::size_t>(c.n), 0);
  std::size_t depth = 0;
  for (const auto& g : c.gates) {
    std::size_t l = 0;
    for (int q : g.qubits) l = std::max(l, level[q]);
    for (int q : g.qubits) level[q] = l + 1;
    depth = std::max(depth, l + 1);
  }
  return depth;
}

GateSpec freeze_circuit(const DiscreteCircuit& c, const std::string& label) {
  GateSpec g;
  g.kind = GateKind::FROZEN;
  g.label = label;
  g.frozen = true;
  for (int q = 0; q < c.n; ++q) g.qubits.push_back(q);
  g.matrix = simulate(c);
  g.expansion = c.gates;
  g.cost = 0.0;
  for (const auto& sub : c.gates) g.cost += sub.cost;
  return g;
}

GateSpec freeze_motif(const Scaffold& sc, const std::string& label) {
  Extraction ex = extract_discrete(sc);
  if (!ex.undecided.empty()) {
    std::ostringstream os;
    os << "freeze_motif: undecided switches at slots";
    for (int i : ex.undecided) os << ' ' << i;
    throw ValidationError(os.str());
  }
  return freeze_circuit(ex.circuit, label);
}

TiledCircuit tile_motif(const DiscreteCircuit& motif, int n_total, int stride) {
  if (stride < 1) throw ValidationError("tile_motif: stride must be positive");
  if (n_total < motif.n) throw ValidationError("tile_motif: target smaller than motif");
  const DiscreteCircuit flat = flatten(motif);
  TiledCircuit out;
  out.circuit.n = n_total;
  for (int offset = 0; offset + motif.n <= n_total; offset += stride) {
    for (std::size_t i = 0; i < flat.gates.size(); ++i) {
      GateSpec g = flat.gates[i];
      for (int& q : g.qubits) q += offset;
      out.circuit.gates.push_back(g);
      out.circuit.provenance.push_back(flat.provenance[i]);
    }
    ++out.placements;
  }
  out.gate_count = out.circuit.gates.size();
  out.depth = circuit_depth(out.circuit);
  return out;
}

}  // namespace dlp
