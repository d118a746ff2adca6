#include "dlp/gates.hpp"

#include <cmath>
#include <map>

namespace dlp {

namespace {

const std::map<std::string, GateKind>& kind_table() {
  static const std::map<std::string, GateKind> t = {
      {"H", GateKind::H},         {"X", GateKind::X},           {"Y", GateKind::Y},
      {"Z", GateKind::Z},         {"S", GateKind::S},           {"T", GateKind::T},
      {"RY", GateKind::RY},       {"RZ", GateKind::RZ},         {"CNOT", GateKind::CNOT},
      {"CPHASE", GateKind::CPHASE}, {"SWAP", GateKind::SWAP},   {"HAM_EVO", GateKind::HAM_EVO},
      {"FROZEN", GateKind::FROZEN}};
  return t;
}

void add_bond(HamiltonianSpec& h, int i, int j, char p, double c) {
  std::string s(h.n, 'I');
  s[i] = p;
  s[j] = p;
  h.terms.push_back({c, s});
}

void add_heisenberg_bond(HamiltonianSpec& h, int i, int j, double c) {
  for (char p : {'X', 'Y', 'Z'}) add_bond(h, i, j, p, c);
}

}  // namespace

std::string kind_name(GateKind k) {
  for (const auto& [name, kind] : kind_table())
    if (kind == k) return name;
  return "?";
}

GateKind parse_kind(const std::string& name) {
  std::string up;
  for (char c : name) up += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (up == "CX") up = "CNOT";
  if (up == "CP") up = "CPHASE";
  auto it = kind_table().find(up);
  if (it == kind_table().end()) throw ValidationError("unknown gate kind '" + name + "'");
  return it->second;
}

bool is_parameterized(GateKind k) {
  return k == GateKind::RY || k == GateKind::RZ || k == GateKind::CPHASE || k == GateKind::HAM_EVO;
}

int arity(GateKind k) {
  switch (k) {
    case GateKind::CNOT:
    case GateKind::CPHASE:
    case GateKind::SWAP:
      return 2;
    case GateKind::HAM_EVO:
    case GateKind::FROZEN:
      return 0;
    default:
      return 1;
  }
}

HamiltonianSpec scaled(const HamiltonianSpec& h, double factor) {
  HamiltonianSpec out = h;
  for (auto& t : out.terms) t.coeff *= factor;
  return out;
}

HamiltonianSpec combine(const HamiltonianSpec& a, double wa, const HamiltonianSpec& b, double wb) {
  if (a.n != b.n) throw ValidationError("combine: Hamiltonians act on different qubit counts");
  HamiltonianSpec out = scaled(a, wa);
  for (const auto& t : b.terms) out.terms.push_back({t.coeff * wb, t.paulis});
  return out;
}

Matrix pauli_matrix(char p) {
  Matrix m = Matrix::Zero(2, 2);
  switch (p) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw ValidationError(std::string("unknown Pauli '") + p + "'");
  }
  return m;
}

Matrix hamiltonian_matrix(const HamiltonianSpec& spec) {
  if (spec.n < 1) throw ValidationError("Hamiltonian needs at least one qubit");
  if (spec.n > 12) throw SizeError("Hamiltonian exceeds 12 qubits");
  const std::size_t dim = std::size_t{1} << spec.n;
  Matrix h = Matrix::Zero(dim, dim);
  for (const auto& term : spec.terms) {
    if (static_cast<int>(term.paulis.size()) != spec.n)
      throw ValidationError("Pauli string '" + term.paulis + "' does not match qubit count");
    if (!std::isfinite(term.coeff)) throw ValidationError("non-finite Pauli coefficient");
    // A Pauli string is a signed permutation: column j maps to row j ^ xmask.
    std::size_t xmask = 0;
    for (int q = 0; q < spec.n; ++q) {
      const char p = term.paulis[q];
      if (p != 'I' && p != 'X' && p != 'Y' && p != 'Z') throw ValidationError("bad Pauli in '" + term.paulis + "'");
      if (p == 'X' || p == 'Y') xmask |= std::size_t{1} << (spec.n - 1 - q);
    }
    for (std::size_t j = 0; j < dim; ++j) {
      cplx amp = term.coeff;
      for (int q = 0; q < spec.n; ++q) {
        const int b = bit_of(j, q, spec.n);
        switch (term.paulis[q]) {
          case 'Y': amp *= b ? cplx(0, -1) : cplx(0, 1); break;
          case 'Z': if (b) amp = -amp; break;
          default: break;
        }
      }
      h(j ^ xmask, j) += amp;
    }
  }
  return h;
}

Matrix base_unitary(GateKind kind, std::optional<double> angle) {
  if (kind == GateKind::HAM_EVO || kind == GateKind::FROZEN)
    throw ValidationError("base_unitary: " + kind_name(kind) + " carries its own matrix");
  if (is_parameterized(kind) != angle.has_value())
    throw ValidationError(kind_name(kind) + (angle ? " takes no angle" : " requires an angle"));
  const double r = 1.0 / std::sqrt(2.0);
  Matrix m;
  switch (kind) {
    case GateKind::H: m = Matrix(2, 2); m << r, r, r, -r; return m;
    case GateKind::X: return pauli_matrix('X');
    case GateKind::Y: return pauli_matrix('Y');
    case GateKind::Z: return pauli_matrix('Z');
    case GateKind::S: m = Matrix::Identity(2, 2); m(1, 1) = cplx(0, 1); return m;
    case GateKind::T: m = Matrix::Identity(2, 2); m(1, 1) = std::exp(cplx(0, M_PI / 4)); return m;
    case GateKind::RY: {
      const double c = std::cos(*angle / 2), s = std::sin(*angle / 2);
      m = Matrix(2, 2);
      m << c, -s, s, c;
      return m;
    }
    case GateKind::RZ:
      m = Matrix::Zero(2, 2);
      m(0, 0) = std::exp(cplx(0, -*angle / 2));
      m(1, 1) = std::exp(cplx(0, *angle / 2));
      return m;
    case GateKind::CNOT:
      m = Matrix::Zero(4, 4);
      m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
      return m;
    case GateKind::CPHASE:
      m = Matrix::Identity(4, 4);
      m(3, 3) = std::exp(cplx(0, *angle));
      return m;
    case GateKind::SWAP:
      m = Matrix::Zero(4, 4);
      m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1;
      return m;
    default:
      break;
  }
  throw ValidationError("base_unitary: unsupported kind");
}

Matrix angle_generator(GateKind kind) {
  switch (kind) {
    case GateKind::RY: return 0.5 * pauli_matrix('Y');
    case GateKind::RZ: return 0.5 * pauli_matrix('Z');
    case GateKind::CPHASE: {
      Matrix g = Matrix::Zero(4, 4);
      g(3, 3) = -1.0;
      return g;
    }
    default:
      throw ValidationError("angle_generator: " + kind_name(kind) + " has no standard angle generator");
  }
}

Matrix embed(const Matrix& u, const std::vector<int>& qubits, int n) {
  Matrix out = identity(std::size_t{1} << n);
  apply_local_left(out, u, qubits, n);
  return out;
}

HamiltonianSpec heisenberg_chain(int n, double j) {
  HamiltonianSpec h{n, {}};
  for (int i = 0; i + 1 < n; ++i) add_heisenberg_bond(h, i, i + 1, j);
  return h;
}

HamiltonianSpec heisenberg_odd(int n, double j) {
  HamiltonianSpec h{n, {}};
  for (int i = 0; i + 1 < n; i += 2) add_heisenberg_bond(h, i, i + 1, j);
  return h;
}

HamiltonianSpec heisenberg_even(int n, double j) {
  HamiltonianSpec h{n, {}};
  for (int i = 1; i + 1 < n; i += 2) add_heisenberg_bond(h, i, i + 1, j);
  return h;
}

HamiltonianSpec tfim_chain(int n, double j, double hx) {
  HamiltonianSpec h{n, {}};
  for (int i = 0; i + 1 < n; ++i) add_bond(h, i, i + 1, 'Z', -j);
  for (int i = 0; i < n; ++i) {
    std::string s(n, 'I');
    s[i] = 'X';
    h.terms.push_back({-hx, s});
  }
  return h;
}

HamiltonianSpec j1j2_chain(int n, double j1, double j2) {
  HamiltonianSpec h{n, {}};
  for (int i = 0; i + 1 < n; ++i) add_heisenberg_bond(h, i, i + 1, j1);
  for (int i = 0; i + 2 < n; ++i) add_heisenberg_bond(h, i, i + 2, j2);
  return h;
}

HamiltonianSpec maxcut(int n, const std::vector<std::pair<int, int>>& edges) {
  // -(1 - Z_i Z_j)/2 per edge: minimizing gives the maximum cut.
  HamiltonianSpec h{n, {}};
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n || b >= n || a == b) throw ValidationError("maxcut: bad edge");
    h.terms.push_back({-0.5, std::string(n, 'I')});
    add_bond(h, a, b, 'Z', 0.5);
  }
  return h;
}

HamiltonianSpec ring_edges_maxcut(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return maxcut(n, edges);
}

HamiltonianSpec x_field(int n, double hx) {
  HamiltonianSpec h{n, {}};
  for (int i = 0; i < n; ++i) {
    std::string s(n, 'I');
    s[i] = 'X';
    h.terms.push_back({hx, s});
  }
  return h;
}

HamiltonianSpec builtin_hamiltonian(const std::string& name, int n, double a, double b) {
  if (name == "heisenberg_chain") return heisenberg_chain(n, a);
  if (name == "heisenberg_odd") return heisenberg_odd(n, a);
  if (name == "heisenberg_even") return heisenberg_even(n, a);
  if (name == "tfim_chain") return tfim_chain(n, a, b);
  if (name == "j1j2_chain") return j1j2_chain(n, a, b);
  if (name == "maxcut") return ring_edges_maxcut(n);
  if (name == "x_field") return x_field(n, a);
  throw ValidationError("unknown builtin Hamiltonian '" + name + "'");
}

Matrix trotter_gate(const HamiltonianSpec& spec, double t) {
  return matexp_hermitian(hamiltonian_matrix(spec), t);
}

Matrix qft_target(int n) {
  if (n < 1 || n > 6) throw ValidationError("qft_target supports 1..6 qubits");
  const std::size_t d = std::size_t{1} << n;
  Matrix m(d, d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = 0; k < d; ++k)
      m(j, k) = norm * std::exp(cplx(0, 2 * M_PI * static_cast<double>((j * k) % d) / static_cast<double>(d)));
  return m;
}

State ghz_target(int n) {
  if (n < 2) throw ValidationError("ghz_target needs n >= 2");
  State psi = State::Zero(std::size_t{1} << n);
  psi(0) = psi(psi.size() - 1) = 1.0 / std::sqrt(2.0);
  return psi;
}

State basis_state(int n, std::size_t index) {
  State psi = State::Zero(std::size_t{1} << n);
  psi(index) = 1.0;
  return psi;
}

}  // namespace dlp
