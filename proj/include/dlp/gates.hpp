#pragma once

#include "dlp/linalg.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dlp {

enum class GateKind { H, X, Y, Z, S, T, RY, RZ, CNOT, CPHASE, SWAP, HAM_EVO, FROZEN };

std::string kind_name(GateKind k);
GateKind parse_kind(const std::string& name);
bool is_parameterized(GateKind k);
// Number of qubits for fixed-arity kinds; 0 for HAM_EVO/FROZEN.
int arity(GateKind k);

struct PauliTerm {
  double coeff = 0.0;
  std::string paulis;  // one of I/X/Y/Z per qubit, qubit 0 first
};

struct HamiltonianSpec {
  int n = 0;
  std::vector<PauliTerm> terms;
};

// Unit-coefficient sum plus scaling; `a*x + b*y` on term lists.
HamiltonianSpec scaled(const HamiltonianSpec& h, double factor);
HamiltonianSpec combine(const HamiltonianSpec& a, double wa, const HamiltonianSpec& b, double wb);

Matrix pauli_matrix(char p);
Matrix hamiltonian_matrix(const HamiltonianSpec& spec);

Matrix base_unitary(GateKind kind, std::optional<double> angle = std::nullopt);
// Generator g with G(theta) = exp(-i theta g) for RY, RZ, CPHASE.
Matrix angle_generator(GateKind kind);

Matrix embed(const Matrix& u, const std::vector<int>& qubits, int n);

HamiltonianSpec heisenberg_chain(int n, double j = 1.0);
HamiltonianSpec heisenberg_odd(int n, double j = 1.0);
HamiltonianSpec heisenberg_even(int n, double j = 1.0);
HamiltonianSpec tfim_chain(int n, double j = 1.0, double h = 1.0);
HamiltonianSpec j1j2_chain(int n, double j1 = 1.0, double j2 = 0.5);
HamiltonianSpec maxcut(int n, const std::vector<std::pair<int, int>>& edges);
HamiltonianSpec ring_edges_maxcut(int n);
HamiltonianSpec x_field(int n, double h = 1.0);
HamiltonianSpec builtin_hamiltonian(const std::string& name, int n, double a, double b);

Matrix trotter_gate(const HamiltonianSpec& spec, double t);
Matrix qft_target(int n);
State ghz_target(int n);
State basis_state(int n, std::size_t index = 0);

}  // namespace dlp
