#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dlp {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using State = Eigen::VectorXcd;

// Qubit 0 is the most significant tensor factor: in basis index b the bit of
// qubit q is (b >> (n - 1 - q)) & 1.  kron(X, I)|00> = |10>.
inline constexpr std::size_t kMaxDim = 4096;

struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SizeError : std::length_error {
  using std::length_error::length_error;
};

inline int bit_of(std::size_t index, int qubit, int n) {
  return static_cast<int>((index >> (n - 1 - qubit)) & 1u);
}

Matrix identity(std::size_t dim);
Matrix kron(const Matrix& a, const Matrix& b);

bool is_unitary(const Matrix& m, double tol = 1e-10);
bool is_hermitian(const Matrix& m, double tol = 1e-12);

// exp(-i * scale * h) for Hermitian h.
Matrix matexp_hermitian(const Matrix& h, double scale);

// Hermitian g with u = exp(-i g), eigenphases taken in (-pi, pi].
Matrix principal_generator(const Matrix& u);

Matrix density(const State& psi);
Matrix partial_trace(const Matrix& rho, const std::vector<int>& keep, int n);
// Reduced state of |psi><psi| / <psi|psi> on the kept qubits, in keep order.
Matrix reduced_density(const State& psi, const std::vector<int>& keep, int n);

inline constexpr double kEntropyClip = 1e-12;
double vn_entropy(const Matrix& rho);

struct GroundState {
  double energy;
  State vector;
};
GroundState exact_ground_energy(const Matrix& h);

// Projector onto every eigenvector within tol of the minimum eigenvalue.
Matrix ground_projector(const Matrix& h, double tol = 1e-8);

// In-place application of a k-qubit matrix g acting on `qubits` (listed order
// maps to the most significant local bit first).
void apply_local(State& psi, const Matrix& g, const std::vector<int>& qubits, int n);
// m <- E(g) m
void apply_local_left(Matrix& m, const Matrix& g, const std::vector<int>& qubits, int n);
// m <- m E(g)
void apply_local_right(Matrix& m, const Matrix& g, const std::vector<int>& qubits, int n);
// Tr(q E(a)) without forming the embedding.
cplx trace_with_local(const Matrix& q, const Matrix& a, const std::vector<int>& qubits, int n);

int qubit_count(std::size_t dim);

}  // namespace dlp
