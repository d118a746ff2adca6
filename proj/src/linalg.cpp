#include "dlp/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace dlp {

namespace {

struct LocalLayout {
  std::vector<std::size_t> offsets;  // local index -> global bit pattern
  std::vector<std::size_t> bases;    // global indices with all acted bits zero
};

LocalLayout layout_for(const std::vector<int>& qubits, int n) {
  const int k = static_cast<int>(qubits.size());
  LocalLayout out;
  std::size_t mask = 0;
  for (int q : qubits) {
    if (q < 0 || q >= n) throw ValidationError("qubit index out of range: " + std::to_string(q));
    const std::size_t bit = std::size_t{1} << (n - 1 - q);
    if (mask & bit) throw ValidationError("repeated qubit index: " + std::to_string(q));
    mask |= bit;
  }
  out.offsets.resize(std::size_t{1} << k);
  for (std::size_t a = 0; a < out.offsets.size(); ++a) {
    std::size_t g = 0;
    for (int j = 0; j < k; ++j)
      if ((a >> (k - 1 - j)) & 1u) g |= std::size_t{1} << (n - 1 - qubits[j]);
    out.offsets[a] = g;
  }
  const std::size_t dim = std::size_t{1} << n;
  out.bases.reserve(dim >> k);
  for (std::size_t i = 0; i < dim; ++i)
    if ((i & mask) == 0) out.bases.push_back(i);
  return out;
}

void check_local(const Matrix& g, const std::vector<int>& qubits) {
  if (g.rows() != g.cols() || static_cast<std::size_t>(g.rows()) != (std::size_t{1} << qubits.size()))
    throw ValidationError("local matrix does not match its qubit list");
}

}  // namespace

int qubit_count(std::size_t dim) {
  int n = 0;
  while ((std::size_t{1} << n) < dim) ++n;
  if ((std::size_t{1} << n) != dim) throw ValidationError("dimension is not a power of two");
  return n;
}

Matrix identity(std::size_t dim) {
  if (dim > kMaxDim) throw SizeError("dimension exceeds " + std::to_string(kMaxDim));
  return Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

Matrix kron(const Matrix& a, const Matrix& b) {
  const auto ra = a.rows(), ca = a.cols(), rb = b.rows(), cb = b.cols();
  if (static_cast<std::size_t>(ra * rb) > kMaxDim || static_cast<std::size_t>(ca * cb) > kMaxDim)
    throw SizeError("kron result exceeds dimension " + std::to_string(kMaxDim));
  Matrix out(ra * rb, ca * cb);
  for (Eigen::Index i = 0; i < ra; ++i)
    for (Eigen::Index j = 0; j < ca; ++j) out.block(i * rb, j * cb, rb, cb) = a(i, j) * b;
  return out;
}

bool is_unitary(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return ((m.adjoint() * m - Matrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() < tol);
}

bool is_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() < tol;
}

Matrix matexp_hermitian(const Matrix& h, double scale) {
  if (!is_hermitian(h, 1e-10)) throw ValidationError("matexp_hermitian: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const Eigen::VectorXd& w = es.eigenvalues();
  Eigen::VectorXcd phase(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) phase(i) = std::exp(cplx(0.0, -scale * w(i)));
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix principal_generator(const Matrix& u) {
  if (!is_unitary(u, 1e-9)) throw ValidationError("principal_generator: input is not unitary");
  // Schur form of a normal matrix is diagonal with a unitary basis, which
  // stays orthonormal inside degenerate eigenspaces.
  Eigen::ComplexSchur<Matrix> schur(u);
  const Matrix& t = schur.matrixT();
  Eigen::VectorXcd h(t.rows());
  for (Eigen::Index i = 0; i < t.rows(); ++i) {
    double phi = std::arg(t(i, i));
    if (phi <= -M_PI + 1e-12) phi = M_PI;
    h(i) = -phi;
  }
  const Matrix& q = schur.matrixU();
  Matrix g = q * h.asDiagonal() * q.adjoint();
  return 0.5 * (g + g.adjoint());
}

Matrix density(const State& psi) { return psi * psi.adjoint(); }

Matrix partial_trace(const Matrix& rho, const std::vector<int>& keep, int n) {
  if (keep.empty()) throw ValidationError("partial_trace: keep set is empty");
  if (static_cast<std::size_t>(rho.rows()) != (std::size_t{1} << n))
    throw ValidationError("partial_trace: matrix dimension does not match qubit count");
  std::vector<int> traced;
  for (int q = 0; q < n; ++q)
    if (std::find(keep.begin(), keep.end(), q) == keep.end()) traced.push_back(q);
  const LocalLayout kl = layout_for(keep, n);
  const std::size_t dk = kl.offsets.size();
  Matrix out = Matrix::Zero(dk, dk);
  if (traced.empty()) {
    for (std::size_t a = 0; a < dk; ++a)
      for (std::size_t b = 0; b < dk; ++b) out(a, b) = rho(kl.offsets[a], kl.offsets[b]);
    return out;
  }
  const LocalLayout tl = layout_for(traced, n);
  for (std::size_t e : tl.offsets)
    for (std::size_t a = 0; a < dk; ++a)
      for (std::size_t b = 0; b < dk; ++b) out(a, b) += rho(kl.offsets[a] | e, kl.offsets[b] | e);
  return out;
}

Matrix reduced_density(const State& psi, const std::vector<int>& keep, int n) {
  if (keep.empty()) throw ValidationError("reduced_density: keep set is empty");
  const LocalLayout kl = layout_for(keep, n);
  const std::size_t dk = kl.offsets.size();
  // Rows: kept index, columns: environment index.
  Matrix m(dk, kl.bases.size());
  for (std::size_t e = 0; e < kl.bases.size(); ++e)
    for (std::size_t a = 0; a < dk; ++a) m(a, e) = psi(kl.offsets[a] | kl.bases[e]);
  Matrix rho = m * m.adjoint();
  const double tr = rho.trace().real();
  if (tr > 0) rho /= tr;
  return rho;
}

double vn_entropy(const Matrix& rho) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double p = es.eigenvalues()(i);
    if (p > kEntropyClip) s -= p * std::log2(p);
  }
  return std::max(0.0, s);
}

GroundState exact_ground_energy(const Matrix& h) {
  if (static_cast<std::size_t>(h.rows()) > kMaxDim) throw SizeError("exact_ground_energy: dimension too large");
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  return {es.eigenvalues()(0), es.eigenvectors().col(0)};
}

Matrix ground_projector(const Matrix& h, double tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const double e0 = es.eigenvalues()(0);
  Matrix p = Matrix::Zero(h.rows(), h.cols());
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i) - e0 > tol) break;
    p += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
  }
  return p;
}

void apply_local(State& psi, const Matrix& g, const std::vector<int>& qubits, int n) {
  check_local(g, qubits);
  const LocalLayout l = layout_for(qubits, n);
  const std::size_t k = l.offsets.size();
  Eigen::VectorXcd tmp(k), res(k);
  for (std::size_t b : l.bases) {
    for (std::size_t a = 0; a < k; ++a) tmp(a) = psi(b | l.offsets[a]);
    res.noalias() = g * tmp;
    for (std::size_t a = 0; a < k; ++a) psi(b | l.offsets[a]) = res(a);
  }
}

void apply_local_left(Matrix& m, const Matrix& g, const std::vector<int>& qubits, int n) {
  check_local(g, qubits);
  const LocalLayout l = layout_for(qubits, n);
  const std::size_t k = l.offsets.size();
  Matrix tmp(k, m.cols()), res(k, m.cols());
  for (std::size_t b : l.bases) {
    for (std::size_t a = 0; a < k; ++a) tmp.row(a) = m.row(b | l.offsets[a]);
    res.noalias() = g * tmp;
    for (std::size_t a = 0; a < k; ++a) m.row(b | l.offsets[a]) = res.row(a);
  }
}

void apply_local_right(Matrix& m, const Matrix& g, const std::vector<int>& qubits, int n) {
  check_local(g, qubits);
  const LocalLayout l = layout_for(qubits, n);
  const std::size_t k = l.offsets.size();
  Matrix tmp(m.rows(), k), res(m.rows(), k);
  for (std::size_t b : l.bases) {
    for (std::size_t a = 0; a < k; ++a) tmp.col(a) = m.col(b | l.offsets[a]);
    res.noalias() = tmp * g;
    for (std::size_t a = 0; a < k; ++a) m.col(b | l.offsets[a]) = res.col(a);
  }
}

cplx trace_with_local(const Matrix& q, const Matrix& a, const std::vector<int>& qubits, int n) {
  check_local(a, qubits);
  const LocalLayout l = layout_for(qubits, n);
  const std::size_t k = l.offsets.size();
  cplx acc = 0.0;
  for (std::size_t b : l.bases)
    for (std::size_t x = 0; x < k; ++x)
      for (std::size_t y = 0; y < k; ++y) acc += q(b | l.offsets[x], b | l.offsets[y]) * a(y, x);
  return acc;
}

}  // namespace dlp
