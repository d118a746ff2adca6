#include "dlp/axioms.hpp"

#include <cmath>

namespace dlp {

void AxiomSet::validate(int n) const {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
  for (double w : {w_fid, w_energy, w_simp, w_ent, w_rob})
    if (!std::isfinite(w) || w < 0.0) throw ValidationError("axiom weights must be finite and >= 0");
  if (w_fid > 0 && !has_target) throw ValidationError("fidelity weight set without a target unitary");
  if ((w_energy > 0 || w_rob > 0) && !has_hamiltonian)
    throw ValidationError("energy/robustness weight set without a Hamiltonian");
  if (!(w_fid > 0 || w_energy > 0 || w_rob > 0)) throw ValidationError("no correctness axiom (fidelity or energy) active");
  if (has_target && (target.rows() != dim || target.cols() != dim))
    throw ValidationError("target unitary dimension does not match scaffold");
  if (has_hamiltonian && (hamiltonian.rows() != dim || !is_hermitian(hamiltonian, 1e-10)))
    throw ValidationError("Hamiltonian must be Hermitian with scaffold dimension");
  if (w_rob > 0 && channels.empty()) throw ValidationError("robustness axiom needs at least one channel");
  for (const auto& c : channels)
    if (c.rows() != dim) throw ValidationError("robustness channel dimension mismatch");
  if (w_ent > 0) {
    if (ent_keep.empty()) throw ValidationError("entanglement axiom needs a bipartition");
    for (int q : ent_keep)
      if (q < 0 || q >= n) throw ValidationError("entanglement bipartition qubit out of range");
  }
  if (!(alpha > 0)) throw ValidationError("simplicity alpha must be positive");
}

void NoiseChannelSpec::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ValidationError("noise sigma must be >= 0");
  if (shots < 1) throw ValidationError("noise shots must be >= 1");
}

double fidelity_predicate(const Matrix& u, const Matrix& target) {
  if (u.rows() != target.rows() || u.cols() != target.cols())
    throw ValidationError("fidelity_predicate: dimension mismatch");
  const double d = static_cast<double>(u.rows());
  return std::norm((target.adjoint() * u).trace()) / (d * d);
}

SimplicityTerms simplicity_terms(const Eigen::VectorXd& s, const Eigen::VectorXd& costs, SimplicityMode mode,
                                 double alpha) {
  const double total = s.dot(costs);
  if (mode == SimplicityMode::Linear) return {std::exp(-alpha * total), total};
  const double t = std::exp(-alpha * total);
  return {t, 1.0 - t};
}

double entanglement_loss(const Matrix& rho_a, double k) { return std::exp(-k * vn_entropy(rho_a)); }

double entanglement_loss(const State& psi, const std::vector<int>& keep, int n, double k) {
  return entanglement_loss(reduced_density(psi, keep, n), k);
}

double expectation(const State& psi, const Matrix& h) { return psi.dot(h * psi).real(); }

double energy_variance(const State& psi, const Matrix& h) {
  const double nrm = psi.squaredNorm();
  if (nrm <= 0) return 0.0;
  const State hp = h * psi;
  const double e = psi.dot(hp).real() / nrm;
  const double e2 = hp.squaredNorm() / nrm;
  return std::max(0.0, e2 - e * e);
}

Matrix robustness_hamiltonian(const Matrix& h, const std::vector<Matrix>& channels) {
  if (channels.empty()) throw ValidationError("robustness_loss: empty channel set");
  Matrix acc = Matrix::Zero(h.rows(), h.cols());
  for (const auto& c : channels) acc += c.adjoint() * h * c;
  return acc / static_cast<double>(channels.size());
}

double robustness_loss(const State& psi, const Matrix& h, const std::vector<Matrix>& channels) {
  return expectation(psi, robustness_hamiltonian(h, channels));
}

double robustness_loss(const Scaffold& sc, const Matrix& h, const std::vector<Matrix>& channels) {
  return robustness_loss(forward_state(sc), h, channels);
}

double noise_sigma(const NoiseChannelSpec& spec, double variance) {
  switch (spec.mode) {
    case NoiseMode::GaussianEval: return spec.sigma;
    case NoiseMode::Shot: return std::sqrt(std::max(0.0, variance) / spec.shots);
    default: return 0.0;
  }
}

double apply_eval_noise(double value, const NoiseChannelSpec& spec, double variance, std::mt19937_64& rng) {
  const double sd = noise_sigma(spec, variance);
  if (sd == 0.0) return value;
  std::normal_distribution<double> gauss(0.0, 1.0);
  return value + sd * gauss(rng);
}

Eigen::VectorXd slot_costs(const Scaffold& sc) {
  Eigen::VectorXd c(static_cast<Eigen::Index>(sc.size()));
  for (std::size_t i = 0; i < sc.size(); ++i) c(i) = sc.slot(i).frozen ? 0.0 : sc.slot(i).cost;
  return c;
}

}  // namespace dlp
