#pragma once

#include "dlp/scaffold.hpp"

#include <random>
#include <vector>

namespace dlp {

enum class SimplicityMode { Linear, Exponential };

struct AxiomSet {
  bool has_target = false;
  Matrix target;
  bool has_hamiltonian = false;
  Matrix hamiltonian;
  double w_fid = 0.0;
  double w_energy = 0.0;
  double w_simp = 0.0;
  double w_ent = 0.0;
  double w_rob = 0.0;
  SimplicityMode simp_mode = SimplicityMode::Linear;
  double alpha = 0.1;
  std::vector<int> ent_keep;
  double ent_k = 1.0;
  std::vector<Matrix> channels;  // full-dimension single-operator error channels

  void validate(int n) const;
};

enum class NoiseMode { None, GaussianEval, Shot };
enum class NoiseTarget { Loss, Unitary, Energy };

struct NoiseChannelSpec {
  NoiseMode mode = NoiseMode::None;
  double sigma = 0.0;
  NoiseTarget target = NoiseTarget::Loss;
  int shots = 1000;

  void validate() const;
};

double fidelity_predicate(const Matrix& u, const Matrix& target);

struct SimplicityTerms {
  double predicate;
  double loss;
};
// Frozen slots are excluded by passing cost 0.
SimplicityTerms simplicity_terms(const Eigen::VectorXd& s, const Eigen::VectorXd& costs, SimplicityMode mode,
                                 double alpha = 0.1);

double entanglement_loss(const State& psi, const std::vector<int>& keep, int n, double k);
double entanglement_loss(const Matrix& rho_a, double k);

double expectation(const State& psi, const Matrix& h);
// Variance of h in the normalized state.
double energy_variance(const State& psi, const Matrix& h);

Matrix robustness_hamiltonian(const Matrix& h, const std::vector<Matrix>& channels);
double robustness_loss(const State& psi, const Matrix& h, const std::vector<Matrix>& channels);
double robustness_loss(const Scaffold& sc, const Matrix& h, const std::vector<Matrix>& channels);

// Standard deviation of the additive noise this channel applies.
double noise_sigma(const NoiseChannelSpec& spec, double variance);
double apply_eval_noise(double value, const NoiseChannelSpec& spec, double variance, std::mt19937_64& rng);

Eigen::VectorXd slot_costs(const Scaffold& sc);

}  // namespace dlp
