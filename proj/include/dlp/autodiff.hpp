#pragma once

#include "dlp/axioms.hpp"

#include <functional>
#include <random>

namespace dlp {

struct Gradient {
  Eigen::VectorXd dlambda;  // per slot, zero for frozen slots
  Eigen::VectorXd dtheta;   // per slot, zero where no trainable angle
  Eigen::VectorXd ds;       // derivative with respect to the switch value itself
};

struct LossBreakdown {
  double total = 0.0;
  double fid = 0.0;     // 1 - fidelity as seen by the optimizer
  double energy = 0.0;  // energy as seen by the optimizer
  double simp = 0.0;
  double ent = 0.0;
  double rob = 0.0;
  double fidelity = 0.0;     // noiseless
  double energy_value = 0.0;  // noiseless
  bool ent_fallback = false;
};

struct OpCounter {
  std::size_t forward = 0;   // gate applications building the cached tapes
  std::size_t backward = 0;  // gate applications of the reverse sweep
  std::size_t contractions = 0;
};

struct EvalOptions {
  NoiseChannelSpec noise;
  std::mt19937_64* rng = nullptr;
  OpCounter* counter = nullptr;
  bool want_gradient = true;
};

struct Evaluation {
  LossBreakdown loss;
  Gradient grad;
};

// Loss and gradient at explicit switches s and angles theta.  dlambda is
// filled assuming s = sigmoid(lambda).
Evaluation evaluate(const Scaffold& sc, const Eigen::VectorXd& s, const Eigen::VectorXd& theta,
                    const AxiomSet& ax, const EvalOptions& opt = {});

Evaluation grad_total(const Scaffold& sc, const AxiomSet& ax, const EvalOptions& opt = {});
Evaluation grad_fidelity(const Scaffold& sc, const Matrix& target);
Evaluation grad_energy(const Scaffold& sc, const Matrix& h);

struct TapeCheck {
  double max_error;
};
// Max over slots of |P_k G_k S_k - U|.
TapeCheck tape_consistency(const Scaffold& sc);

using LossFn = std::function<double(const Scaffold&)>;
using GradFn = std::function<Gradient(const Scaffold&)>;

struct FdReport {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
};
enum class FdStencil {
  Central,     // (f(x+e) - f(x-e)) / 2e
  Richardson,  // (4 D(e/2) - D(e)) / 3 from two central differences, O(e^4)
};

// Finite differences over all trainable logits and angles; relative error
// uses max(|g|, floor) as denominator.
FdReport finite_difference_check(const Scaffold& sc, const LossFn& loss, const GradFn& grad, double eps = 1e-5,
                                 double floor = 1e-8, FdStencil stencil = FdStencil::Central);

}  // namespace dlp
