#include "dlp/autodiff.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace dlp {

namespace {

constexpr double kEntGapFloor = 1e-8;

// Tr(A B) for square matrices of equal size.
cplx trace_of_product(const Matrix& a, const Matrix& b) { return (a.transpose().cwiseProduct(b)).sum(); }

struct EntanglementPart {
  double loss = 1.0;
  State adjoint;  // dL = 2 Re(adjoint^dagger dpsi)
  bool degenerate = false;
};

EntanglementPart entanglement_part(const State& psi, const std::vector<int>& keep, int n, double k) {
  EntanglementPart out;
  const Matrix rho = reduced_density(psi, keep, n);
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  const Eigen::VectorXd& p = es.eigenvalues();
  double entropy = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p(i) > kEntropyClip) entropy -= p(i) * std::log2(p(i));
  out.loss = std::exp(-k * entropy);
  if (p.minCoeff() <= kEntGapFloor) {
    out.degenerate = true;
    return out;
  }
  // S = -Tr(rho log2 rho); with Tr(d rho) = 0 only the log term survives.
  Eigen::VectorXd logp(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) logp(i) = std::log2(p(i));
  const Matrix m = es.eigenvectors() * logp.asDiagonal() * es.eigenvectors().adjoint();
  const double nrm = psi.squaredNorm();
  State mpsi = psi;
  apply_local(mpsi, m, keep, n);
  const double f = psi.dot(mpsi).real() / nrm;
  out.adjoint = (k * out.loss / nrm) * (mpsi - f * psi);
  return out;
}

double entanglement_value(const Scaffold& sc, const Eigen::VectorXd& s, const Eigen::VectorXd& theta,
                          const AxiomSet& ax) {
  return entanglement_loss(forward_state(sc, s, theta), ax.ent_keep, sc.n(), ax.ent_k);
}

}  // namespace

Evaluation evaluate(const Scaffold& sc, const Eigen::VectorXd& s, const Eigen::VectorXd& theta, const AxiomSet& ax,
                    const EvalOptions& opt) {
  const std::size_t K = sc.size();
  const int n = sc.n();
  const auto Kx = static_cast<Eigen::Index>(K);
  Evaluation ev;
  Gradient& g = ev.grad;
  g.ds = Eigen::VectorXd::Zero(Kx);
  g.dtheta = Eigen::VectorXd::Zero(Kx);
  g.dlambda = Eigen::VectorXd::Zero(Kx);
  LossBreakdown& L = ev.loss;

  std::normal_distribution<double> gauss(0.0, 1.0);
  auto draw = [&]() {
    if (!opt.rng) throw ValidationError("noise channel requires a random stream");
    return gauss(*opt.rng);
  };
  const bool noisy = opt.noise.mode != NoiseMode::None;

  std::vector<Matrix> gates(K);
  for (std::size_t k = 0; k < K; ++k) gates[k] = sc.effective_gate(k, s(k), theta(k));

  // Unitary tape: suffix products S_k = G_{k-1} ... G_0.
  if (ax.has_target) {
    const double d = static_cast<double>(sc.dim());
    std::vector<Matrix> suffix(K + 1);
    suffix[0] = identity(sc.dim());
    for (std::size_t k = 0; k < K; ++k) {
      suffix[k + 1] = suffix[k];
      apply_local_left(suffix[k + 1], gates[k], sc.slot(k).qubits, n);
      if (opt.counter) ++opt.counter->forward;
    }
    const Matrix target_dag = ax.target.adjoint();
    const cplx z_clean = trace_of_product(target_dag, suffix[K]);
    cplx z = z_clean;
    if (noisy && opt.noise.mode == NoiseMode::GaussianEval && opt.noise.target == NoiseTarget::Unitary &&
        opt.noise.sigma > 0) {
      // U + sigma E with E_ij complex Gaussian of variance 1/d.
      const double sd = std::sqrt(0.5 / d);
      Matrix e(sc.dim(), sc.dim());
      for (Eigen::Index c = 0; c < e.cols(); ++c)
        for (Eigen::Index r = 0; r < e.rows(); ++r) {
          const double re = draw(), im = draw();
          e(r, c) = cplx(sd * re, sd * im);
        }
      z += opt.noise.sigma * trace_of_product(target_dag, e);
    }
    L.fidelity = std::norm(z_clean) / (d * d);
    L.fid = 1.0 - std::norm(z) / (d * d);
    if (opt.want_gradient && ax.w_fid > 0) {
      // Backward: T_k = Ut^dagger G_{K-1} ... G_{k+1}.
      Matrix t = target_dag;
      const double scale = -2.0 * ax.w_fid / (d * d);
      for (std::size_t kk = K; kk-- > 0;) {
        const auto& q = sc.slot(kk).qubits;
        if (sc.structure_trainable(kk)) {
          Matrix x = suffix[kk];
          apply_local_left(x, sc.d_effective_ds(kk, s(kk), theta(kk)), q, n);
          g.ds(kk) += scale * (std::conj(z) * trace_of_product(t, x)).real();
          if (opt.counter) ++opt.counter->contractions;
        }
        if (sc.angle_trainable(kk)) {
          Matrix x = suffix[kk];
          apply_local_left(x, sc.d_effective_dtheta(kk, s(kk), theta(kk)), q, n);
          g.dtheta(kk) += scale * (std::conj(z) * trace_of_product(t, x)).real();
          if (opt.counter) ++opt.counter->contractions;
        }
        if (kk > 0) {
          apply_local_right(t, gates[kk], q, n);
          if (opt.counter) ++opt.counter->backward;
        }
      }
    }
  }

  // State tape.
  const bool need_state = ax.has_hamiltonian || ax.w_ent > 0;
  if (need_state) {
    std::vector<State> psi(K + 1);
    psi[0] = basis_state(n);
    for (std::size_t k = 0; k < K; ++k) {
      psi[k + 1] = psi[k];
      apply_local(psi[k + 1], gates[k], sc.slot(k).qubits, n);
      if (opt.counter && !ax.has_target) ++opt.counter->forward;
    }
    const State& out = psi[K];
    State adjoint = State::Zero(out.size());
    double energy_sd = 0.0;
    if (ax.has_hamiltonian) {
      const State hpsi = ax.hamiltonian * out;
      L.energy_value = out.dot(hpsi).real();
      L.energy = L.energy_value;
      if (noisy && (opt.noise.mode == NoiseMode::Shot ||
                    (opt.noise.mode == NoiseMode::GaussianEval && opt.noise.target == NoiseTarget::Energy))) {
        energy_sd = noise_sigma(opt.noise, energy_variance(out, ax.hamiltonian));
        if (energy_sd > 0) L.energy += energy_sd * draw();
      }
      adjoint += ax.w_energy * hpsi;
      if (ax.w_rob > 0) {
        const Matrix heff = robustness_hamiltonian(ax.hamiltonian, ax.channels);
        const State hp = heff * out;
        L.rob = out.dot(hp).real();
        adjoint += ax.w_rob * hp;
      }
    }
    bool ent_fd = false;
    if (ax.w_ent > 0) {
      EntanglementPart ep = entanglement_part(out, ax.ent_keep, n, ax.ent_k);
      L.ent = ep.loss;
      if (ep.degenerate) {
        ent_fd = true;
        L.ent_fallback = true;
      } else {
        adjoint += ax.w_ent * ep.adjoint;
      }
    }
    if (opt.want_gradient && (ax.w_energy > 0 || ax.w_rob > 0 || (ax.w_ent > 0 && !ent_fd))) {
      State phi = adjoint;
      for (std::size_t kk = K; kk-- > 0;) {
        const auto& q = sc.slot(kk).qubits;
        if (sc.structure_trainable(kk)) {
          State x = psi[kk];
          apply_local(x, sc.d_effective_ds(kk, s(kk), theta(kk)), q, n);
          g.ds(kk) += 2.0 * phi.dot(x).real();
          if (opt.counter) ++opt.counter->contractions;
        }
        if (sc.angle_trainable(kk)) {
          State x = psi[kk];
          apply_local(x, sc.d_effective_dtheta(kk, s(kk), theta(kk)), q, n);
          g.dtheta(kk) += 2.0 * phi.dot(x).real();
          if (opt.counter) ++opt.counter->contractions;
        }
        if (kk > 0) {
          apply_local(phi, gates[kk].adjoint(), q, n);
          if (opt.counter && !ax.has_target) ++opt.counter->backward;
        }
      }
    }
    if (opt.want_gradient && ent_fd) {
      // Reduced spectrum touches zero: the log is singular, use Richardson-extrapolated central differences.
      const double h = 1e-4;
      auto derivative = [&](Eigen::VectorXd& x, std::size_t k, bool angle) {
        const double x0 = x(k);
        auto central = [&](double step) {
          x(k) = x0 + step;
          const double up = angle ? entanglement_value(sc, s, x, ax) : entanglement_value(sc, x, theta, ax);
          x(k) = x0 - step;
          const double dn = angle ? entanglement_value(sc, s, x, ax) : entanglement_value(sc, x, theta, ax);
          x(k) = x0;
          return (up - dn) / (2 * step);
        };
        return (4 * central(h / 2) - central(h)) / 3;
      };
      Eigen::VectorXd sp = s, tp = theta;
      for (std::size_t k = 0; k < K; ++k) {
        if (sc.structure_trainable(k)) g.ds(k) += ax.w_ent * derivative(sp, k, false);
        if (sc.angle_trainable(k)) g.dtheta(k) += ax.w_ent * derivative(tp, k, true);
      }
    }
    if (opt.want_gradient && energy_sd > 0 && ax.w_energy > 0) {
      for (std::size_t k = 0; k < K; ++k) {
        if (sc.structure_trainable(k)) g.ds(k) += ax.w_energy * energy_sd * draw();
        if (sc.angle_trainable(k)) g.dtheta(k) += ax.w_energy * energy_sd * draw();
      }
    }
  }

  const Eigen::VectorXd costs = slot_costs(sc);
  const SimplicityTerms st = simplicity_terms(s, costs, ax.simp_mode, ax.alpha);
  L.simp = st.loss;
  if (opt.want_gradient && ax.w_simp > 0) {
    if (ax.simp_mode == SimplicityMode::Linear)
      g.ds += ax.w_simp * costs;
    else
      g.ds += ax.w_simp * ax.alpha * st.predicate * costs;
  }

  L.total = ax.w_fid * L.fid + ax.w_energy * L.energy + ax.w_simp * L.simp + ax.w_ent * L.ent + ax.w_rob * L.rob;
  if (noisy && opt.noise.mode == NoiseMode::GaussianEval && opt.noise.target == NoiseTarget::Loss &&
      opt.noise.sigma > 0)
    L.total += opt.noise.sigma * draw();

  for (std::size_t k = 0; k < K; ++k)
    if (sc.structure_trainable(k)) g.dlambda(k) = g.ds(k) * s(k) * (1.0 - s(k));
    else g.ds(k) = 0.0;
  return ev;
}

Evaluation grad_total(const Scaffold& sc, const AxiomSet& ax, const EvalOptions& opt) {
  return evaluate(sc, sc.switches(), sc.angles(), ax, opt);
}

Evaluation grad_fidelity(const Scaffold& sc, const Matrix& target) {
  AxiomSet ax;
  ax.has_target = true;
  ax.target = target;
  ax.w_fid = 1.0;
  return grad_total(sc, ax);
}

Evaluation grad_energy(const Scaffold& sc, const Matrix& h) {
  AxiomSet ax;
  ax.has_hamiltonian = true;
  ax.hamiltonian = h;
  ax.w_energy = 1.0;
  return grad_total(sc, ax);
}

TapeCheck tape_consistency(const Scaffold& sc) {
  const Eigen::VectorXd s = sc.switches();
  const std::size_t K = sc.size();
  std::vector<Matrix> gates(K);
  for (std::size_t k = 0; k < K; ++k) gates[k] = embed(sc.effective_gate(k, s(k), sc.angles()(k)), sc.slot(k).qubits, sc.n());
  std::vector<Matrix> suffix(K + 1), prefix(K + 1);
  suffix[0] = identity(sc.dim());
  for (std::size_t k = 0; k < K; ++k) suffix[k + 1] = gates[k] * suffix[k];
  prefix[K] = identity(sc.dim());
  for (std::size_t k = K; k-- > 0;) prefix[k] = k + 1 < K ? Matrix(prefix[k + 1] * gates[k + 1]) : identity(sc.dim());
  double worst = 0.0;
  for (std::size_t k = 0; k < K; ++k)
    worst = std::max(worst, (prefix[k] * gates[k] * suffix[k] - suffix[K]).cwiseAbs().maxCoeff());
  return {worst};
}

FdReport finite_difference_check(const Scaffold& sc, const LossFn& loss, const GradFn& grad, double eps, double floor,
                                 FdStencil stencil) {
  FdReport rep;
  const Gradient g = grad(sc);
  Scaffold probe = sc;
  auto rel = [&](double analytic, double numeric) {
    return std::abs(analytic - numeric) / std::max(std::abs(analytic), floor);
  };
  auto derivative = [&](double& x) {
    const double x0 = x;
    auto central = [&](double h) {
      x = x0 + h;
      const double up = loss(probe);
      x = x0 - h;
      const double dn = loss(probe);
      x = x0;
      return (up - dn) / (2 * h);
    };
    if (stencil == FdStencil::Central) return central(eps);
    return (4 * central(eps / 2) - central(eps)) / 3;
  };
  for (std::size_t k = 0; k < sc.size(); ++k) {
    if (sc.structure_trainable(k)) {
      rep.max_rel_error = std::max(rep.max_rel_error, rel(g.dlambda(k), derivative(probe.logits()(k))));
      ++rep.checked;
    }
    if (sc.angle_trainable(k)) {
      rep.max_rel_error = std::max(rep.max_rel_error, rel(g.dtheta(k), derivative(probe.angles()(k))));
      ++rep.checked;
    }
  }
  return rep;
}

}  // namespace dlp
