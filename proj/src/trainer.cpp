#include "dlp/trainer.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace dlp {

AxiomSet axioms_at(const AxiomSet& base, const CurriculumSpec& cur, const CurriculumPoint& p) {
  AxiomSet ax = base;
  ax.w_simp = p.w_simp;
  if (cur.kind == CurriculumKind::Annealing) {
    ax.has_hamiltonian = true;
    ax.hamiltonian = hamiltonian_matrix(annealed_hamiltonian(cur, p.t));
  }
  return ax;
}

TrainingTrace train(Scaffold& sc, const AxiomSet& axioms, const TrainConfig& cfg) {
  TrainingTrace trace;
  trace.noise_draws_seed = cfg.seed;
  std::mt19937_64 rng(cfg.seed);
  const std::size_t K = sc.size();

  std::vector<std::size_t> lam_idx, th_idx;
  for (std::size_t i = 0; i < K; ++i) {
    if (sc.structure_trainable(i)) lam_idx.push_back(i);
    if (sc.angle_trainable(i)) th_idx.push_back(i);
  }
  const std::size_t P = lam_idx.size() + th_idx.size();
  Eigen::VectorXd lr(static_cast<Eigen::Index>(P));
  const double lr_theta = cfg.optimizer.lr_theta > 0 ? cfg.optimizer.lr_theta : cfg.optimizer.lr;
  for (std::size_t j = 0; j < P; ++j) lr(j) = j < lam_idx.size() ? cfg.optimizer.lr : lr_theta;
  AdamW opt(cfg.optimizer, lr);

  Eigen::VectorXd x(static_cast<Eigen::Index>(P)), gx(static_cast<Eigen::Index>(P));
  bool anneal_cached = false;
  double cached_t = -1.0;
  AxiomSet ax;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    const CurriculumPoint cp = curriculum_weights(cfg.curriculum, epoch, axioms.w_simp);
    if (!anneal_cached || cp.t != cached_t) {
      ax = axioms_at(axioms, cfg.curriculum, cp);
      cached_t = cp.t;
      anneal_cached = true;
    }
    ax.w_simp = cp.w_simp;

    Eigen::VectorXd s;
    double tau = 1.0;
    if (cfg.selector == Selector::Gumbel) {
      const double frac = cfg.epochs > 1 ? static_cast<double>(epoch) / (cfg.epochs - 1) : 0.0;
      tau = cfg.gumbel.tau * std::pow(cfg.gumbel.tau_final / cfg.gumbel.tau, frac);
      s = gumbel_select(sc.logits(), tau, rng).weights;
      if (cfg.gumbel.hard)
        for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = s(i) > 0.5 ? 1.0 : 0.0;
    } else {
      s = sc.switches();
    }
    for (std::size_t i = 0; i < K; ++i)
      if (sc.slot(i).frozen) s(i) = 1.0;

    EvalOptions eo;
    eo.noise = cfg.noise;
    eo.rng = &rng;
    Evaluation ev = evaluate(sc, s, sc.angles(), ax, eo);

    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = ev.loss;
    rec.t_curriculum = cp.t;
    rec.w_simp = cp.w_simp;
    rec.s = s;
    rec.theta = sc.angles();

    if (!std::isfinite(ev.loss.total) || !ev.grad.ds.allFinite() || !ev.grad.dtheta.allFinite()) {
      trace.aborted = true;
      trace.error = "non-finite loss or gradient at epoch " + std::to_string(epoch);
      trace.records.push_back(rec);
      break;
    }

    for (std::size_t j = 0; j < lam_idx.size(); ++j) {
      const std::size_t i = lam_idx[j];
      x(j) = sc.logits()(i);
      if (cfg.selector == Selector::Gumbel) {
        // Straight-through in hard mode: the soft derivative stands in.
        const double w = switch_value((sc.logits()(i)) / tau);
        const double ws = cfg.gumbel.hard ? w : s(i);
        gx(j) = ev.grad.ds(i) * ws * (1.0 - ws) / tau;
      } else {
        gx(j) = ev.grad.dlambda(i);
      }
    }
    for (std::size_t j = 0; j < th_idx.size(); ++j) {
      x(lam_idx.size() + j) = sc.angles()(th_idx[j]);
      gx(lam_idx.size() + j) = ev.grad.dtheta(th_idx[j]);
    }
    opt.step(x, gx);
    for (std::size_t j = 0; j < lam_idx.size(); ++j) sc.logits()(lam_idx[j]) = x(j);
    for (std::size_t j = 0; j < th_idx.size(); ++j) sc.angles()(th_idx[j]) = x(lam_idx.size() + j);

    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    trace.records.push_back(std::move(rec));
  }
  return trace;
}

Eigen::VectorXd final_switches(const Scaffold& sc, Selector selector) {
  Eigen::VectorXd s = sc.switches();
  if (selector == Selector::Gumbel)
    for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = sc.logits()(i) > 0 ? 1.0 : 0.0;
  for (std::size_t i = 0; i < sc.size(); ++i)
    if (sc.slot(i).frozen) s(i) = 1.0;
  return s;
}

std::string trace_csv_header(std::size_t slots) {
  std::ostringstream os;
  os << "epoch,total_loss,loss_fid,loss_energy,loss_simp,loss_ent,loss_rob,fidelity,energy,t_curriculum";
  for (std::size_t i = 0; i < slots; ++i) os << ",s_" << i;
  for (std::size_t i = 0; i < slots; ++i) os << ",theta_" << i;
  return os.str();
}

void write_trace_csv(std::ostream& os, const TrainingTrace& trace, std::size_t slots) {
  os << trace_csv_header(slots) << '\n';
  os << std::setprecision(12);
  for (const auto& r : trace.records) {
    const auto& l = r.loss;
    os << r.epoch << ',' << l.total << ',' << l.fid << ',' << l.energy << ',' << l.simp << ',' << l.ent << ','
       << l.rob << ',' << l.fidelity << ',' << l.energy_value << ',' << r.t_curriculum;
    for (Eigen::Index i = 0; i < r.s.size(); ++i) os << ',' << r.s(i);
    for (Eigen::Index i = 0; i < r.theta.size(); ++i) os << ',' << r.theta(i);
    os << '\n';
  }
}

}  // namespace dlp
