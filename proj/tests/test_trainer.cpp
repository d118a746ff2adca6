#include "dlp/curriculum.hpp"
#include "dlp/trainer.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace dlp;

namespace {

GateSpec gate(GateKind k, std::vector<int> q, double angle = 0.0) {
  GateSpec g;
  g.kind = k;
  g.qubits = std::move(q);
  g.angle = angle;
  return g;
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// H H on qubit 0 then CNOT CNOT then a lone X: the target is X on qubit 1.
Scaffold pruning_scaffold(double cnot_cost = 1.0) {
  GateSpec cx = gate(GateKind::CNOT, {0, 1});
  cx.cost = cnot_cost;
  Scaffold sc(2, {gate(GateKind::H, {0}), gate(GateKind::H, {0}), cx, cx, gate(GateKind::X, {1})});
  sc.logits().setConstant(2.0);
  return sc;
}

AxiomSet pruning_axioms() {
  AxiomSet ax;
  ax.has_target = true;
  ax.target = embed(pauli_matrix('X'), {1}, 2);
  ax.w_fid = 5.0;
  ax.w_simp = 0.3;
  return ax;
}

}  // namespace

TEST(Curriculum, AnnealingEndpoints) {
  CurriculumSpec spec;
  spec.kind = CurriculumKind::Annealing;
  spec.h_easy = x_field(3, -1.0);
  spec.h_hard = tfim_chain(3);
  spec.anneal_start = 100;
  spec.anneal_end = 300;
  EXPECT_EQ(curriculum_weights(spec, 0, 0.1).t, 0.0);
  EXPECT_EQ(curriculum_weights(spec, 100, 0.1).t, 0.0);
  EXPECT_DOUBLE_EQ(curriculum_weights(spec, 200, 0.1).t, 0.5);
  EXPECT_EQ(curriculum_weights(spec, 300, 0.1).t, 1.0);
  EXPECT_EQ(curriculum_weights(spec, 5000, 0.1).t, 1.0);
  EXPECT_EQ(curriculum_weights(spec, 200, 0.1).w_simp, 0.1);
  EXPECT_LT(max_abs(hamiltonian_matrix(annealed_hamiltonian(spec, 0.0)) - hamiltonian_matrix(spec.h_easy)), 1e-15);
  EXPECT_LT(max_abs(hamiltonian_matrix(annealed_hamiltonian(spec, 1.0)) - hamiltonian_matrix(spec.h_hard)), 1e-15);
  const Matrix mid = hamiltonian_matrix(annealed_hamiltonian(spec, 0.25));
  EXPECT_LT(max_abs(mid - 0.75 * hamiltonian_matrix(spec.h_easy) - 0.25 * hamiltonian_matrix(spec.h_hard)), 1e-14);
}

TEST(Curriculum, AnnealingScheduleMonotone) {
  CurriculumSpec spec;
  spec.kind = CurriculumKind::Annealing;
  spec.h_easy = x_field(2);
  spec.h_hard = tfim_chain(2);
  spec.anneal_end = 97;
  double prev = 0.0;
  for (int e = 0; e < 150; ++e) {
    const double t = curriculum_weights(spec, e, 0.0).t;
    EXPECT_GE(t, prev);
    EXPECT_LE(t, 1.0);
    prev = t;
  }
}

TEST(Curriculum, TwoPhase) {
  CurriculumSpec spec;
  spec.kind = CurriculumKind::TwoPhase;
  spec.switch_epoch = 1500;
  spec.w_simp_final = 0.1;
  EXPECT_EQ(curriculum_weights(spec, 0, 0.7).w_simp, 0.0);
  EXPECT_EQ(curriculum_weights(spec, 1499, 0.7).w_simp, 0.0);
  EXPECT_EQ(curriculum_weights(spec, 1500, 0.7).w_simp, 0.1);
}

TEST(Curriculum, SoftPruneRamp) {
  CurriculumSpec spec;
  spec.kind = CurriculumKind::SoftPrune;
  spec.warmup = 150;
  spec.ramp_end = 300;
  spec.w_simp_final = 0.002;
  EXPECT_EQ(curriculum_weights(spec, 0, 0.0).w_simp, 0.0);
  EXPECT_EQ(curriculum_weights(spec, 150, 0.0).w_simp, 0.0);
  EXPECT_NEAR(curriculum_weights(spec, 225, 0.0).w_simp, 0.001, 1e-15);
  EXPECT_NEAR(curriculum_weights(spec, 300, 0.0).w_simp, 0.002, 1e-15);
  EXPECT_NEAR(curriculum_weights(spec, 999, 0.0).w_simp, 0.002, 1e-15);
}

TEST(Curriculum, PhaseOneSimplicityHasNoGradient) {
  Scaffold sc = pruning_scaffold();
  AxiomSet ax = pruning_axioms();
  CurriculumSpec spec;
  spec.kind = CurriculumKind::TwoPhase;
  spec.switch_epoch = 10;
  spec.w_simp_final = 0.5;
  const AxiomSet phase1 = axioms_at(ax, spec, curriculum_weights(spec, 3, ax.w_simp));
  AxiomSet fid_only = ax;
  fid_only.w_simp = 0.0;
  const Gradient a = grad_total(sc, phase1).grad, b = grad_total(sc, fid_only).grad;
  EXPECT_EQ((a.dlambda - b.dlambda).norm(), 0.0);
}

TEST(Train, ZeroEpochs) {
  Scaffold sc = pruning_scaffold();
  const Eigen::VectorXd before = sc.logits();
  TrainConfig cfg;
  cfg.epochs = 0;
  TrainingTrace t = train(sc, pruning_axioms(), cfg);
  EXPECT_TRUE(t.records.empty());
  EXPECT_FALSE(t.aborted);
  EXPECT_EQ((sc.logits() - before).norm(), 0.0);
}

TEST(Train, PrunesTheCostlierIdentityPair) {
  Scaffold sc = pruning_scaffold(10.0);
  TrainConfig cfg;
  cfg.epochs = 3000;
  TrainingTrace t = train(sc, pruning_axioms(), cfg);
  ASSERT_EQ(t.records.size(), 3000u);
  const Eigen::VectorXd s = sc.switches();
  EXPECT_LT(s(2), 0.01);
  EXPECT_LT(s(3), 0.01);
  EXPECT_GT(s(4), 0.99);
  EXPECT_GT(fidelity_predicate(simulate(extract_discrete(sc).circuit), pruning_axioms().target), 0.999);
}

TEST(Train, DeterministicUnderNoise) {
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.seed = 42;
  cfg.noise.mode = NoiseMode::GaussianEval;
  cfg.noise.sigma = 0.3;
  cfg.noise.target = NoiseTarget::Unitary;
  Scaffold a = pruning_scaffold(), b = pruning_scaffold();
  TrainingTrace ta = train(a, pruning_axioms(), cfg), tb = train(b, pruning_axioms(), cfg);
  std::ostringstream ca, cb;
  write_trace_csv(ca, ta, a.size());
  write_trace_csv(cb, tb, b.size());
  EXPECT_EQ(ca.str(), cb.str());
  EXPECT_EQ(a.logits(), b.logits());
  cfg.seed = 43;
  Scaffold c = pruning_scaffold();
  train(c, pruning_axioms(), cfg);
  EXPECT_NE(a.logits(), c.logits());
}

TEST(Train, RecordsStayInsideUnitInterval) {
  Scaffold sc = pruning_scaffold();
  TrainConfig cfg;
  cfg.epochs = 300;
  for (const auto& r : train(sc, pruning_axioms(), cfg).records) {
    EXPECT_GT(r.s.minCoeff(), 0.0);
    EXPECT_LT(r.s.maxCoeff(), 1.0);
  }
}

TEST(Train, NonFiniteLossAborts) {
  Scaffold sc = pruning_scaffold();
  AxiomSet ax = pruning_axioms();
  ax.target(0, 0) = std::nan("");
  TrainConfig cfg;
  cfg.epochs = 10;
  TrainingTrace t = train(sc, ax, cfg);
  EXPECT_TRUE(t.aborted);
  EXPECT_FALSE(t.error.empty());
  EXPECT_LT(t.records.size(), 10u);
}

TEST(Train, GumbelSelectorFinalSwitchesAreHard) {
  Scaffold sc = pruning_scaffold();
  TrainConfig cfg;
  cfg.epochs = 50;
  cfg.selector = Selector::Gumbel;
  cfg.seed = 3;
  train(sc, pruning_axioms(), cfg);
  for (double s : final_switches(sc, Selector::Gumbel)) EXPECT_TRUE(s == 0.0 || s == 1.0);
}

TEST(TraceCsv, HeaderSchema) {
  EXPECT_EQ(trace_csv_header(2),
            "epoch,total_loss,loss_fid,loss_energy,loss_simp,loss_ent,loss_rob,fidelity,energy,t_curriculum,s_0,s_1,"
            "theta_0,theta_1");
  Scaffold sc = pruning_scaffold();
  TrainConfig cfg;
  cfg.epochs = 4;
  std::ostringstream os;
  write_trace_csv(os, train(sc, pruning_axioms(), cfg), sc.size());
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, trace_csv_header(sc.size()));
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 10 + 2 * 5 - 1);
    ++rows;
  }
  EXPECT_EQ(rows, 4);
}
