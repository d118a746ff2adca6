#include "dlp/scaffold.hpp"
#include "dlp/scenario.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace dlp;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

double trace_fidelity(const Matrix& u, const Matrix& v) {
  const double d = static_cast<double>(u.rows());
  return std::norm((v.adjoint() * u).trace()) / (d * d);
}

GateSpec gate(GateKind k, std::vector<int> q, double angle = 0.0) {
  GateSpec g;
  g.kind = k;
  g.qubits = std::move(q);
  g.angle = angle;
  return g;
}

Matrix random_unitary_oracle(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> n;
  Matrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = cplx(n(rng), n(rng));
  Eigen::HouseholderQR<Matrix> qr(m);
  return qr.householderQ();
}

Scaffold mixed_scaffold(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<GateSpec> slots = {gate(GateKind::H, {0}),          gate(GateKind::CNOT, {0, 2}),
                                 gate(GateKind::RY, {1}, u(rng)), gate(GateKind::CPHASE, {2, 1}, u(rng)),
                                 gate(GateKind::T, {2}),          gate(GateKind::RZ, {0}, u(rng)),
                                 gate(GateKind::SWAP, {0, 1})};
  Scaffold sc(3, slots);
  for (Eigen::Index i = 0; i < sc.logits().size(); ++i) sc.logits()(i) = u(rng);
  return sc;
}

}  // namespace

TEST(Switch, SigmoidValues) {
  EXPECT_DOUBLE_EQ(switch_value(0.0), 0.5);
  EXPECT_NEAR(switch_value(2.0), 0.8808, 1e-4);
  EXPECT_NEAR(switch_value(-2.0), 0.1192, 1e-4);
  EXPECT_NEAR(switch_value(-10.0), 4.54e-5, 1e-7);
  EXPECT_GT(switch_value(-800.0), -1e-300);
  EXPECT_LE(switch_value(800.0), 1.0);
}

TEST(Switch, Monotone) {
  double prev = 0.0;
  for (double l = -20; l <= 20; l += 0.25) {
    const double s = switch_value(l);
    EXPECT_GT(s, prev);
    prev = s;
  }
}

TEST(EffectiveGate, Endpoints) {
  GateSpec cx = gate(GateKind::CNOT, {0, 1});
  EXPECT_LT(max_abs(effective_gate(cx, 0.0, std::nullopt, Interpolation::Linear) - identity(4)), 1e-15);
  EXPECT_LT(max_abs(effective_gate(cx, 1.0, std::nullopt, Interpolation::Linear) - base_unitary(GateKind::CNOT)),
            1e-15);
  GateSpec ry = gate(GateKind::RY, {0});
  EXPECT_LT(max_abs(effective_gate(ry, 1.0, 0.4, Interpolation::Geodesic) - base_unitary(GateKind::RY, 0.4)), 1e-14);
  EXPECT_LT(max_abs(effective_gate(ry, 0.0, 0.4, Interpolation::Geodesic) - identity(2)), 1e-14);
}

TEST(EffectiveGate, LinearHalfX) {
  const Matrix x = pauli_matrix('X');
  Matrix g = effective_gate(gate(GateKind::X, {0}), 0.5, std::nullopt, Interpolation::Linear);
  EXPECT_LT(max_abs(g - (identity(2) + x) * 0.5), 1e-15);
  EXPECT_LT(max_abs(g.adjoint() * g - (identity(2) + 0.25 * (2.0 * x - 2.0 * identity(2)))), 1e-15);
}

TEST(EffectiveGate, RejectsBadInput) {
  EXPECT_THROW(effective_gate(gate(GateKind::H, {0}), 1.5, std::nullopt, Interpolation::Linear), ValidationError);
  EXPECT_THROW(effective_gate(gate(GateKind::RY, {0}), 0.5, std::nullopt, Interpolation::Linear), ValidationError);
}

TEST(EffectiveGate, NormDeviationIdentity) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 10; ++t) {
    GateSpec g = gate(GateKind::FROZEN, {0, 1});
    g.matrix = random_unitary_oracle(rng, 4);
    const Matrix gm = g.matrix;
    for (int k = 1; k <= 9; ++k) {
      const double s = 0.1 * k;
      Matrix e = effective_gate(g, s, std::nullopt, Interpolation::Linear);
      Matrix dev = e.adjoint() * e - identity(4);
      EXPECT_LT(max_abs(dev - s * (1 - s) * (gm + gm.adjoint() - 2.0 * identity(4))), 1e-12);
      Eigen::SelfAdjointEigenSolver<Matrix> es(dev);
      EXPECT_LE(es.eigenvalues().cwiseAbs().maxCoeff(), 4 * s * (1 - s) + 1e-12);
    }
  }
}

TEST(EffectiveGate, GeodesicAlwaysUnitary) {
  for (GateKind k : {GateKind::H, GateKind::CNOT, GateKind::T, GateKind::SWAP}) {
    GateSpec g = gate(k, arity(k) == 2 ? std::vector<int>{0, 1} : std::vector<int>{0});
    for (double s = 0.0; s <= 1.0 + 1e-12; s += 0.05)
      EXPECT_TRUE(is_unitary(effective_gate(g, std::min(s, 1.0), std::nullopt, Interpolation::Geodesic), 1e-10));
    EXPECT_LT(max_abs(effective_gate(g, 1.0, std::nullopt, Interpolation::Geodesic) - base_unitary(k)), 1e-10);
  }
}

TEST(Forward, AllOffIsIdentity) {
  std::mt19937_64 rng(1);
  Scaffold sc = mixed_scaffold(rng);
  sc.logits().setConstant(-30.0);
  EXPECT_LT(max_abs(forward_unitary(sc) - identity(8)), 1e-8);
}

TEST(Forward, MatchesRightToLeftProduct) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 5; ++t) {
    Scaffold sc = mixed_scaffold(rng);
    const Eigen::VectorXd s = sc.switches();
    Matrix expect = identity(8);
    for (std::size_t i = 0; i < sc.size(); ++i) {
      Matrix raw = sc.has_angle(i) ? base_unitary(sc.slot(i).kind, sc.angles()(i)) : base_unitary(sc.slot(i).kind);
      Matrix eff = (1 - s(i)) * identity(raw.rows()) + s(i) * raw;
      expect = embed(eff, sc.slot(i).qubits, 3) * expect;
    }
    EXPECT_LT(max_abs(forward_unitary(sc) - expect), 1e-12);
    State psi = forward_state(sc);
    EXPECT_LT((psi - expect.col(0)).norm(), 1e-12);
  }
}

TEST(Forward, OrderMatters) {
  Scaffold ab(1, {gate(GateKind::H, {0}), gate(GateKind::S, {0})});
  ab.logits().setConstant(40.0);
  Matrix expect = base_unitary(GateKind::S) * base_unitary(GateKind::H);
  EXPECT_LT(max_abs(forward_unitary(ab) - expect), 1e-12);
}

TEST(Forward, EmptyAndSingleH) {
  Scaffold empty(2, {});
  EXPECT_LT((forward_state(empty) - basis_state(2, 0)).norm(), 1e-15);
  Scaffold h(1, {gate(GateKind::H, {0})});
  Eigen::VectorXd s = Eigen::VectorXd::Ones(1);
  State psi = forward_state(h, s, h.angles());
  EXPECT_NEAR(psi(0).real(), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(psi(1).real(), 1 / std::sqrt(2.0), 1e-15);
}

TEST(Forward, RelaxedNormCascadeBound) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    Scaffold sc = mixed_scaffold(rng);
    const Eigen::VectorXd s = sc.switches();
    double bound = 1.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) bound *= 1 + 4 * s(i) * (1 - s(i));
    EXPECT_LE(std::abs(forward_state(sc).squaredNorm() - 1.0), bound - 1.0 + 1e-12);
  }
}

TEST(Forward, FidelityQuadraticInEachSwitch) {
  std::mt19937_64 rng(4);
  Scaffold sc = mixed_scaffold(rng);
  const Matrix target = random_unitary_oracle(rng, 8);
  for (std::size_t k = 0; k < sc.size(); ++k) {
    auto f = [&](double sk) {
      Eigen::VectorXd s = sc.switches();
      s(k) = sk;
      return trace_fidelity(forward_unitary(sc, s, sc.angles()), target);
    };
    const double f0 = f(0.0), fh = f(0.5), f1 = f(1.0);
    // Lagrange interpolation through 0, 0.5, 1 evaluated at 0.25
    const double interp = 0.375 * f0 + 0.75 * fh - 0.125 * f1;
    EXPECT_NEAR(f(0.25), interp, 1e-10) << k;
  }
}

TEST(Scaffold, RejectsBadSlots) {
  EXPECT_THROW(Scaffold(2, {gate(GateKind::CNOT, {0, 0})}), ValidationError);
  EXPECT_THROW(Scaffold(2, {gate(GateKind::H, {2})}), ValidationError);
  EXPECT_THROW(Scaffold(2, {gate(GateKind::CNOT, {0})}), ValidationError);
  EXPECT_THROW(Scaffold(13, {}), SizeError);
}

TEST(Extract, AllOffIsEmpty) {
  std::mt19937_64 rng(5);
  Scaffold sc = mixed_scaffold(rng);
  sc.logits().setConstant(-30.0);
  Extraction ex = extract_discrete(sc);
  EXPECT_TRUE(ex.circuit.gates.empty());
  EXPECT_TRUE(ex.undecided.empty());
}

TEST(Extract, ThresholdAndUndecidedBand) {
  Scaffold sc(1, {gate(GateKind::H, {0}), gate(GateKind::X, {0}), gate(GateKind::Z, {0}), gate(GateKind::S, {0})});
  sc.logits() << 10.0, -10.0, 0.3, -1.0;
  Extraction ex = extract_discrete(sc);
  EXPECT_EQ(ex.circuit.provenance, (std::vector<int>{0, 2}));
  EXPECT_EQ(ex.undecided, (std::vector<int>{2, 3}));
}

TEST(Extract, TrotterPresetKeepsThreeGates) {
  Scenario s = load_scenario("exp1_trotter");
  Scaffold sc = build_scaffold(s);
  sc.logits() << 20, -20, 20, -20, 20, -20;
  Extraction ex = extract_discrete(sc);
  EXPECT_EQ(ex.circuit.provenance, (std::vector<int>{0, 2, 4}));
  EXPECT_GT(trace_fidelity(simulate(ex.circuit), trotter_gate(heisenberg_chain(4), 0.1)), 0.999);
}

TEST(Extract, QftPresetTwelveOfTwentyOne) {
  Scenario s = load_scenario("exp2_qft");
  Scaffold sc = build_scaffold(s);
  ASSERT_EQ(sc.size(), 21u);
  const std::vector<int> keep = {0, 3, 5, 6, 7, 10, 12, 13, 15, 17, 19, 20};
  sc.logits().setConstant(-40.0);
  for (int k : keep) sc.logits()(k) = 40.0;
  EXPECT_NEAR(trace_fidelity(forward_unitary(sc), qft_target(4)), 1.0, 1e-9);
  Extraction ex = extract_discrete(sc);
  EXPECT_EQ(ex.circuit.provenance, keep);
  EXPECT_EQ(sc.size() - ex.circuit.gates.size(), 9u);
}

TEST(Motif, FrozenBellPairMatchesSource) {
  Scaffold sc(2, {gate(GateKind::H, {0}), gate(GateKind::CNOT, {0, 1})});
  sc.logits().setConstant(30.0);
  GateSpec m = freeze_motif(sc, "bell");
  EXPECT_EQ(m.kind, GateKind::FROZEN);
  const DiscreteCircuit src = extract_discrete(sc).circuit;
  for (int b = 0; b < 4; ++b) {
    State via_motif = m.matrix * basis_state(2, b);
    EXPECT_LT((via_motif - simulate_state(src, basis_state(2, b))).norm(), 1e-14);
  }
}

TEST(Motif, EmptyScaffoldFreezesToIdentity) {
  Scaffold sc(2, {});
  EXPECT_LT(max_abs(freeze_motif(sc).matrix - identity(4)), 1e-15);
}

TEST(Motif, RefusesUndecided) {
  Scaffold sc(1, {gate(GateKind::H, {0})});
  sc.logits()(0) = 0.2;
  EXPECT_THROW(freeze_motif(sc), ValidationError);
}

TEST(Motif, FrozenSlotReproducesEnergy) {
  Scaffold sc(3, {gate(GateKind::RY, {0}, 1.1), gate(GateKind::CNOT, {0, 1}), gate(GateKind::RY, {2}, -0.4),
                  gate(GateKind::CNOT, {1, 2})});
  sc.logits().setConstant(40.0);
  const Matrix h = hamiltonian_matrix(j1j2_chain(3));
  const State a = forward_state(sc);
  GateSpec m = freeze_motif(sc);
  Scaffold re(3, {m});
  const State b = forward_state(re);
  EXPECT_NEAR((a.adjoint() * h * a)(0, 0).real(), (b.adjoint() * h * b)(0, 0).real(), 1e-12);
}

TEST(Tiling, PlacementArithmetic) {
  DiscreteCircuit motif{3, {gate(GateKind::H, {0}), gate(GateKind::CNOT, {0, 1}), gate(GateKind::CNOT, {1, 2}),
                            gate(GateKind::RY, {2}, 0.3)},
                        {0, 1, 2, 3}};
  TiledCircuit t = tile_motif(motif, 20, 2);
  EXPECT_EQ(t.placements, 9);
  EXPECT_EQ(t.gate_count, 9u * 4u);
  EXPECT_EQ(t.circuit.n, 20);
  EXPECT_THROW(simulate_state(t.circuit), SizeError);
  TiledCircuit same = tile_motif(motif, 3, 2);
  EXPECT_EQ(same.placements, 1);
  EXPECT_EQ(same.gate_count, 4u);
}

TEST(Tiling, FrozenMotifIsExpanded) {
  DiscreteCircuit src{2, {gate(GateKind::H, {0}), gate(GateKind::CNOT, {0, 1})}, {0, 1}};
  DiscreteCircuit wrapped{2, {freeze_circuit(src)}, {0}};
  TiledCircuit t = tile_motif(wrapped, 6, 2);
  EXPECT_EQ(t.placements, 3);
  EXPECT_EQ(t.gate_count, 6u);
  EXPECT_EQ(t.depth, 2u);
}

TEST(Depth, CountsParallelLayers) {
  DiscreteCircuit c{3, {gate(GateKind::H, {0}), gate(GateKind::H, {1}), gate(GateKind::H, {2}),
                        gate(GateKind::CNOT, {0, 1}), gate(GateKind::X, {2})},
                    {}};
  EXPECT_EQ(circuit_depth(c), 2u);
}
