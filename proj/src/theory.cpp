#include "dlp/theory.hpp"

#include "dlp/autodiff.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace dlp {

bool SuiteReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return !checks.empty();
}

Matrix random_unitary(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix z(d, d);
  for (Eigen::Index c = 0; c < d; ++c)
    for (Eigen::Index r = 0; r < d; ++r) {
      const double re = g(rng), im = g(rng);
      z(r, c) = cplx(re, im);
    }
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix rr = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < d; ++i) {
    const cplx diag = rr(i, i);
    q.col(i) *= std::abs(diag) > 0 ? diag / std::abs(diag) : cplx(1.0);
  }
  return q;
}

Scaffold random_scaffold(int n, int slots, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(-M_PI, M_PI), logit(1.0, 3.0);
  std::bernoulli_distribution sign(0.5);
  std::uniform_int_distribution<int> qubit(0, n - 1);
  static const GateKind one_q[] = {GateKind::H, GateKind::X, GateKind::S, GateKind::T, GateKind::RY, GateKind::RZ};
  static const GateKind two_q[] = {GateKind::CNOT, GateKind::CPHASE, GateKind::SWAP};
  std::vector<GateSpec> gates;
  for (int q = 0; q < n; ++q) {
    GateSpec g;
    g.kind = GateKind::RY;
    g.qubits = {q};
    g.angle = angle(rng);
    gates.push_back(g);
  }
  for (int q = 0; q + 1 < n; ++q) {
    GateSpec g;
    g.kind = GateKind::CNOT;
    g.qubits = {q, q + 1};
    gates.push_back(g);
  }
  for (int i = 0; i < slots; ++i) {
    GateSpec g;
    const bool two = n > 1 && std::uniform_int_distribution<int>(0, 2)(rng) == 0;
    if (two) {
      g.kind = two_q[std::uniform_int_distribution<int>(0, 2)(rng)];
      const int a = qubit(rng);
      int b = qubit(rng);
      while (b == a) b = qubit(rng);
      g.qubits = {a, b};
    } else {
      g.kind = one_q[std::uniform_int_distribution<int>(0, 5)(rng)];
      g.qubits = {qubit(rng)};
    }
    g.angle = angle(rng);
    g.cost = std::uniform_real_distribution<double>(0.5, 3.0)(rng);
    gates.push_back(g);
  }
  // Mixing tail: a rotation with nothing non-commuting after it has R + R^dagger
  // proportional to I and leaves the reduced spectrum exactly unchanged.
  auto h_layer = [&] {
    for (int q = 0; q < n; ++q) {
      GateSpec g;
      g.kind = GateKind::H;
      g.qubits = {q};
      gates.push_back(g);
    }
  };
  h_layer();
  for (int q = 0; q + 1 < n; ++q) {
    GateSpec g;
    g.kind = GateKind::CNOT;
    g.qubits = {q, q + 1};
    gates.push_back(g);
  }
  h_layer();
  for (auto& g : gates) g.logit = sign(rng) ? logit(rng) : -logit(rng);
  return Scaffold(n, std::move(gates));
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Matrix relaxed(const Matrix& g, double s) { return (1.0 - s) * identity(g.rows()) + s * g; }

double op_norm(const Matrix& m) { return Eigen::JacobiSVD<Matrix>(m).singularValues()(0); }

CheckResult check(std::string name, double value, double tol, std::size_t cases) {
  return {std::move(name), value <= tol, value, tol, cases};
}

// |Tr(Ut^dagger U)|^2 / d^2 as a function of one switch.
double fidelity_at(const Scaffold& sc, const Matrix& target, std::size_t slot, double si) {
  Eigen::VectorXd s = sc.switches();
  s(slot) = si;
  return fidelity_predicate(forward_unitary(sc, s, sc.angles()), target);
}

}  // namespace

SuiteReport verify_theory(std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SuiteReport rep;

  {
    double worst = 0.0;
    std::size_t cases = 0;
    for (std::size_t dim : {2, 4, 8})
      for (int trial = 0; trial < 20; ++trial) {
        const Matrix g = random_unitary(dim, rng);
        const Matrix id = identity(dim);
        for (int k = 1; k <= 9; ++k) {
          const double s = 0.1 * k;
          const Matrix gt = relaxed(g, s);
          const Matrix dev = gt.adjoint() * gt - id - s * (1 - s) * (g + g.adjoint() - 2.0 * id);
          worst = std::max(worst, dev.cwiseAbs().maxCoeff());
          ++cases;
        }
      }
    rep.checks.push_back(check("norm-deviation identity", worst, 1e-12, cases));
  }
  {
    double worst = -1.0;
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t dim = std::size_t{2} << (trial % 3);
      const Matrix g = random_unitary(dim, rng);
      const double s = unit(rng);
      const Matrix gt = relaxed(g, s);
      const double lhs = op_norm(gt.adjoint() * gt - identity(dim));
      const double mid = s * (1 - s) * op_norm(g + g.adjoint() - 2.0 * identity(dim));
      worst = std::max({worst, lhs - mid, mid - 4 * s * (1 - s)});
    }
    rep.checks.push_back(check("operator-norm bound (excess over 4s(1-s))", std::max(worst, 0.0), 1e-12, 200));
  }
  {
    double worst = -1.0;
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 1 + trial % 4;
      Scaffold sc = random_scaffold(n, 4 + trial % 9, rng);
      const Eigen::VectorXd s = sc.switches();
      const State psi = forward_state(sc);
      double bound = 1.0;
      for (Eigen::Index i = 0; i < s.size(); ++i) bound *= 1.0 + 4 * s(i) * (1 - s(i));
      worst = std::max(worst, std::abs(psi.squaredNorm() - 1.0) - (bound - 1.0));
    }
    rep.checks.push_back(check("cascade bound (excess)", std::max(worst, 0.0), 1e-12, 50));
  }
  {
    double worst = 0.0;
    std::size_t cases = 0;
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 1 + trial % 3;
      Scaffold sc = random_scaffold(n, 6, rng);
      const Matrix target = random_unitary(sc.dim(), rng);
      for (std::size_t slot = 0; slot < sc.size(); ++slot) {
        const double f0 = fidelity_at(sc, target, slot, 0.0);
        const double fh = fidelity_at(sc, target, slot, 0.5);
        const double f1 = fidelity_at(sc, target, slot, 1.0);
        // Lagrange interpolant through 0, 1/2, 1 evaluated at 1/4.
        const double predicted = 0.375 * f0 + 0.75 * fh - 0.125 * f1;
        worst = std::max(worst, std::abs(predicted - fidelity_at(sc, target, slot, 0.25)));
        ++cases;
      }
    }
    rep.checks.push_back(check("implicit binarization quadratic fit", worst, 1e-10, cases));
  }
  {
    double worst = 0.0;
    std::size_t cases = 0;
    for (int trial = 0; trial < 10; ++trial) {
      Scaffold sc = random_scaffold(2, 6, rng);
      for (std::size_t k = 0; k < sc.size(); ++k) {
        const double th = sc.angles()(k);
        const Matrix expected = sc.gate(k, th) - identity(sc.gate(k, th).rows());
        for (double s : {0.05, 0.3, 0.7, 0.95}) {
          worst = std::max(worst, (sc.d_effective_ds(k, s, th) - expected).cwiseAbs().maxCoeff());
          ++cases;
        }
      }
    }
    rep.checks.push_back(check("constant Jacobian dG/ds = G - I", worst, 1e-14, cases));
  }
  {
    // dL/dlambda = (dL/ds) s (1 - s), with dL/ds measured at fixed switches.
    double worst = 0.0;
    std::size_t cases = 0;
    for (int trial = 0; trial < 10; ++trial) {
      Scaffold sc = random_scaffold(2, 5, rng);
      AxiomSet ax;
      ax.has_target = true;
      ax.target = random_unitary(sc.dim(), rng);
      ax.w_fid = 1.0;
      const Eigen::VectorXd s = sc.switches();
      const Evaluation ev = evaluate(sc, s, sc.angles(), ax);
      for (std::size_t k = 0; k < sc.size(); ++k) {
        // The loss is quadratic in s_k, so a wide central difference is exact up to rounding.
        const double h = 0.05;
        auto at = [&](double off) {
          Eigen::VectorXd sx = s;
          sx(k) += off;
          return evaluate(sc, sx, sc.angles(), ax).loss.total;
        };
        const double ds_fd = (at(h) - at(-h)) / (2 * h);
        const double fac = s(k) * (1 - s(k));
        worst = std::max(worst, std::abs(ev.grad.dlambda(k) - ds_fd * fac) / std::max(std::abs(ds_fd * fac), 1e-8));
        ++cases;
      }
    }
    rep.checks.push_back(check("structural gradient factorization", worst, 1e-9, cases));
  }
  rep.seconds = seconds_since(t0);
  return rep;
}

SuiteReport verify_gradients(std::uint64_t seed, int scaffolds) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(seed);
  SuiteReport rep;

  struct Term {
    const char* name;
    double tol;
    double worst = 0.0;
    std::size_t cases = 0;
  };
  Term terms[] = {{"fidelity", 1e-5}, {"energy", 1e-5}, {"simplicity", 1e-5}, {"robustness", 1e-5},
                  {"entanglement", 1e-4}};

  std::size_t skipped_degenerate = 0;
  for (int trial = 0; trial < scaffolds; ++trial) {
    const int n = 1 + trial % 4;
    Scaffold sc = random_scaffold(n, 2 + trial % 11, rng);
    const std::size_t d = sc.dim();
    Matrix herm = random_unitary(d, rng);
    herm = (herm + herm.adjoint()).eval() * 0.5;
    std::vector<int> keep;
    for (int q = 0; q < std::max(1, n / 2); ++q) keep.push_back(q);

    for (int t = 0; t < 5; ++t) {
      if (t == 4 && n < 2) continue;
      AxiomSet ax;
      switch (t) {
        case 0: {
          // A reachable target keeps the fidelity, and hence the gradient, O(1).
          Eigen::VectorXd s_t = sc.switches(), th_t = sc.angles();
          for (Eigen::Index i = 0; i < s_t.size(); ++i) {
            s_t(i) = s_t(i) > 0.5 ? 1.0 : 0.0;
            th_t(i) += std::normal_distribution<double>(0.0, 0.1)(rng);
          }
          ax.has_target = true;
          ax.target = forward_unitary(sc, s_t, th_t);
          ax.w_fid = 1.0;
          break;
        }
        case 1:
          ax.has_hamiltonian = true;
          ax.hamiltonian = herm;
          ax.w_energy = 1.0;
          break;
        case 2:
          ax.has_hamiltonian = true;
          ax.hamiltonian = herm;
          ax.w_simp = 1.0;
          ax.simp_mode = trial % 2 ? SimplicityMode::Linear : SimplicityMode::Exponential;
          break;
        case 3:
          ax.has_hamiltonian = true;
          ax.hamiltonian = herm;
          ax.w_rob = 1.0;
          ax.channels = {identity(d), embed(pauli_matrix('X'), {n - 1}, n), embed(pauli_matrix('Z'), {0}, n)};
          break;
        default:
          ax.has_hamiltonian = true;
          ax.hamiltonian = herm;
          ax.w_ent = 1.0;
          ax.ent_keep = keep;
          ax.ent_k = 0.7;
          break;
      }
      if (t == 4) {
        // Analytic entanglement gradients need a non-degenerate reduced spectrum.
        const Matrix rho = reduced_density(forward_state(sc), keep, n);
        if (Eigen::SelfAdjointEigenSolver<Matrix>(rho).eigenvalues().minCoeff() <= 1e-8) {
          ++skipped_degenerate;
          continue;
        }
      }
      auto loss = [&ax](const Scaffold& probe) {
        EvalOptions o;
        o.want_gradient = false;
        return grad_total(probe, ax, o).loss.total;
      };
      auto grad = [&ax](const Scaffold& probe) { return grad_total(probe, ax).grad; };
      const FdReport fd = finite_difference_check(sc, loss, grad, 1e-3, 1e-8, FdStencil::Richardson);
      terms[t].worst = std::max(terms[t].worst, fd.max_rel_error);
      ++terms[t].cases;
    }
  }
  for (const auto& t : terms) rep.checks.push_back(check(t.name, t.worst, t.tol, t.cases));
  rep.notes.push_back("entanglement: " + std::to_string(skipped_degenerate) +
                      " scaffold(s) skipped, reduced spectrum within 1e-8 of zero");
  rep.seconds = seconds_since(t0);
  return rep;
}

std::string format_report(const SuiteReport& r) {
  std::ostringstream os;
  char line[256];
  for (const auto& c : r.checks) {
    std::snprintf(line, sizeof line, "%-4s  %-44s  worst=%.3e  tol=%.0e  cases=%zu\n", c.pass ? "PASS" : "FAIL",
                  c.name.c_str(), c.value, c.tolerance, c.cases);
    os << line;
  }
  for (const auto& note : r.notes) os << "      " << note << '\n';
  std::snprintf(line, sizeof line, "%zu checks, %s, %.2f s\n", r.checks.size(), r.all_pass() ? "all passed" : "FAILED",
                r.seconds);
  os << line;
  return os.str();
}

}  // namespace dlp
