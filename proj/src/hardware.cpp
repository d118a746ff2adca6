#include "dlp/hardware.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <queue>

namespace dlp {

namespace {

double unit_uniform(CountingRng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

const Matrix& single_pauli(int k) {
  static const Matrix p[4] = {pauli_matrix('I'), pauli_matrix('X'), pauli_matrix('Y'), pauli_matrix('Z')};
  return p[k];
}

}  // namespace

Edge make_edge(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

bool CouplingMap::adjacent(int a, int b) const {
  return std::find(edges.begin(), edges.end(), make_edge(a, b)) != edges.end();
}

std::vector<int> CouplingMap::shortest_path(int a, int b) const {
  std::vector<int> prev(static_cast<std::size_t>(n), -1);
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::queue<int> q;
  q.push(a);
  seen[a] = true;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    if (u == b) break;
    for (int v = 0; v < n; ++v)
      if (!seen[v] && adjacent(u, v)) {
        seen[v] = true;
        prev[v] = u;
        q.push(v);
      }
  }
  if (!seen[b]) return {};
  std::vector<int> path;
  for (int v = b; v != -1; v = prev[v]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

int CouplingMap::distance(int a, int b) const {
  const auto p = shortest_path(a, b);
  return p.empty() ? -1 : static_cast<int>(p.size()) - 1;
}

void CouplingMap::validate() const {
  for (auto [a, b] : edges)
    if (a < 0 || b < 0 || a >= n || b >= n || a == b) throw ValidationError("coupling map edge out of range");
  if (native_cost < 0 || single_qubit_cost < 0 || penalty < 0 || swap_cost < 0)
    throw ValidationError("coupling map costs must be >= 0");
}

CouplingMap linear_map(int n) {
  CouplingMap m;
  m.n = n;
  for (int i = 0; i + 1 < n; ++i) m.edges.push_back({i, i + 1});
  return m;
}

bool is_native(const GateSpec& g, const CouplingMap& map) {
  if (g.qubits.size() < 2) return true;
  for (std::size_t i = 0; i + 1 < g.qubits.size(); ++i)
    if (!map.adjacent(g.qubits[i], g.qubits[i + 1])) return false;
  return true;
}

double gate_cost(const GateSpec& g, const CouplingMap& map) {
  if (g.qubits.size() < 2) return map.single_qubit_cost;
  if (is_native(g, map)) return map.native_cost;
  if (map.policy == PenaltyPolicy::Fixed) return map.penalty;
  int extra = 0;
  for (std::size_t i = 0; i + 1 < g.qubits.size(); ++i) {
    const int d = map.distance(g.qubits[i], g.qubits[i + 1]);
    if (d < 0) return std::numeric_limits<double>::infinity();
    extra += d - 1;
  }
  return map.native_cost + 2.0 * extra * map.swap_cost;
}

DiscreteCircuit compile_native(const DiscreteCircuit& c, const CouplingMap& map) {
  DiscreteCircuit flat = flatten(c);
  DiscreteCircuit out;
  out.n = c.n;
  auto push = [&](GateSpec g, int prov) {
    out.gates.push_back(std::move(g));
    out.provenance.push_back(prov);
  };
  auto push_swap = [&](int a, int b, int prov) {
    GateSpec cx;
    cx.kind = GateKind::CNOT;
    cx.label = "swap";
    for (auto qs : {std::vector<int>{a, b}, std::vector<int>{b, a}, std::vector<int>{a, b}}) {
      cx.qubits = qs;
      push(cx, prov);
    }
  };
  for (std::size_t i = 0; i < flat.gates.size(); ++i) {
    const GateSpec& g = flat.gates[i];
    const int prov = flat.provenance[i];
    if (g.qubits.size() != 2 || map.adjacent(g.qubits[0], g.qubits[1])) {
      if (g.kind == GateKind::SWAP)
        push_swap(g.qubits[0], g.qubits[1], prov);
      else
        push(g, prov);
      continue;
    }
    const std::vector<int> path = map.shortest_path(g.qubits[0], g.qubits[1]);
    if (path.size() < 2) throw ValidationError("compile_native: qubits not connected");
    // Move the first qubit's state next to the second and back again.
    for (std::size_t j = 0; j + 2 < path.size(); ++j) push_swap(path[j], path[j + 1], prov);
    GateSpec moved = g;
    moved.qubits = {path[path.size() - 2], g.qubits[1]};
    if (moved.kind == GateKind::SWAP)
      push_swap(moved.qubits[0], moved.qubits[1], prov);
    else
      push(moved, prov);
    for (std::size_t j = path.size() - 2; j-- > 0;) push_swap(path[j], path[j + 1], prov);
  }
  return out;
}

CountingRng::CountingRng(std::initializer_list<std::uint64_t> seeds) {
  std::vector<std::uint32_t> words;
  for (auto s : seeds) {
    words.push_back(static_cast<std::uint32_t>(s));
    words.push_back(static_cast<std::uint32_t>(s >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  eng_.seed(seq);
}

double NoiseProfile::error_at(Edge e, int cycle) const {
  auto it = error.find(e);
  if (it == error.end() || it->second.empty()) return 0.0;
  return it->second[std::clamp(cycle, 0, static_cast<int>(it->second.size()) - 1)];
}

double NoiseProfile::cost_at(Edge e, int cycle) const {
  auto it = cost.find(e);
  if (it == cost.end() || it->second.empty()) return 1.0;
  return it->second[std::clamp(cycle, 0, static_cast<int>(it->second.size()) - 1)];
}

NoiseProfile drift_profile(std::uint64_t seed, int cycles, const DriftParams& params) {
  if (cycles < 1) throw ValidationError("drift_profile: cycles must be >= 1");
  NoiseProfile prof;
  prof.cycles = cycles;
  std::vector<Edge> edges;
  for (const auto& [e, _] : params.base_error) edges.push_back(e);
  for (const auto& [e, _] : params.base_cost)
    if (!params.base_error.count(e)) edges.push_back(e);
  for (std::size_t idx = 0; idx < edges.size(); ++idx) {
    const Edge e = edges[idx];
    CountingRng rng{seed, static_cast<std::uint64_t>(e.first), static_cast<std::uint64_t>(e.second)};
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double e0 = params.base_error.count(e) ? params.base_error.at(e) : 0.0;
    const double c0 = params.base_cost.count(e) ? params.base_cost.at(e) : 1.0;
    // Per-edge phase offset keeps the periodic terms from moving in lockstep.
    const double phase = 2.0 * M_PI * unit_uniform(rng);
    double walk = 0.0;
    auto& err = prof.error[e];
    auto& cst = prof.cost[e];
    for (int t = 0; t < cycles; ++t) {
      if (t > 0 && params.walk_sigma > 0) walk += params.walk_sigma * gauss(rng);
      const double periodic =
          params.amplitude != 0.0 ? params.amplitude * std::sin(2.0 * M_PI * t / params.period + phase) : 0.0;
      double er = std::clamp(e0 + walk + periodic, 0.0, 1.0);
      double co = c0 + params.cost_per_error * er;
      for (const auto& f : params.failures)
        if (f.edge == e && t >= f.cycle) {
          if (f.error_rate) er = std::clamp(*f.error_rate, 0.0, 1.0);
          if (f.cost) co = *f.cost;
        }
      err.push_back(er);
      cst.push_back(co);
    }
  }
  return prof;
}

Counts backend_sample(const RoutedCircuit& rc, int shots, const NoiseProfile& profile, int cycle, CountingRng& rng) {
  const DiscreteCircuit& c = rc.circuit;
  if (c.n > 12) throw SizeError("backend_sample: more than 12 qubits");
  std::vector<Matrix> unitaries;
  std::vector<double> rates;
  std::size_t two_q = 0;
  for (const auto& g : c.gates) {
    unitaries.push_back(local_unitary(g));
    if (g.qubits.size() == 2) {
      if (two_q >= rc.edges.size()) throw ValidationError("routed circuit '" + rc.name + "' lacks an edge label");
      rates.push_back(profile.error_at(rc.edges[two_q], cycle));
      ++two_q;
    } else {
      rates.push_back(-1.0);
    }
  }
  Counts counts;
  const std::size_t dim = std::size_t{1} << c.n;
  for (int shot = 0; shot < shots; ++shot) {
    State psi = basis_state(c.n);
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
      const auto& q = c.gates[i].qubits;
      apply_local(psi, unitaries[i], q, c.n);
      if (rates[i] < 0) continue;
      // Fixed draw count per two-qubit gate keeps paired streams aligned.
      const double u = unit_uniform(rng);
      const int k = 1 + static_cast<int>(rng() % 15);
      if (u < rates[i]) {
        const Matrix p = kron(single_pauli(k / 4), single_pauli(k % 4));
        apply_local(psi, p, q, c.n);
      }
    }
    double u = unit_uniform(rng) * psi.squaredNorm();
    std::size_t outcome = dim - 1;
    for (std::size_t b = 0; b < dim; ++b) {
      u -= std::norm(psi(b));
      if (u < 0) {
        outcome = b;
        break;
      }
    }
    std::string bits(c.n, '0');
    for (int q = 0; q < c.n; ++q)
      if (bit_of(outcome, q, c.n)) bits[q] = '1';
    ++counts[bits];
  }
  return counts;
}

double ghz_fidelity_estimate(const Counts& counts) {
  long total = 0;
  for (const auto& [_, v] : counts) total += v;
  if (total == 0) throw ValidationError("ghz_fidelity_estimate: empty counts");
  const std::size_t n = counts.begin()->first.size();
  long good = 0;
  auto it0 = counts.find(std::string(n, '0'));
  auto it1 = counts.find(std::string(n, '1'));
  if (it0 != counts.end()) good += it0->second;
  if (it1 != counts.end()) good += it1->second;
  return static_cast<double>(good) / static_cast<double>(total);
}

double path_cost(const RoutedCircuit& rc, const NoiseProfile& profile, int cycle) {
  double c = 0.0;
  for (const auto& e : rc.edges) c = std::max(c, profile.cost_at(e, cycle));
  return c;
}

RouterState::RouterState(std::vector<RoutedCircuit> p, const RouterConfig& cfg) : paths(std::move(p)) {
  if (paths.size() < 2) throw ValidationError("router needs at least two candidate paths");
  logits = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(paths.size()));
  AdamWConfig oc;
  oc.lr = cfg.lr;
  oc.weight_decay = cfg.weight_decay;
  optimizer = AdamW(oc, paths.size());
}

Eigen::VectorXd RouterState::probabilities() const {
  Eigen::VectorXd p = (logits.array() - logits.maxCoeff()).exp();
  return p / p.sum();
}

std::size_t RouterState::best() const {
  Eigen::Index i = 0;
  logits.maxCoeff(&i);
  return static_cast<std::size_t>(i);
}

Eigen::VectorXd router_gradient(const Eigen::VectorXd& probs, const Eigen::VectorXd& losses) {
  const double mean = probs.dot(losses);
  return probs.cwiseProduct(losses.array().matrix() - Eigen::VectorXd::Constant(losses.size(), mean));
}

CycleResult adaptive_cycle(RouterState& router, const NoiseProfile& profile, int cycle, const RouterConfig& cfg,
                           CountingRng& train_rng, CountingRng& eval_rng) {
  const auto m = static_cast<Eigen::Index>(router.paths.size());
  for (int it = 0; it < cfg.iterations; ++it) {
    Eigen::VectorXd losses(m);
    for (Eigen::Index j = 0; j < m; ++j) {
      const double f = ghz_fidelity_estimate(backend_sample(router.paths[j], cfg.shots, profile, cycle, train_rng));
      losses(j) = (1.0 - f) + cfg.cost_weight * path_cost(router.paths[j], profile, cycle);
    }
    const Eigen::VectorXd g = router_gradient(router.probabilities(), losses);
    router.optimizer.step(router.logits, g);
  }
  CycleResult r;
  r.path = router.best();
  r.fidelity = ghz_fidelity_estimate(backend_sample(router.paths[r.path], cfg.shots, profile, cycle, eval_rng));
  router.history.push_back(r.fidelity);
  return r;
}

PairedTrace run_static_vs_adaptive(const std::vector<RoutedCircuit>& paths, const NoiseProfile& profile,
                                   const RouterConfig& cfg, std::uint64_t seed) {
  PairedTrace out;
  for (const auto& p : paths) out.path_names.push_back(p.name);
  RouterState adaptive(paths, cfg);
  {
    // Shared t = 0 optimization for both arms.
    RouterConfig warm = cfg;
    warm.iterations = cfg.warmup_iterations;
    CountingRng train_rng{seed, 0xffffffffull, 1};
    CountingRng eval_rng{seed, 0xffffffffull, 2};
    adaptive_cycle(adaptive, profile, 0, warm, train_rng, eval_rng);
  }
  const RouterState frozen = adaptive;
  const std::size_t static_path = frozen.best();
  const Eigen::VectorXd static_probs = frozen.probabilities();

  auto costs_at = [&](int cycle) {
    std::vector<double> c;
    for (const auto& p : paths) c.push_back(path_cost(p, profile, cycle));
    return c;
  };
  auto efficiency = [&](double f, double c) { return std::max(0.0, f - c / cfg.cost_reference); };

  for (int cycle = 0; cycle < profile.cycles; ++cycle) {
    const std::vector<double> costs = costs_at(cycle);
    {
      CountingRng eval_rng{seed, static_cast<std::uint64_t>(cycle), 2};
      RoutingRow row;
      row.cycle = cycle;
      row.arm = "static";
      row.path = static_path;
      row.fidelity = ghz_fidelity_estimate(backend_sample(paths[static_path], cfg.shots, profile, cycle, eval_rng));
      row.efficiency = efficiency(row.fidelity, costs[static_path]);
      row.probs.assign(static_probs.data(), static_probs.data() + static_probs.size());
      row.costs = costs;
      row.eval_stream_draws = eval_rng.draws();
      out.rows.push_back(row);
    }
    {
      CountingRng train_rng{seed, static_cast<std::uint64_t>(cycle), 1};
      CountingRng eval_rng{seed, static_cast<std::uint64_t>(cycle), 2};
      const CycleResult r = adaptive_cycle(adaptive, profile, cycle, cfg, train_rng, eval_rng);
      RoutingRow row;
      row.cycle = cycle;
      row.arm = "adaptive";
      row.path = r.path;
      row.fidelity = r.fidelity;
      row.efficiency = efficiency(r.fidelity, costs[r.path]);
      const Eigen::VectorXd p = adaptive.probabilities();
      row.probs.assign(p.data(), p.data() + p.size());
      row.costs = costs;
      row.eval_stream_draws = eval_rng.draws();
      out.rows.push_back(row);
    }
  }
  return out;
}

void write_routing_csv(std::ostream& os, const PairedTrace& trace) {
  const std::size_t m = trace.path_names.size();
  auto letter = [](std::size_t j) { return std::string(1, static_cast<char>('A' + j)); };
  os << "cycle,arm,fidelity";
  for (std::size_t j = 0; j < m; ++j) os << ",p_path" << letter(j);
  for (std::size_t j = 0; j < m; ++j) os << ",cost_" << letter(j);
  os << '\n' << std::setprecision(12);
  for (const auto& r : trace.rows) {
    os << r.cycle << ',' << r.arm << ',' << r.fidelity;
    for (double p : r.probs) os << ',' << p;
    for (double c : r.costs) os << ',' << c;
    os << '\n';
  }
}

}  // namespace dlp
