#include "dlp/scenario.hpp"

#include "dlp/qasm.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#ifndef DLP_PRESET_DIR
#define DLP_PRESET_DIR "presets"
#endif

namespace dlp {

using nlohmann::json;

namespace {

std::string join(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError("field '" + where + "': expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, _] : j.items())
    if (!ok.count(k)) throw ConfigError("field '" + join(where, k) + "': unknown key");
}

template <class T>
T get(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError("field '" + join(where, key) + "': missing");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("field '" + join(where, key) + "': wrong type");
  }
}

template <class T>
T get_or(const json& j, const std::string& key, const T& fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  return get<T>(j, key, where);
}

Edge edge_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("field '" + where + "': expected [a, b]");
  try {
    return make_edge(j[0].get<int>(), j[1].get<int>());
  } catch (const json::exception&) {
    throw ConfigError("field '" + where + "': expected integers");
  }
}

json edge_to_json(Edge e) { return json::array({e.first, e.second}); }

std::string interp_name(Interpolation m) { return m == Interpolation::Linear ? "linear" : "geodesic"; }

Interpolation parse_interp(const std::string& s, const std::string& where) {
  if (s == "linear") return Interpolation::Linear;
  if (s == "geodesic") return Interpolation::Geodesic;
  throw ConfigError("field '" + where + "': expected linear or geodesic");
}

std::vector<GateSpec> gates_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError("field '" + where + "': expected an array");
  std::vector<GateSpec> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(gate_from_json(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

json gates_to_json(const std::vector<GateSpec>& gates) {
  json a = json::array();
  for (const auto& g : gates) a.push_back(gate_to_json(g));
  return a;
}

TargetSpec target_from_json(const json& j, const std::string& where) {
  check_keys(j, where, {"type", "n", "hamiltonian", "time", "gates"});
  TargetSpec t;
  t.type = get<std::string>(j, "type", where);
  if (t.type == "qft") {
    t.n = get<int>(j, "n", where);
  } else if (t.type == "hamiltonian_evolution") {
    t.hamiltonian = hamiltonian_from_json(get<json>(j, "hamiltonian", where), join(where, "hamiltonian"));
    t.n = t.hamiltonian.n;
    t.time = get<double>(j, "time", where);
  } else if (t.type == "circuit") {
    t.n = get<int>(j, "n", where);
    t.gates = gates_from_json(get<json>(j, "gates", where), join(where, "gates"));
  } else {
    throw ConfigError("field '" + join(where, "type") + "': expected qft, hamiltonian_evolution or circuit");
  }
  return t;
}

json target_to_json(const TargetSpec& t) {
  json j = {{"type", t.type}};
  if (t.type == "qft") j["n"] = t.n;
  if (t.type == "hamiltonian_evolution") {
    j["hamiltonian"] = hamiltonian_to_json(t.hamiltonian);
    j["time"] = t.time;
  }
  if (t.type == "circuit") {
    j["n"] = t.n;
    j["gates"] = gates_to_json(t.gates);
  }
  return j;
}

CurriculumSpec curriculum_from_json(const json& j, const std::string& where) {
  check_keys(j, where,
             {"kind", "h_easy", "h_hard", "anneal_start", "anneal_end", "switch_epoch", "warmup", "ramp_end",
              "w_simp_final", "ramp_simplicity"});
  CurriculumSpec c;
  const auto kind = get<std::string>(j, "kind", where);
  if (kind == "none") c.kind = CurriculumKind::None;
  else if (kind == "annealing") c.kind = CurriculumKind::Annealing;
  else if (kind == "two_phase") c.kind = CurriculumKind::TwoPhase;
  else if (kind == "soft_prune") c.kind = CurriculumKind::SoftPrune;
  else throw ConfigError("field '" + join(where, "kind") + "': expected none, annealing, two_phase or soft_prune");
  if (c.kind == CurriculumKind::Annealing) {
    c.h_easy = hamiltonian_from_json(get<json>(j, "h_easy", where), join(where, "h_easy"));
    c.h_hard = hamiltonian_from_json(get<json>(j, "h_hard", where), join(where, "h_hard"));
    c.anneal_start = get_or<int>(j, "anneal_start", 0, where);
    c.anneal_end = get<int>(j, "anneal_end", where);
  }
  c.switch_epoch = get_or<int>(j, "switch_epoch", 0, where);
  c.warmup = get_or<int>(j, "warmup", 0, where);
  c.ramp_end = get_or<int>(j, "ramp_end", 0, where);
  c.w_simp_final = get_or<double>(j, "w_simp_final", 0.0, where);
  c.ramp_simplicity = get_or<bool>(j, "ramp_simplicity", false, where);
  try {
    c.validate();
  } catch (const ValidationError& e) {
    throw ConfigError("field '" + where + "': " + e.what());
  }
  return c;
}

json curriculum_to_json(const CurriculumSpec& c) {
  static const char* names[] = {"none", "annealing", "two_phase", "soft_prune"};
  json j = {{"kind", names[static_cast<int>(c.kind)]}};
  if (c.kind == CurriculumKind::Annealing) {
    j["h_easy"] = hamiltonian_to_json(c.h_easy);
    j["h_hard"] = hamiltonian_to_json(c.h_hard);
    j["anneal_start"] = c.anneal_start;
    j["anneal_end"] = c.anneal_end;
    j["ramp_simplicity"] = c.ramp_simplicity;
  }
  j["switch_epoch"] = c.switch_epoch;
  j["warmup"] = c.warmup;
  j["ramp_end"] = c.ramp_end;
  j["w_simp_final"] = c.w_simp_final;
  return j;
}

NoiseChannelSpec noise_from_json(const json& j, const std::string& where) {
  check_keys(j, where, {"mode", "sigma", "target", "shots"});
  NoiseChannelSpec n;
  const auto mode = get<std::string>(j, "mode", where);
  if (mode == "none") n.mode = NoiseMode::None;
  else if (mode == "gaussian_eval") n.mode = NoiseMode::GaussianEval;
  else if (mode == "shot") n.mode = NoiseMode::Shot;
  else throw ConfigError("field '" + join(where, "mode") + "': expected none, gaussian_eval or shot");
  n.sigma = get_or<double>(j, "sigma", 0.0, where);
  const auto target = get_or<std::string>(j, "target", "loss", where);
  if (target == "loss") n.target = NoiseTarget::Loss;
  else if (target == "unitary") n.target = NoiseTarget::Unitary;
  else if (target == "energy") n.target = NoiseTarget::Energy;
  else throw ConfigError("field '" + join(where, "target") + "': expected loss, unitary or energy");
  n.shots = get_or<int>(j, "shots", 1000, where);
  try {
    n.validate();
  } catch (const ValidationError& e) {
    throw ConfigError("field '" + where + "': " + e.what());
  }
  return n;
}

json noise_to_json(const NoiseChannelSpec& n) {
  static const char* modes[] = {"none", "gaussian_eval", "shot"};
  static const char* targets[] = {"loss", "unitary", "energy"};
  return {{"mode", modes[static_cast<int>(n.mode)]},
          {"sigma", n.sigma},
          {"target", targets[static_cast<int>(n.target)]},
          {"shots", n.shots}};
}

CouplingMap coupling_from_json(const json& j, const std::string& where) {
  check_keys(j, where, {"n", "edges", "native_cost", "single_qubit_cost", "policy", "penalty", "swap_cost"});
  CouplingMap m;
  m.n = get<int>(j, "n", where);
  const json edges = get<json>(j, "edges", where);
  if (!edges.is_array()) throw ConfigError("field '" + join(where, "edges") + "': expected an array");
  for (std::size_t i = 0; i < edges.size(); ++i)
    m.edges.push_back(edge_from_json(edges[i], join(where, "edges") + "[" + std::to_string(i) + "]"));
  m.native_cost = get_or<double>(j, "native_cost", 1.0, where);
  m.single_qubit_cost = get_or<double>(j, "single_qubit_cost", 1.0, where);
  const auto policy = get_or<std::string>(j, "policy", "fixed", where);
  if (policy == "fixed") m.policy = PenaltyPolicy::Fixed;
  else if (policy == "swap_roundtrip") m.policy = PenaltyPolicy::SwapRoundtrip;
  else throw ConfigError("field '" + join(where, "policy") + "': expected fixed or swap_roundtrip");
  m.penalty = get_or<double>(j, "penalty", 100.0, where);
  m.swap_cost = get_or<double>(j, "swap_cost", 50.0, where);
  try {
    m.validate();
  } catch (const ValidationError& e) {
    throw ConfigError("field '" + where + "': " + e.what());
  }
  return m;
}

json coupling_to_json(const CouplingMap& m) {
  json edges = json::array();
  for (auto e : m.edges) edges.push_back(edge_to_json(e));
  return {{"n", m.n},
          {"edges", edges},
          {"native_cost", m.native_cost},
          {"single_qubit_cost", m.single_qubit_cost},
          {"policy", m.policy == PenaltyPolicy::Fixed ? "fixed" : "swap_roundtrip"},
          {"penalty", m.penalty},
          {"swap_cost", m.swap_cost}};
}

std::map<Edge, double> edge_values_from_json(const json& j, const std::string& where) {
  std::map<Edge, double> out;
  if (!j.is_array()) throw ConfigError("field '" + where + "': expected an array");
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string w = where + "[" + std::to_string(i) + "]";
    check_keys(j[i], w, {"edge", "value"});
    out[edge_from_json(get<json>(j[i], "edge", w), join(w, "edge"))] = get<double>(j[i], "value", w);
  }
  return out;
}

json edge_values_to_json(const std::map<Edge, double>& m) {
  json a = json::array();
  for (const auto& [e, v] : m) a.push_back({{"edge", edge_to_json(e)}, {"value", v}});
  return a;
}

RoutingConfig routing_from_json(const json& j, const std::string& where) {
  check_keys(j, where, {"cycles", "paths", "drift", "router"});
  RoutingConfig r;
  r.cycles = get<int>(j, "cycles", where);
  const json paths = get<json>(j, "paths", where);
  if (!paths.is_array() || paths.size() < 2) throw ConfigError("field '" + join(where, "paths") + "': need >= 2 paths");
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const std::string w = join(where, "paths") + "[" + std::to_string(i) + "]";
    check_keys(paths[i], w, {"name", "n", "gates", "edges"});
    RoutedCircuit rc;
    rc.name = get<std::string>(paths[i], "name", w);
    rc.circuit.n = get<int>(paths[i], "n", w);
    rc.circuit.gates = gates_from_json(get<json>(paths[i], "gates", w), join(w, "gates"));
    for (std::size_t g = 0; g < rc.circuit.gates.size(); ++g) rc.circuit.provenance.push_back(static_cast<int>(g));
    const json edges = get<json>(paths[i], "edges", w);
    for (std::size_t e = 0; e < edges.size(); ++e)
      rc.edges.push_back(edge_from_json(edges[e], join(w, "edges") + "[" + std::to_string(e) + "]"));
    std::size_t two_q = 0;
    for (const auto& g : rc.circuit.gates) {
      if (g.qubits.size() == 2) ++two_q;
      for (int q : g.qubits)
        if (q < 0 || q >= rc.circuit.n) throw ConfigError("field '" + join(w, "gates") + "': qubit out of range");
    }
    if (two_q != rc.edges.size())
      throw ConfigError("field '" + join(w, "edges") + "': need one edge per two-qubit gate");
    r.paths.push_back(rc);
  }
  const json d = get_or<json>(j, "drift", json::object(), where);
  const std::string dw = join(where, "drift");
  check_keys(d, dw, {"base_error", "base_cost", "walk_sigma", "amplitude", "period", "cost_per_error", "failures"});
  if (d.contains("base_error")) r.drift.base_error = edge_values_from_json(d["base_error"], join(dw, "base_error"));
  if (d.contains("base_cost")) r.drift.base_cost = edge_values_from_json(d["base_cost"], join(dw, "base_cost"));
  r.drift.walk_sigma = get_or<double>(d, "walk_sigma", 0.0, dw);
  r.drift.amplitude = get_or<double>(d, "amplitude", 0.0, dw);
  r.drift.period = get_or<double>(d, "period", 10.0, dw);
  r.drift.cost_per_error = get_or<double>(d, "cost_per_error", 0.0, dw);
  const json fails = get_or<json>(d, "failures", json::array(), dw);
  for (std::size_t i = 0; i < fails.size(); ++i) {
    const std::string w = join(dw, "failures") + "[" + std::to_string(i) + "]";
    check_keys(fails[i], w, {"cycle", "edge", "cost", "error_rate"});
    FailureEvent f;
    f.cycle = get<int>(fails[i], "cycle", w);
    f.edge = edge_from_json(get<json>(fails[i], "edge", w), join(w, "edge"));
    if (fails[i].contains("cost")) f.cost = get<double>(fails[i], "cost", w);
    if (fails[i].contains("error_rate")) f.error_rate = get<double>(fails[i], "error_rate", w);
    r.drift.failures.push_back(f);
  }
  const json ro = get_or<json>(j, "router", json::object(), where);
  const std::string rw = join(where, "router");
  check_keys(ro, rw, {"iterations", "shots", "lr", "cost_weight", "weight_decay", "warmup_iterations", "cost_reference"});
  r.router.iterations = get_or<int>(ro, "iterations", 5, rw);
  r.router.shots = get_or<int>(ro, "shots", 512, rw);
  r.router.lr = get_or<double>(ro, "lr", 0.5, rw);
  r.router.cost_weight = get_or<double>(ro, "cost_weight", 0.5, rw);
  r.router.weight_decay = get_or<double>(ro, "weight_decay", 0.0, rw);
  r.router.warmup_iterations = get_or<int>(ro, "warmup_iterations", 5, rw);
  r.router.cost_reference = get_or<double>(ro, "cost_reference", 100.0, rw);
  if (r.cycles < 1 || r.router.shots < 1 || r.router.iterations < 0)
    throw ConfigError("field '" + where + "': cycles and shots must be >= 1");
  return r;
}

json routing_to_json(const RoutingConfig& r) {
  json paths = json::array();
  for (const auto& p : r.paths) {
    json edges = json::array();
    for (auto e : p.edges) edges.push_back(edge_to_json(e));
    paths.push_back({{"name", p.name}, {"n", p.circuit.n}, {"gates", gates_to_json(p.circuit.gates)}, {"edges", edges}});
  }
  json fails = json::array();
  for (const auto& f : r.drift.failures) {
    json fj = {{"cycle", f.cycle}, {"edge", edge_to_json(f.edge)}};
    if (f.cost) fj["cost"] = *f.cost;
    if (f.error_rate) fj["error_rate"] = *f.error_rate;
    fails.push_back(fj);
  }
  return {{"cycles", r.cycles},
          {"paths", paths},
          {"drift",
           {{"base_error", edge_values_to_json(r.drift.base_error)},
            {"base_cost", edge_values_to_json(r.drift.base_cost)},
            {"walk_sigma", r.drift.walk_sigma},
            {"amplitude", r.drift.amplitude},
            {"period", r.drift.period},
            {"cost_per_error", r.drift.cost_per_error},
            {"failures", fails}}},
          {"router",
           {{"iterations", r.router.iterations},
            {"shots", r.router.shots},
            {"lr", r.router.lr},
            {"cost_weight", r.router.cost_weight},
            {"weight_decay", r.router.weight_decay},
            {"warmup_iterations", r.router.warmup_iterations},
            {"cost_reference", r.router.cost_reference}}}};
}

}  // namespace

json hamiltonian_to_json(const HamiltonianSpec& h) {
  json terms = json::array();
  for (const auto& t : h.terms) terms.push_back(json::array({t.paulis, t.coeff}));
  return {{"n", h.n}, {"terms", terms}};
}

HamiltonianSpec hamiltonian_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError("field '" + where + "': expected an object");
  if (j.contains("builtin")) {
    check_keys(j, where, {"builtin", "n", "J", "h", "J1", "J2", "scale"});
    const auto name = get<std::string>(j, "builtin", where);
    const int n = get<int>(j, "n", where);
    double a = 1.0, b = 1.0;
    if (name == "j1j2_chain") {
      a = get_or<double>(j, "J1", 1.0, where);
      b = get_or<double>(j, "J2", 0.5, where);
    } else if (name == "x_field") {
      a = get_or<double>(j, "h", 1.0, where);
    } else {
      a = get_or<double>(j, "J", 1.0, where);
      b = get_or<double>(j, "h", 1.0, where);
    }
    try {
      return scaled(builtin_hamiltonian(name, n, a, b), get_or<double>(j, "scale", 1.0, where));
    } catch (const ValidationError& e) {
      throw ConfigError("field '" + join(where, "builtin") + "': " + e.what());
    }
  }
  check_keys(j, where, {"n", "terms"});
  HamiltonianSpec h;
  h.n = get<int>(j, "n", where);
  const json terms = get<json>(j, "terms", where);
  if (!terms.is_array()) throw ConfigError("field '" + join(where, "terms") + "': expected an array");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string w = join(where, "terms") + "[" + std::to_string(i) + "]";
    try {
      PauliTerm t{terms[i].at(1).get<double>(), terms[i].at(0).get<std::string>()};
      if (static_cast<int>(t.paulis.size()) != h.n) throw ConfigError("field '" + w + "': Pauli string length");
      h.terms.push_back(t);
    } catch (const json::exception&) {
      throw ConfigError("field '" + w + "': expected [\"PAULIS\", coefficient]");
    }
  }
  return h;
}

json gate_to_json(const GateSpec& g) {
  json j = {{"gate", kind_name(g.kind)}, {"qubits", g.qubits}};
  if (is_parameterized(g.kind)) {
    j["angle"] = g.angle;
    j["trainable"] = g.trainable_angle;
  }
  j["cost"] = g.cost;
  if (g.logit) j["logit"] = *g.logit;
  if (g.frozen) j["frozen"] = true;
  if (!g.label.empty()) j["label"] = g.label;
  if (g.kind == GateKind::HAM_EVO) j["hamiltonian"] = hamiltonian_to_json(g.ham);
  if (g.kind == GateKind::FROZEN) {
    j["expansion"] = gates_to_json(g.expansion);
    json m = json::array();
    for (Eigen::Index r = 0; r < g.matrix.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < g.matrix.cols(); ++c) row.push_back({g.matrix(r, c).real(), g.matrix(r, c).imag()});
      m.push_back(row);
    }
    j["matrix"] = m;
  }
  return j;
}

GateSpec gate_from_json(const json& j, const std::string& where) {
  check_keys(j, where,
             {"gate", "qubits", "angle", "trainable", "cost", "logit", "frozen", "label", "hamiltonian", "expansion",
              "matrix"});
  GateSpec g;
  try {
    g.kind = parse_kind(get<std::string>(j, "gate", where));
  } catch (const ConfigError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ConfigError("field '" + join(where, "gate") + "': " + e.what());
  }
  g.qubits = get<std::vector<int>>(j, "qubits", where);
  g.angle = get_or<double>(j, "angle", 0.0, where);
  g.trainable_angle = get_or<bool>(j, "trainable", true, where);
  g.cost = get_or<double>(j, "cost", 1.0, where);
  if (j.contains("logit")) g.logit = get<double>(j, "logit", where);
  g.frozen = get_or<bool>(j, "frozen", false, where);
  g.label = get_or<std::string>(j, "label", "", where);
  if (g.kind == GateKind::HAM_EVO)
    g.ham = hamiltonian_from_json(get<json>(j, "hamiltonian", where), join(where, "hamiltonian"));
  if (g.kind == GateKind::FROZEN) {
    g.expansion = gates_from_json(get_or<json>(j, "expansion", json::array(), where), join(where, "expansion"));
    if (j.contains("matrix")) {
      const json m = j["matrix"];
      const auto d = static_cast<Eigen::Index>(m.size());
      g.matrix = Matrix(d, d);
      try {
        for (Eigen::Index r = 0; r < d; ++r)
          for (Eigen::Index c = 0; c < d; ++c) g.matrix(r, c) = cplx(m[r][c][0].get<double>(), m[r][c][1].get<double>());
      } catch (const json::exception&) {
        throw ConfigError("field '" + join(where, "matrix") + "': expected rows of [re, im]");
      }
    } else {
      g.matrix = simulate(DiscreteCircuit{static_cast<int>(g.qubits.size()), g.expansion, {}});
    }
  }
  if (arity(g.kind) != 0 && static_cast<int>(g.qubits.size()) != arity(g.kind))
    throw ConfigError("field '" + join(where, "qubits") + "': " + kind_name(g.kind) + " acts on " +
                      std::to_string(arity(g.kind)) + " qubit(s)");
  return g;
}

Scenario parse_scenario(const json& j) {
  check_keys(j, "",
             {"name", "kind", "seed", "seeds", "n_qubits", "interpolation", "slots", "init", "axioms", "epochs",
              "optimizer", "curriculum", "noise", "selector", "gumbel", "hardware", "tiling", "routing", "variants",
              "extract_threshold", "description"});
  Scenario s;
  s.source = j;
  s.name = get<std::string>(j, "name", "");
  s.kind = get_or<std::string>(j, "kind", "train", "");
  s.seed = get_or<std::uint64_t>(j, "seed", 0, "");
  s.seeds = get_or<std::vector<std::uint64_t>>(j, "seeds", {}, "");
  s.train.epochs = get_or<int>(j, "epochs", 0, "");
  if (s.train.epochs < 0) throw ConfigError("field 'epochs': must be >= 0");
  if (j.contains("variants")) {
    const json v = j["variants"];
    if (!v.is_array()) throw ConfigError("field 'variants': expected an array");
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string w = "variants[" + std::to_string(i) + "]";
      check_keys(v[i], w, {"label", "patch"});
      s.variants.push_back({get<std::string>(v[i], "label", w), get<json>(v[i], "patch", w)});
    }
  }
  if (s.kind == "routing") {
    s.routing = routing_from_json(get<json>(j, "routing", ""), "routing");
    return s;
  }
  if (s.kind != "train") throw ConfigError("field 'kind': expected train or routing");

  s.n = get<int>(j, "n_qubits", "");
  if (s.n < 1 || s.n > 12) throw ConfigError("field 'n_qubits': must be in 1..12");
  s.interpolation = parse_interp(get_or<std::string>(j, "interpolation", "linear", ""), "interpolation");
  s.slots = gates_from_json(get<json>(j, "slots", ""), "slots");
  for (std::size_t i = 0; i < s.slots.size(); ++i)
    for (int q : s.slots[i].qubits)
      if (q < 0 || q >= s.n) throw ConfigError("field 'slots[" + std::to_string(i) + "].qubits': qubit out of range");
  s.extract_threshold = get_or<double>(j, "extract_threshold", 0.5, "");

  const json init = get_or<json>(j, "init", json::object(), "");
  check_keys(init, "init", {"policy", "logit", "angle_noise"});
  const auto pol = get_or<std::string>(init, "policy", "biased_off", "init");
  if (pol == "biased_off") s.init.policy = InitPolicy::BiasedOff;
  else if (pol == "all_on") s.init.policy = InitPolicy::AllOn;
  else throw ConfigError("field 'init.policy': expected biased_off or all_on");
  s.init.logit = get_or<double>(init, "logit", s.init.policy == InitPolicy::AllOn ? 2.0 : -2.0, "init");
  s.init.angle_noise = get_or<double>(init, "angle_noise", 0.0, "init");

  const json ax = get<json>(j, "axioms", "");
  check_keys(ax, "axioms", {"target", "hamiltonian", "weights", "simplicity_mode", "alpha", "entanglement", "channels"});
  if (ax.contains("target")) s.axioms.target = target_from_json(ax["target"], "axioms.target");
  if (ax.contains("hamiltonian")) s.axioms.hamiltonian = hamiltonian_from_json(ax["hamiltonian"], "axioms.hamiltonian");
  const json w = get_or<json>(ax, "weights", json::object(), "axioms");
  check_keys(w, "axioms.weights", {"fidelity", "energy", "simplicity", "entanglement", "robustness"});
  s.axioms.w_fid = get_or<double>(w, "fidelity", 0.0, "axioms.weights");
  s.axioms.w_energy = get_or<double>(w, "energy", 0.0, "axioms.weights");
  s.axioms.w_simp = get_or<double>(w, "simplicity", 0.0, "axioms.weights");
  s.axioms.w_ent = get_or<double>(w, "entanglement", 0.0, "axioms.weights");
  s.axioms.w_rob = get_or<double>(w, "robustness", 0.0, "axioms.weights");
  for (const auto& [key, value] : w.items())
    if (!(value.get<double>() >= 0.0)) throw ConfigError("field 'axioms.weights." + key + "': must be >= 0");
  const auto sm = get_or<std::string>(ax, "simplicity_mode", "linear", "axioms");
  if (sm == "linear") s.axioms.simp_mode = SimplicityMode::Linear;
  else if (sm == "exponential") s.axioms.simp_mode = SimplicityMode::Exponential;
  else throw ConfigError("field 'axioms.simplicity_mode': expected linear or exponential");
  s.axioms.alpha = get_or<double>(ax, "alpha", 0.1, "axioms");
  if (ax.contains("entanglement")) {
    const json e = ax["entanglement"];
    check_keys(e, "axioms.entanglement", {"keep", "k"});
    s.axioms.ent_keep = get<std::vector<int>>(e, "keep", "axioms.entanglement");
    s.axioms.ent_k = get_or<double>(e, "k", 1.0, "axioms.entanglement");
  }
  if (ax.contains("channels")) s.axioms.channels = gates_from_json(ax["channels"], "axioms.channels");

  const json opt = get_or<json>(j, "optimizer", json::object(), "");
  check_keys(opt, "optimizer", {"lr", "lr_theta", "beta1", "beta2", "eps", "weight_decay"});
  s.train.optimizer.lr = get_or<double>(opt, "lr", 0.01, "optimizer");
  s.train.optimizer.lr_theta = get_or<double>(opt, "lr_theta", -1.0, "optimizer");
  s.train.optimizer.beta1 = get_or<double>(opt, "beta1", 0.9, "optimizer");
  s.train.optimizer.beta2 = get_or<double>(opt, "beta2", 0.999, "optimizer");
  s.train.optimizer.eps = get_or<double>(opt, "eps", 1e-8, "optimizer");
  s.train.optimizer.weight_decay = get_or<double>(opt, "weight_decay", 0.0, "optimizer");
  if (!(s.train.optimizer.lr > 0)) throw ConfigError("field 'optimizer.lr': must be > 0");

  if (j.contains("curriculum")) s.train.curriculum = curriculum_from_json(j["curriculum"], "curriculum");
  if (j.contains("noise")) s.train.noise = noise_from_json(j["noise"], "noise");
  const auto sel = get_or<std::string>(j, "selector", "sigmoid", "");
  if (sel == "sigmoid") s.train.selector = Selector::Sigmoid;
  else if (sel == "gumbel") s.train.selector = Selector::Gumbel;
  else throw ConfigError("field 'selector': expected sigmoid or gumbel");
  if (j.contains("gumbel")) {
    const json g = j["gumbel"];
    check_keys(g, "gumbel", {"tau", "tau_final", "hard"});
    s.train.gumbel.tau = get_or<double>(g, "tau", 1.0, "gumbel");
    s.train.gumbel.tau_final = get_or<double>(g, "tau_final", s.train.gumbel.tau, "gumbel");
    s.train.gumbel.hard = get_or<bool>(g, "hard", false, "gumbel");
    if (!(s.train.gumbel.tau > 0 && s.train.gumbel.tau_final > 0)) throw ConfigError("field 'gumbel.tau': must be > 0");
  }
  if (j.contains("hardware")) {
    const json h = j["hardware"];
    check_keys(h, "hardware", {"coupling", "assign_costs"});
    HardwareConfig hc;
    hc.coupling = coupling_from_json(get<json>(h, "coupling", "hardware"), "hardware.coupling");
    hc.assign_costs = get_or<bool>(h, "assign_costs", true, "hardware");
    if (hc.coupling.n != s.n) throw ConfigError("field 'hardware.coupling.n': must equal n_qubits");
    s.hardware = hc;
  }
  if (j.contains("tiling")) {
    const json t = j["tiling"];
    check_keys(t, "tiling", {"n_total", "stride"});
    s.tiling = TilingConfig{get<int>(t, "n_total", "tiling"), get<int>(t, "stride", "tiling")};
  }

  // Semantic checks that need built objects.
  try {
    Scaffold sc(s.n, s.slots, s.interpolation);
    AxiomSet built = build_axioms(s);
    built.validate(s.n);
    if (s.train.curriculum.kind == CurriculumKind::Annealing && s.train.curriculum.h_hard.n != s.n)
      throw ValidationError("annealing Hamiltonians must match n_qubits");
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("scenario '") + s.name + "': " + e.what());
  }
  return s;
}

json scenario_to_json(const Scenario& s) {
  json j = {{"name", s.name}, {"kind", s.kind}, {"seed", s.seed}};
  if (!s.seeds.empty()) j["seeds"] = s.seeds;
  j["epochs"] = s.train.epochs;
  if (!s.variants.empty()) {
    json v = json::array();
    for (const auto& var : s.variants) v.push_back({{"label", var.label}, {"patch", var.patch}});
    j["variants"] = v;
  }
  if (s.kind == "routing") {
    j["routing"] = routing_to_json(*s.routing);
    return j;
  }
  j["n_qubits"] = s.n;
  j["interpolation"] = interp_name(s.interpolation);
  j["slots"] = gates_to_json(s.slots);
  j["extract_threshold"] = s.extract_threshold;
  j["init"] = {{"policy", s.init.policy == InitPolicy::AllOn ? "all_on" : "biased_off"},
               {"logit", s.init.logit},
               {"angle_noise", s.init.angle_noise}};
  json ax;
  if (s.axioms.target) ax["target"] = target_to_json(*s.axioms.target);
  if (s.axioms.hamiltonian) ax["hamiltonian"] = hamiltonian_to_json(*s.axioms.hamiltonian);
  ax["weights"] = {{"fidelity", s.axioms.w_fid},
                   {"energy", s.axioms.w_energy},
                   {"simplicity", s.axioms.w_simp},
                   {"entanglement", s.axioms.w_ent},
                   {"robustness", s.axioms.w_rob}};
  ax["simplicity_mode"] = s.axioms.simp_mode == SimplicityMode::Linear ? "linear" : "exponential";
  ax["alpha"] = s.axioms.alpha;
  if (!s.axioms.ent_keep.empty()) ax["entanglement"] = {{"keep", s.axioms.ent_keep}, {"k", s.axioms.ent_k}};
  if (!s.axioms.channels.empty()) ax["channels"] = gates_to_json(s.axioms.channels);
  j["axioms"] = ax;
  const auto& o = s.train.optimizer;
  j["optimizer"] = {{"lr", o.lr},     {"lr_theta", o.lr_theta}, {"beta1", o.beta1},
                    {"beta2", o.beta2}, {"eps", o.eps},           {"weight_decay", o.weight_decay}};
  j["curriculum"] = curriculum_to_json(s.train.curriculum);
  j["noise"] = noise_to_json(s.train.noise);
  j["selector"] = s.train.selector == Selector::Sigmoid ? "sigmoid" : "gumbel";
  j["gumbel"] = {{"tau", s.train.gumbel.tau}, {"tau_final", s.train.gumbel.tau_final}, {"hard", s.train.gumbel.hard}};
  if (s.hardware) j["hardware"] = {{"coupling", coupling_to_json(s.hardware->coupling)}, {"assign_costs", s.hardware->assign_costs}};
  if (s.tiling) j["tiling"] = {{"n_total", s.tiling->n_total}, {"stride", s.tiling->stride}};
  return j;
}

std::filesystem::path preset_dir() {
  if (const char* env = std::getenv("DLP_PRESET_DIR")) return env;
  return DLP_PRESET_DIR;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  std::error_code ec;
  for (const auto& e : std::filesystem::directory_iterator(preset_dir(), ec))
    if (e.path().extension() == ".json") out.push_back(e.path().stem().string());
  std::sort(out.begin(), out.end());
  return out;
}

Scenario load_scenario(const std::string& preset_or_path) {
  std::filesystem::path p(preset_or_path);
  if (!std::filesystem::exists(p)) p = preset_dir() / (preset_or_path + ".json");
  std::ifstream in(p);
  if (!in) throw ConfigError("no preset or file named '" + preset_or_path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(p.string() + ": " + e.what());
  }
  return parse_scenario(j);
}

Scenario apply_variant(const Scenario& base, const Variant& v) {
  json doc = base.source.is_null() ? scenario_to_json(base) : base.source;
  doc.erase("variants");
  doc.merge_patch(v.patch);
  doc["name"] = base.name + "/" + v.label;
  Scenario out = parse_scenario(doc);
  if (base.source.is_null()) out.seed = base.seed;
  return out;
}

Scenario with_seed(const Scenario& base, std::uint64_t seed) {
  Scenario s = base;
  s.seed = seed;
  s.source["seed"] = seed;
  return s;
}

Matrix target_unitary(const TargetSpec& t) {
  if (t.type == "qft") return qft_target(t.n);
  if (t.type == "hamiltonian_evolution") return trotter_gate(t.hamiltonian, t.time);
  return simulate(DiscreteCircuit{t.n, t.gates, {}});
}

AxiomSet build_axioms(const Scenario& s) {
  AxiomSet ax;
  const auto& a = s.axioms;
  if (a.target) {
    ax.has_target = true;
    ax.target = target_unitary(*a.target);
  }
  if (a.hamiltonian) {
    ax.has_hamiltonian = true;
    ax.hamiltonian = hamiltonian_matrix(*a.hamiltonian);
  } else if (s.train.curriculum.kind == CurriculumKind::Annealing) {
    ax.has_hamiltonian = true;
    ax.hamiltonian = hamiltonian_matrix(s.train.curriculum.h_easy);
  }
  ax.w_fid = a.w_fid;
  ax.w_energy = a.w_energy;
  ax.w_simp = a.w_simp;
  ax.w_ent = a.w_ent;
  ax.w_rob = a.w_rob;
  ax.simp_mode = a.simp_mode;
  ax.alpha = a.alpha;
  ax.ent_keep = a.ent_keep;
  ax.ent_k = a.ent_k;
  for (const auto& c : a.channels) ax.channels.push_back(embed(local_unitary(c), c.qubits, s.n));
  return ax;
}

std::optional<HamiltonianSpec> final_hamiltonian(const Scenario& s) {
  if (s.train.curriculum.kind == CurriculumKind::Annealing) return s.train.curriculum.h_hard;
  return s.axioms.hamiltonian;
}

Scaffold build_scaffold(const Scenario& s) {
  std::vector<GateSpec> slots = s.slots;
  if (s.hardware && s.hardware->assign_costs)
    for (auto& g : slots) g.cost = gate_cost(g, s.hardware->coupling);
  Scaffold sc(s.n, slots, s.interpolation);
  init_logits(sc, s.init.policy, s.init.logit);
  for (std::size_t i = 0; i < slots.size(); ++i)
    if (slots[i].logit) sc.logits()(i) = *slots[i].logit;
  if (s.init.angle_noise > 0) {
    std::mt19937_64 rng(s.seed ^ 0x5eedf00dULL);
    std::normal_distribution<double> gauss(0.0, s.init.angle_noise);
    for (std::size_t i = 0; i < sc.size(); ++i)
      if (sc.angle_trainable(i)) sc.angles()(i) += gauss(rng);
  }
  return sc;
}

json scaffold_to_json(const Scaffold& sc) {
  json slots = json::array();
  for (std::size_t i = 0; i < sc.size(); ++i) {
    GateSpec g = sc.slot(i);
    g.logit = sc.logits()(i);
    g.angle = sc.angles()(i);
    slots.push_back(gate_to_json(g));
  }
  return {{"n_qubits", sc.n()}, {"interpolation", interp_name(sc.mode())}, {"slots", slots}};
}

Scaffold scaffold_from_json(const json& j) {
  check_keys(j, "", {"n_qubits", "interpolation", "slots"});
  const int n = get<int>(j, "n_qubits", "");
  auto slots = gates_from_json(get<json>(j, "slots", ""), "slots");
  Scaffold sc(n, slots, parse_interp(get_or<std::string>(j, "interpolation", "linear", ""), "interpolation"));
  return sc;
}

std::filesystem::path output_root() {
  if (const char* env = std::getenv("DLP_OUTPUT_ROOT")) return env;
  return "runs";
}

namespace {

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json loss_json(const LossBreakdown& l) {
  return {{"total", l.total}, {"fid", l.fid},           {"energy", l.energy},
          {"simp", l.simp},   {"ent", l.ent},           {"rob", l.rob},
          {"fidelity", l.fidelity}, {"energy_value", l.energy_value}};
}

RunResult run_routing(const Scenario& s) {
  RunResult r;
  r.scenario = s;
  const RoutingConfig& rc = *s.routing;
  const NoiseProfile profile = drift_profile(s.seed, rc.cycles, rc.drift);
  r.routing = run_static_vs_adaptive(rc.paths, profile, rc.router, s.seed);
  json arms = json::object();
  for (const auto& row : r.routing->rows) {
    arms[row.arm]["fidelity"].push_back(row.fidelity);
    arms[row.arm]["efficiency"].push_back(row.efficiency);
    arms[row.arm]["path"].push_back(row.path);
    arms[row.arm]["probs"].push_back(row.probs);
    arms[row.arm]["eval_stream_draws"].push_back(row.eval_stream_draws);
  }
  json failures = json::array();
  for (const auto& f : rc.drift.failures) failures.push_back({{"cycle", f.cycle}, {"edge", edge_to_json(f.edge)}});
  r.summary = {{"name", s.name},
               {"kind", "routing"},
               {"seed", s.seed},
               {"cycles", rc.cycles},
               {"paths", r.routing->path_names},
               {"failures", failures},
               {"arms", arms},
               {"efficiency_definition", "max(0, fidelity - path_cost / cost_reference)"}};
  return r;
}

}  // namespace

RunResult run_scenario(const Scenario& s) {
  if (s.kind == "routing") return run_routing(s);
  RunResult r;
  r.scenario = s;
  r.scaffold = build_scaffold(s);
  const AxiomSet ax = build_axioms(s);
  TrainConfig cfg = s.train;
  cfg.seed = s.seed;
  r.trace = train(r.scaffold, ax, cfg);
  r.final_s = final_switches(r.scaffold, cfg.selector);
  r.extraction = extract_discrete(r.scaffold, r.final_s, s.extract_threshold);
  const DiscreteCircuit& circ = r.extraction.circuit;

  json sm;
  sm["name"] = s.name;
  sm["kind"] = "train";
  sm["seed"] = s.seed;
  sm["epochs"] = static_cast<int>(r.trace.records.size());
  sm["aborted"] = r.trace.aborted;
  if (r.trace.aborted) sm["error"] = r.trace.error;
  if (!r.trace.records.empty()) sm["last_epoch_losses"] = loss_json(r.trace.records.back().loss);
  sm["switches"] = vec_json(r.final_s);
  sm["angles"] = vec_json(r.scaffold.angles());
  std::vector<int> survivors(circ.provenance.begin(), circ.provenance.end());
  sm["survivors"] = survivors;
  sm["undecided"] = r.extraction.undecided;
  sm["gate_count"] = circ.gates.size();
  sm["depth"] = circuit_depth(flatten(circ));

  // Final evaluation: noiseless, at the final curriculum point.
  const CurriculumPoint endp = curriculum_weights(s.train.curriculum, std::max(0, s.train.epochs - 1), ax.w_simp);
  AxiomSet final_ax = axioms_at(ax, s.train.curriculum, endp);
  if (auto fh = final_hamiltonian(s)) {
    final_ax.has_hamiltonian = true;
    final_ax.hamiltonian = hamiltonian_matrix(*fh);
  }
  EvalOptions eo;
  eo.want_gradient = false;
  const Evaluation cont = evaluate(r.scaffold, r.final_s, r.scaffold.angles(), final_ax, eo);
  sm["continuous"] = loss_json(cont.loss);

  json ext;
  if (ax.has_target) ext["fidelity"] = fidelity_predicate(simulate(circ), ax.target);
  if (final_ax.has_hamiltonian) {
    State psi = simulate_state(circ);
    psi.normalize();
    const GroundState gs = exact_ground_energy(final_ax.hamiltonian);
    ext["energy"] = expectation(psi, final_ax.hamiltonian);
    ext["ground_energy"] = gs.energy;
    const Matrix proj = ground_projector(final_ax.hamiltonian);
    ext["ground_overlap"] = psi.dot(proj * psi).real();
  }
  if (ax.w_ent > 0) ext["entanglement_loss"] = entanglement_loss(simulate_state(circ), ax.ent_keep, s.n, ax.ent_k);
  sm["extracted"] = ext;

  std::vector<int> rz_slots;
  for (std::size_t i = 0; i < r.scaffold.size(); ++i)
    if (r.scaffold.slot(i).kind == GateKind::RZ) rz_slots.push_back(static_cast<int>(i));
  sm["rz_slots"] = rz_slots;

  if (s.hardware) {
    const CouplingMap& map = s.hardware->coupling;
    int non_native = 0;
    for (const auto& g : circ.gates)
      if (!is_native(g, map)) ++non_native;
    std::vector<int> non_native_slots;
    for (std::size_t i = 0; i < r.scaffold.size(); ++i)
      if (!is_native(r.scaffold.slot(i), map)) non_native_slots.push_back(static_cast<int>(i));
    const DiscreteCircuit compiled = compile_native(circ, map);
    sm["hardware"] = {{"non_native_survivors", non_native},
                      {"non_native_slots", non_native_slots},
                      {"compiled_gate_count", compiled.gates.size()},
                      {"compiled_depth", circuit_depth(compiled)},
                      {"slot_costs", vec_json(slot_costs(r.scaffold))}};
  }
  if (s.tiling) {
    const TiledCircuit t = tile_motif(circ, s.tiling->n_total, s.tiling->stride);
    sm["tiling"] = {{"n_total", s.tiling->n_total},
                    {"stride", s.tiling->stride},
                    {"motif_gates", flatten(circ).gates.size()},
                    {"placements", t.placements},
                    {"gate_count", t.gate_count},
                    {"depth", t.depth}};
  }
  try {
    export_qasm(circ);
    sm["qasm"] = "circuit.qasm";
  } catch (const ValidationError& e) {
    sm["qasm"] = std::string("not exported: ") + e.what();
  }
  r.summary = sm;
  return r;
}

void write_bundle(const RunResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream os(dir / "summary.json");
    os << r.summary.dump(2) << '\n';
  }
  {
    std::ofstream os(dir / "scenario.json");
    os << scenario_to_json(r.scenario).dump(2) << '\n';
  }
  if (r.routing) {
    std::ofstream os(dir / "routing.csv");
    write_routing_csv(os, *r.routing);
    return;
  }
  {
    std::ofstream os(dir / "trace.csv");
    write_trace_csv(os, r.trace, r.scaffold.size());
  }
  {
    std::ofstream os(dir / "scaffold.json");
    os << scaffold_to_json(r.scaffold).dump(2) << '\n';
  }
  {
    std::ofstream os(dir / "circuit.txt");
    os << render_circuit_text(r.scaffold, true) << '\n' << render_circuit_text(r.extraction.circuit);
  }
  try {
    const std::string q = export_qasm(r.extraction.circuit);
    std::ofstream os(dir / "circuit.qasm");
    os << q;
  } catch (const ValidationError&) {
  }
}

std::vector<RunResult> run_sweep(const Scenario& s, unsigned threads) {
  std::vector<Scenario> jobs;
  std::vector<Scenario> bases;
  if (s.variants.empty()) bases.push_back(s);
  for (const auto& v : s.variants) bases.push_back(apply_variant(s, v));
  for (const auto& b : bases) {
    if (s.seeds.empty()) jobs.push_back(b);
    for (auto seed : s.seeds) jobs.push_back(with_seed(b, seed));
  }
  std::vector<RunResult> results(jobs.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(jobs.size()));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs.size());
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        results[i] = run_scenario(jobs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

}  // namespace dlp
