// Runs every preset end to end and prints one PASS/FAIL line per criterion.
#include "dlp/scenario.hpp"
#include "dlp/theory.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

using namespace dlp;
using nlohmann::json;

namespace {

int failures = 0;

void report(bool pass, const std::string& name, const std::string& detail) {
  if (!pass) ++failures;
  std::cout << (pass ? "PASS  " : "FAIL  ") << name << "  " << detail << std::endl;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

struct Timed {
  std::vector<RunResult> runs;
  double seconds = 0.0;
};

Timed sweep(const std::string& preset) {
  const auto t0 = std::chrono::steady_clock::now();
  Timed t;
  t.runs = run_sweep(load_scenario(preset));
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return t;
}

// Everything a bundle would contain, minus wall time.
std::string fingerprint(const RunResult& r) {
  std::ostringstream os;
  os << r.summary.dump() << '\n' << scaffold_to_json(r.scaffold).dump() << '\n';
  write_trace_csv(os, r.trace, r.scaffold.size());
  if (r.routing) write_routing_csv(os, *r.routing);
  return os.str();
}

std::vector<double> switches(const RunResult& r) { return r.summary["switches"].get<std::vector<double>>(); }

int slot_by_label(const RunResult& r, const std::string& label) {
  for (std::size_t i = 0; i < r.scaffold.size(); ++i)
    if (r.scaffold.slot(i).label == label) return static_cast<int>(i);
  throw std::runtime_error("no slot labelled " + label);
}

int slot_on(const RunResult& r, GateKind kind, std::vector<int> qubits) {
  for (std::size_t i = 0; i < r.scaffold.size(); ++i)
    if (r.scaffold.slot(i).kind == kind && r.scaffold.slot(i).qubits == qubits) return static_cast<int>(i);
  throw std::runtime_error("no matching slot");
}

double extracted(const RunResult& r, const std::string& key) { return r.summary["extracted"][key].get<double>(); }

std::string budget(double seconds, double limit) {
  return fmt("%.1f s", seconds) + fmt(" (limit %.0f s)", limit);
}

void theory() {
  const SuiteReport rep = verify_theory();
  std::cout << format_report(rep);
  report(rep.all_pass() && rep.seconds < 10.0, "theory suite",
         std::to_string(rep.checks.size()) + " checks, " + budget(rep.seconds, 10));
}

void gradients() {
  const SuiteReport rep = verify_gradients();
  std::cout << format_report(rep);
  report(rep.all_pass() && rep.seconds < 60.0, "gradient suite",
         std::to_string(rep.checks.size()) + " checks, " + budget(rep.seconds, 60));
}

void exp1(const Timed& t) {
  bool ok = t.seconds < 180.0 * static_cast<double>(t.runs.size());
  std::string detail;
  for (const auto& r : t.runs) {
    const auto s = switches(r);
    const auto survivors = r.summary["survivors"].get<std::vector<int>>();
    double distractor = 0.0;
    for (int i : {1, 3, 5}) distractor = std::max(distractor, s[i]);
    const double f = extracted(r, "fidelity");
    ok = ok && survivors == std::vector<int>{0, 2, 4} && distractor < 0.01 && f > 0.999 &&
         r.scenario.train.epochs <= 4000;
    detail += r.scenario.name.substr(r.scenario.name.find('/') + 1) + ": F=" + fmt("%.6f", f) +
              " max distractor s=" + fmt("%.2e", distractor) + "; ";
  }
  report(ok, "exp1 trotter", detail + budget(t.seconds, 180.0 * static_cast<double>(t.runs.size())));
}

void exp1b(const Timed& t) {
  const RunResult& r = t.runs.front();
  const auto s = switches(r);
  const double cx = std::max(s[slot_by_label(r, "CX04a")], s[slot_by_label(r, "CX04b")]);
  const double hh = std::min(s[slot_by_label(r, "H2a")], s[slot_by_label(r, "H2b")]);
  report(cx < 0.01 && hh > 0.99 && t.seconds < 180, "exp1b cost-aware",
         "CNOT pair max s=" + fmt("%.2e", cx) + ", H pair min s=" + fmt("%.4f", hh) + ", F=" +
             fmt("%.6f", extracted(r, "fidelity")) + ", " + budget(t.seconds, 180));
}

void exp2(const Timed& t) {
  const RunResult& r = t.runs.front();
  const auto s = switches(r);
  const auto on = std::count_if(s.begin(), s.end(), [](double v) { return v > 0.99; });
  const auto off = std::count_if(s.begin(), s.end(), [](double v) { return v < 0.01; });
  const double f = extracted(r, "fidelity");
  report(s.size() == 21 && on == 12 && off == 9 && f > 0.999 && t.seconds < 600, "exp2 qft",
         std::to_string(on) + " on / " + std::to_string(off) + " off, F=" + fmt("%.9f", f) + ", " +
             budget(t.seconds, 600));
}

void exp3(const Timed& t) {
  std::map<std::string, std::vector<double>> energies;
  double ground = 0.0, worst = 0.0;
  for (const auto& r : t.runs) {
    const bool dlp = r.scenario.name.substr(r.scenario.name.find('/') + 1).starts_with("dlp");
    const double e = extracted(r, "energy");
    ground = extracted(r, "ground_energy");
    energies[dlp ? "dlp" : "gumbel"].push_back(e);
    if (dlp) worst = std::max(worst, std::abs(e - ground));
  }
  auto pstd = [](const std::vector<double>& v) {
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size()));
  };
  const double sd = pstd(energies["dlp"]), sg = pstd(energies["gumbel"]);
  report(energies["dlp"].size() == 15 && worst < 0.005 && t.seconds < 1200, "exp3 (a) dlp energy at every shot level",
         "max |E - E0| = " + fmt("%.5f", worst) + " over 15 runs, " + budget(t.seconds, 1200));
  report(energies["gumbel"].size() == 15 && sd < sg, "exp3 (b) variance ordering",
         "std dlp=" + fmt("%.5f", sd) + " < gumbel=" + fmt("%.5f", sg));
}

void exp3b(const Timed& t) {
  const RunResult& r = t.runs.front();
  const auto s = switches(r);
  const double skip = s[slot_on(r, GateKind::CNOT, {0, 2})];
  const double native = std::min(s[slot_on(r, GateKind::CNOT, {0, 1})], s[slot_on(r, GateKind::CNOT, {1, 2})]);
  report(skip < 0.1 && native > 0.9 && t.seconds < 120, "exp3b hardware validation",
         "s(CNOT 0,2)=" + fmt("%.4f", skip) + ", native min s=" + fmt("%.4f", native) + ", " + budget(t.seconds, 120));
}

void exp4(const Timed& t) {
  const RunResult& r = t.runs.front();
  const double skip = switches(r)[slot_on(r, GateKind::CNOT, {0, 2})];
  const double gap = extracted(r, "energy") - extracted(r, "ground_energy");
  const json& tl = r.summary["tiling"];
  const int placements = tl["placements"];
  const int expect = (tl["n_total"].get<int>() - 3) / tl["stride"].get<int>() + 1;
  const bool arithmetic = placements == expect && tl["gate_count"] == placements * tl["motif_gates"].get<int>();
  report(skip > 0.9 && gap < 0.2 && arithmetic && t.seconds < 300, "exp4 j1j2 motif",
         "s(CNOT 0,2)=" + fmt("%.4f", skip) + ", E=" + fmt("%.4f", extracted(r, "energy")) + " (E0 " +
             fmt("%.4f", extracted(r, "ground_energy")) + "), tiling " + std::to_string(placements) + " x " +
             tl["motif_gates"].dump() + " = " + tl["gate_count"].dump() + " gates, " + budget(t.seconds, 300));
}

void exp5(const Timed& t) {
  const RunResult* hw = nullptr;
  const RunResult* st = nullptr;
  for (const auto& r : t.runs) (r.scenario.name.ends_with("/hw") ? hw : st) = &r;
  const int nn_hw = hw->summary["hardware"]["non_native_survivors"], nn_st = st->summary["hardware"]["non_native_survivors"];
  const double ov_hw = extracted(*hw, "ground_overlap"), ov_st = extracted(*st, "ground_overlap");
  const int d_hw = hw->summary["hardware"]["compiled_depth"], d_st = st->summary["hardware"]["compiled_depth"];
  report(nn_hw == 0 && ov_hw >= 0.95 && nn_st >= 1 && ov_st > ov_hw && d_hw < d_st && t.seconds < 300,
         "exp5 hardware-aware trade-off",
         "hw: non-native " + std::to_string(nn_hw) + ", overlap " + fmt("%.4f", ov_hw) + ", depth " +
             std::to_string(d_hw) + "; std: non-native " + std::to_string(nn_st) + ", overlap " + fmt("%.4f", ov_st) +
             ", depth " + std::to_string(d_st) + "; " + budget(t.seconds, 300));
}

int failure_cycle(const RunResult& r) { return r.scenario.routing->drift.failures.front().cycle; }

std::vector<double> arm_series(const RunResult& r, const std::string& arm, const std::string& key) {
  return r.summary["arms"][arm][key].get<std::vector<double>>();
}

void exp6a(const Timed& t) {
  const RunResult& r = t.runs.front();
  const int f = failure_cycle(r);
  const auto st = arm_series(r, "static", "efficiency"), ad = arm_series(r, "adaptive", "efficiency");
  auto mean = [](const std::vector<double>& v, int a, int b) {
    return std::accumulate(v.begin() + a, v.begin() + b, 0.0) / (b - a);
  };
  const int n = static_cast<int>(st.size());
  const double pre_st = mean(st, 0, f), pre_ad = mean(ad, 0, f);
  const double post_st = *std::max_element(st.begin() + f, st.end());
  const double recover = *std::max_element(ad.begin() + f, ad.begin() + std::min(n, f + 6));
  const double later = mean(ad, std::min(n - 1, f + 5), n);
  report(post_st < 0.2 * pre_st && recover >= 0.7 * pre_ad && later >= 0.7 * pre_ad && t.seconds < 300,
         "exp6 (a) catastrophic failure",
         "static pre " + fmt("%.3f", pre_st) + " -> post max " + fmt("%.3f", post_st) + "; adaptive pre " +
             fmt("%.3f", pre_ad) + " -> best within 5 cycles " + fmt("%.3f", recover) + ", later mean " +
             fmt("%.3f", later) + " (" + r.summary["efficiency_definition"].get<std::string>() + "); " +
             budget(t.seconds, 300));
}

void exp6b(const Timed& t) {
  const RunResult& r = t.runs.front();
  const int f = failure_cycle(r);
  const auto st = arm_series(r, "static", "fidelity"), ad = arm_series(r, "adaptive", "fidelity");
  const auto probs = r.summary["arms"]["adaptive"]["probs"];
  int migrated = -1;
  for (int c = f; c < static_cast<int>(probs.size()); ++c)
    if (probs[c][0].get<double>() < 0.05) {
      migrated = c;
      break;
    }
  const double gain = ad.back() - st.back();
  report(gain >= 0.5 && migrated >= 0 && migrated <= f + 2 && t.seconds < 300, "exp6 (b) cycle-3 failure routing",
         "final fidelity adaptive " + fmt("%.3f", ad.back()) + " vs static " + fmt("%.3f", st.back()) + " (+" +
             fmt("%.1f", 100 * gain) + " points), P(A) < 0.05 at cycle " + std::to_string(migrated) +
             " (failure at " + std::to_string(f) + "); " + budget(t.seconds, 300));
}

void morphing(const Timed& t) {
  const RunResult& r = t.runs.front();
  const auto st = arm_series(r, "static", "fidelity"), ad = arm_series(r, "adaptive", "fidelity");
  const double ms = std::accumulate(st.begin(), st.end(), 0.0) / static_cast<double>(st.size());
  const double ma = std::accumulate(ad.begin(), ad.end(), 0.0) / static_cast<double>(ad.size());
  std::cout << "INFO  exp6 morphing drift: mean fidelity adaptive " << fmt("%.3f", ma) << " vs static "
            << fmt("%.3f", ms) << '\n';
}

void s1(const Timed& t) {
  const RunResult& r = t.runs.front();
  const double e = extracted(r, "energy"), e0 = extracted(r, "ground_energy");
  const auto s = switches(r);
  double rz = 0.0;
  for (int i : r.summary["rz_slots"].get<std::vector<int>>()) rz = std::max(rz, s[i]);
  report(std::abs(e - e0) < 0.1 && e < -4.0 && rz < 0.01 && r.scenario.train.epochs <= 10000 && t.seconds < 600,
         "s1 ising vqe",
         "E=" + fmt("%.4f", e) + " (E0 " + fmt("%.4f", e0) + "), max RZ s=" + fmt("%.2e", rz) + ", " +
             budget(t.seconds, 600));
}

void s2(const Timed& t) {
  const RunResult& r = t.runs.front();
  const auto s = switches(r);
  std::vector<int> layers;
  for (std::size_t i = 0; i < r.scaffold.size(); ++i)
    if (r.scaffold.slot(i).kind == GateKind::HAM_EVO) layers.push_back(static_cast<int>(i));
  const int e1 = r.scenario.train.curriculum.switch_epoch;
  const double pre = r.trace.records.at(e1 - 1).loss.energy_value;
  const double post = extracted(r, "energy");
  const bool p3 = s[layers[4]] < 0.05 && s[layers[5]] < 0.05;
  bool kept = true;
  for (int k = 0; k < 4; ++k) kept = kept && s[layers[k]] > 0.5;
  const double rel = std::abs(post - pre) / std::abs(pre);
  report(layers.size() == 6 && p3 && kept && rel < 0.01 && t.seconds < 300, "s2 qaoa depth",
         "p=3 switches " + fmt("%.4f", s[layers[4]]) + "/" + fmt("%.4f", s[layers[5]]) + ", phase-1 E " +
             fmt("%.4f", pre) + " -> pruned E " + fmt("%.4f", post) + " (" + fmt("%.3f", 100 * rel) + "%), " +
             budget(t.seconds, 300));
}

}  // namespace

int main() {
  try {
    theory();
    gradients();

    const std::vector<std::string> presets = preset_names();
    std::map<std::string, Timed> first;
    for (const auto& p : presets) first[p] = sweep(p);

    exp1(first["exp1_trotter"]);
    exp1b(first["exp1_costaware"]);
    exp2(first["exp2_qft"]);
    exp3(first["exp3_shotnoise"]);
    exp3b(first["exp3_hwvalidation"]);
    exp4(first["exp4_j1j2"]);
    exp5(first["exp5_hwaware"]);
    exp6a(first["exp6_failure"]);
    exp6b(first["exp6_router"]);
    morphing(first["exp6_morphing"]);
    s1(first["s1_ising_vqe"]);
    s2(first["s2_qaoa_depth"]);

    bool same = true;
    for (auto suite : {+[] { return verify_theory(); }, +[] { return verify_gradients(); }}) {
      const SuiteReport a = suite(), b = suite();
      same = same && a.checks.size() == b.checks.size();
      for (std::size_t i = 0; same && i < a.checks.size(); ++i) same = a.checks[i].value == b.checks[i].value;
    }
    std::size_t compared = 0;
    for (const auto& p : presets) {
      const Timed again = sweep(p);
      const auto& ref = first[p].runs;
      same = same && again.runs.size() == ref.size();
      for (std::size_t i = 0; same && i < ref.size(); ++i, ++compared)
        same = fingerprint(again.runs[i]) == fingerprint(ref[i]);
    }
    report(same, "determinism", std::to_string(compared) + " runs re-executed bit-identically, suites reproduced");
  } catch (const std::exception& e) {
    report(false, "harness", e.what());
  }
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
