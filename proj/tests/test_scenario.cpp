#include "dlp/scenario.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

using namespace dlp;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("dlp_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string error_of(const nlohmann::json& doc) {
  try {
    parse_scenario(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

nlohmann::json minimal() {
  return nlohmann::json::parse(R"({
    "name": "mini",
    "n_qubits": 2,
    "slots": [{"gate": "H", "qubits": [0]}, {"gate": "CNOT", "qubits": [0, 1]}, {"gate": "X", "qubits": [1]}],
    "axioms": {"target": {"type": "circuit", "n": 2, "gates": [{"gate": "X", "qubits": [1]}]},
               "weights": {"fidelity": 5.0, "simplicity": 0.3}},
    "init": {"policy": "all_on", "logit": 2.0},
    "epochs": 300
  })");
}

}  // namespace

TEST(Presets, AllTwelveLoad) {
  const std::vector<std::string> expected = {"exp1_costaware", "exp1_trotter",   "exp2_qft",       "exp3_hwvalidation",
                                             "exp3_shotnoise", "exp4_j1j2",      "exp5_hwaware",   "exp6_failure",
                                             "exp6_morphing",  "exp6_router",    "s1_ising_vqe",   "s2_qaoa_depth"};
  std::vector<std::string> names = preset_names();
  std::sort(names.begin(), names.end());
  EXPECT_EQ(names, expected);
  for (const auto& n : names) EXPECT_NO_THROW(load_scenario(n)) << n;
}

TEST(Presets, QftScaffoldSize) {
  Scenario s = load_scenario("exp2_qft");
  EXPECT_EQ(s.slots.size(), 21u);
  EXPECT_EQ(s.n, 4);
}

TEST(Presets, QaoaHasThreeLayerPairs) {
  Scenario s = load_scenario("s2_qaoa_depth");
  int evo = 0;
  for (const auto& g : s.slots)
    if (g.kind == GateKind::HAM_EVO && !g.frozen) ++evo;
  EXPECT_EQ(evo, 6);
}

TEST(Config, RoundTripIsIdentity) {
  for (const auto& name : preset_names()) {
    const Scenario a = load_scenario(name);
    const nlohmann::json ja = scenario_to_json(a);
    const Scenario b = parse_scenario(ja);
    EXPECT_EQ(scenario_to_json(b), ja) << name;
  }
}

TEST(Config, ErrorsNameTheField) {
  nlohmann::json bad = minimal();
  bad["slots"][1]["qubits"] = "zero";
  EXPECT_NE(error_of(bad).find("slots[1].qubits"), std::string::npos) << error_of(bad);
  bad = minimal();
  bad["axioms"]["weights"]["fidelty"] = 1.0;
  EXPECT_NE(error_of(bad).find("axioms.weights.fidelty"), std::string::npos) << error_of(bad);
  bad = minimal();
  bad["slots"][0]["qubits"] = {5};
  EXPECT_NE(error_of(bad).find("slots[0]"), std::string::npos) << error_of(bad);
  bad = minimal();
  bad["axioms"]["weights"]["simplicity"] = -1.0;
  EXPECT_NE(error_of(bad).find("simplicity"), std::string::npos) << error_of(bad);
  bad = minimal();
  bad.erase("n_qubits");
  EXPECT_NE(error_of(bad).find("n_qubits"), std::string::npos) << error_of(bad);
}

TEST(Config, MalformedFileReportsLine) {
  const fs::path dir = scratch("malformed");
  fs::create_directories(dir);
  const fs::path f = dir / "broken.json";
  std::ofstream(f) << "{\n  \"name\": \"x\",\n  \"n_qubits\": 2,\n  \"slots\": [\n}\n";
  try {
    load_scenario(f.string());
    FAIL() << "expected a ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 5"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_scenario("no_such_preset"), ConfigError);
}

TEST(Config, VariantsAndSeeds) {
  Scenario s = load_scenario("exp1_trotter");
  ASSERT_EQ(s.variants.size(), 3u);
  Scenario v = apply_variant(s, s.variants[2]);
  EXPECT_EQ(v.name, "exp1_trotter/sigma_0.5");
  EXPECT_EQ(v.train.noise.sigma, 0.5);
  EXPECT_TRUE(v.variants.empty());
  EXPECT_EQ(with_seed(s, 77).seed, 77u);
}

TEST(ScaffoldJson, RoundTrip) {
  Scaffold sc = build_scaffold(load_scenario("exp2_qft"));
  sc.logits().setLinSpaced(-3.0, 3.0);
  Scaffold back = scaffold_from_json(scaffold_to_json(sc));
  EXPECT_EQ(back.logits(), sc.logits());
  EXPECT_EQ(back.angles(), sc.angles());
  EXPECT_LT((forward_unitary(back) - forward_unitary(sc)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Run, SmallScenarioPrunesAndSummarizes) {
  RunResult r = run_scenario(parse_scenario(minimal()));
  EXPECT_FALSE(r.trace.aborted);
  EXPECT_EQ(r.trace.records.size(), 300u);
  EXPECT_EQ(r.summary["survivors"], nlohmann::json::array({2}));
  EXPECT_GT(r.summary["extracted"]["fidelity"].get<double>(), 0.999);
  EXPECT_TRUE(r.summary.contains("last_epoch_losses"));
}

TEST(Run, BundleIsBitIdentical) {
  const Scenario s = parse_scenario(minimal());
  const fs::path a = scratch("bundle_a"), b = scratch("bundle_b");
  write_bundle(run_scenario(s), a);
  write_bundle(run_scenario(s), b);
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(a)) files.push_back(e.path().filename().string());
  std::sort(files.begin(), files.end());
  EXPECT_EQ(files, (std::vector<std::string>{"circuit.qasm", "circuit.txt", "scaffold.json", "scenario.json",
                                             "summary.json", "trace.csv"}));
  for (const auto& f : files) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST(Run, SweepOrderIsDeterministic) {
  nlohmann::json doc = minimal();
  doc["epochs"] = 20;
  doc["seeds"] = {1, 2};
  doc["variants"] = nlohmann::json::parse(R"([{"label": "a", "patch": {}}, {"label": "b", "patch": {"epochs": 10}}])");
  const Scenario s = parse_scenario(doc);
  auto one = run_sweep(s, 4), two = run_sweep(s, 1);
  ASSERT_EQ(one.size(), 4u);
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(one[i].scenario.name, two[i].scenario.name);
    EXPECT_EQ(one[i].scenario.seed, two[i].scenario.seed);
    EXPECT_EQ(one[i].summary, two[i].summary);
  }
  EXPECT_EQ(one[2].trace.records.size(), 10u);
}

TEST(Run, RoutingBundleHasCsv) {
  nlohmann::json doc = load_scenario("exp6_router").source;
  doc["routing"]["cycles"] = 3;
  doc["routing"]["router"]["shots"] = 32;
  RunResult r = run_scenario(parse_scenario(doc));
  ASSERT_TRUE(r.routing.has_value());
  const fs::path dir = scratch("routing");
  write_bundle(r, dir);
  std::ifstream in(dir / "routing.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "cycle,arm,fidelity,p_pathA,p_pathB,cost_A,cost_B");
  EXPECT_EQ(r.summary["arms"]["adaptive"]["fidelity"].size(), 3u);
}
