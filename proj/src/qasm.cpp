#include "dlp/qasm.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <regex>
#include <sstream>

namespace dlp {

namespace {

std::string fmt_angle(double a) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", a);
  return buf;
}

const std::map<GateKind, std::string>& qasm_names() {
  static const std::map<GateKind, std::string> m = {
      {GateKind::H, "h"},   {GateKind::X, "x"},   {GateKind::Y, "y"},   {GateKind::Z, "z"},
      {GateKind::S, "s"},   {GateKind::T, "t"},   {GateKind::RY, "ry"}, {GateKind::RZ, "rz"},
      {GateKind::CNOT, "cx"}, {GateKind::CPHASE, "cp"}, {GateKind::SWAP, "swap"}};
  return m;
}

// number | pi, combined with * and /, optional leading minus.
double eval_angle(const std::string& expr) {
  std::string e;
  for (char c : expr)
    if (!std::isspace(static_cast<unsigned char>(c))) e += c;
  if (e.empty()) throw ValidationError("qasm: empty angle");
  double sign = 1.0;
  std::size_t pos = 0;
  if (e[0] == '-') {
    sign = -1.0;
    pos = 1;
  }
  auto factor = [&]() {
    if (e.compare(pos, 2, "pi") == 0) {
      pos += 2;
      return M_PI;
    }
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(e.substr(pos), &used);
    } catch (const std::exception&) {
      throw ValidationError("qasm: cannot parse angle '" + expr + "'");
    }
    pos += used;
    return v;
  };
  double v = factor();
  while (pos < e.size()) {
    const char op = e[pos++];
    const double f = factor();
    if (op == '*') v *= f;
    else if (op == '/') v /= f;
    else throw ValidationError("qasm: cannot parse angle '" + expr + "'");
  }
  return sign * v;
}

std::string slot_label(const GateSpec& g) {
  if (!g.label.empty() && (g.kind == GateKind::HAM_EVO || g.kind == GateKind::FROZEN)) return g.label;
  switch (g.kind) {
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::CPHASE: return "CP";
    default: return kind_name(g.kind);
  }
}

struct Column {
  std::map<int, std::string> cells;
};

Column column_for(const GateSpec& g, std::optional<double> s) {
  Column col;
  const std::string tag = s ? ":" + [&] {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.2f", *s);
    return std::string(buf);
  }() : "";
  if (g.kind == GateKind::CNOT) {
    col.cells[g.qubits[0]] = "[*" + tag + "]";
    col.cells[g.qubits[1]] = "[+]";
  } else if (g.kind == GateKind::SWAP) {
    col.cells[g.qubits[0]] = "[x" + tag + "]";
    col.cells[g.qubits[1]] = "[x]";
  } else {
    const std::string lbl = slot_label(g);
    for (std::size_t i = 0; i < g.qubits.size(); ++i) {
      std::string cell = "[" + lbl;
      if (g.qubits.size() > 1) cell += "#" + std::to_string(i);
      if (i == 0) cell += tag;
      col.cells[g.qubits[i]] = cell + "]";
    }
  }
  if (g.qubits.size() > 1) {
    int lo = g.qubits[0], hi = g.qubits[0];
    for (int q : g.qubits) {
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
    for (int q = lo + 1; q < hi; ++q)
      if (!col.cells.count(q)) col.cells[q] = "|";
  }
  return col;
}

std::string render(int n, const std::vector<Column>& cols) {
  std::vector<std::string> rows(static_cast<std::size_t>(n));
  for (int q = 0; q < n; ++q) rows[q] = "q" + std::to_string(q) + (n > 10 && q < 10 ? "  " : " ") + "-";
  for (const auto& col : cols) {
    std::size_t w = 1;
    for (const auto& [_, c] : col.cells) w = std::max(w, c.size());
    for (int q = 0; q < n; ++q) {
      auto it = col.cells.find(q);
      std::string cell = it == col.cells.end() ? std::string() : it->second;
      const std::size_t pad = w - cell.size();
      cell = std::string(pad / 2, '-') + cell + std::string(pad - pad / 2, '-');
      if (it == col.cells.end()) cell = std::string(w, '-');
      rows[q] += cell + "-";
    }
  }
  std::string out;
  for (const auto& r : rows) out += r + "\n";
  return out;
}

}  // namespace

std::string export_qasm(const DiscreteCircuit& c) {
  const DiscreteCircuit flat = flatten(c);
  std::ostringstream os;
  os << "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[" << c.n << "];\n";
  for (const auto& g : flat.gates) {
    auto it = qasm_names().find(g.kind);
    if (it == qasm_names().end()) throw ValidationError("export_qasm: unsupported gate " + kind_name(g.kind));
    os << it->second;
    if (is_parameterized(g.kind)) os << '(' << fmt_angle(g.angle) << ')';
    for (std::size_t i = 0; i < g.qubits.size(); ++i) os << (i ? "," : " ") << "q[" << g.qubits[i] << ']';
    os << ";\n";
  }
  return os.str();
}

DiscreteCircuit parse_qasm(const std::string& text) {
  DiscreteCircuit c;
  std::istringstream is(text);
  std::string line;
  static const std::regex qreg(R"(^\s*qreg\s+q\s*\[\s*(\d+)\s*\]\s*;\s*$)");
  static const std::regex gate(R"(^\s*([a-z]+)\s*(?:\(([^)]*)\))?\s+(.*);\s*$)");
  static const std::regex qarg(R"(q\s*\[\s*(\d+)\s*\])");
  int lineno = 0;
  bool have_reg = false;
  while (std::getline(is, line)) {
    ++lineno;
    const auto cpos = line.find("//");
    if (cpos != std::string::npos) line.resize(cpos);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line.rfind("OPENQASM", 0) == 0 || line.rfind("include", 0) == 0) continue;
    std::smatch m;
    if (std::regex_match(line, m, qreg)) {
      c.n = std::stoi(m[1]);
      have_reg = true;
      continue;
    }
    if (!std::regex_match(line, m, gate)) throw ValidationError("qasm line " + std::to_string(lineno) + ": cannot parse");
    if (!have_reg) throw ValidationError("qasm line " + std::to_string(lineno) + ": gate before qreg");
    GateSpec g;
    bool found = false;
    for (const auto& [kind, name] : qasm_names())
      if (name == m[1].str()) {
        g.kind = kind;
        found = true;
      }
    if (!found) throw ValidationError("qasm line " + std::to_string(lineno) + ": unsupported gate " + m[1].str());
    if (is_parameterized(g.kind)) {
      if (!m[2].matched) throw ValidationError("qasm line " + std::to_string(lineno) + ": missing angle");
      g.angle = eval_angle(m[2]);
    }
    const std::string args = m[3];
    for (auto it = std::sregex_iterator(args.begin(), args.end(), qarg); it != std::sregex_iterator(); ++it)
      g.qubits.push_back(std::stoi((*it)[1]));
    if (static_cast<int>(g.qubits.size()) != arity(g.kind))
      throw ValidationError("qasm line " + std::to_string(lineno) + ": wrong operand count");
    for (int q : g.qubits)
      if (q >= c.n) throw ValidationError("qasm line " + std::to_string(lineno) + ": qubit out of range");
    c.provenance.push_back(static_cast<int>(c.gates.size()));
    c.gates.push_back(g);
  }
  if (!have_reg) throw ValidationError("qasm: no qreg declaration");
  return c;
}

std::string render_circuit_text(const DiscreteCircuit& c) {
  std::vector<Column> cols;
  for (const auto& g : c.gates) cols.push_back(column_for(g, std::nullopt));
  return render(c.n, cols);
}

std::string render_circuit_text(const Scaffold& sc, bool show_switches) {
  std::vector<Column> cols;
  const Eigen::VectorXd s = sc.switches();
  for (std::size_t i = 0; i < sc.size(); ++i)
    cols.push_back(column_for(sc.slot(i), show_switches && !sc.slot(i).frozen ? std::optional<double>(s(i))
                                                                               : std::nullopt));
  return render(sc.n(), cols);
}

}  // namespace dlp
