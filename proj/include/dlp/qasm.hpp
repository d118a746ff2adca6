#pragma once

#include "dlp/scaffold.hpp"

#include <string>

namespace dlp {

// OpenQASM 2.0 subset: h x y z s t ry rz cx cp swap.  q[i] is qubit i.
// Frozen motifs are expanded inline; other kinds raise ValidationError.
std::string export_qasm(const DiscreteCircuit& c);
DiscreteCircuit parse_qasm(const std::string& text);

std::string render_circuit_text(const DiscreteCircuit& c);
std::string render_circuit_text(const Scaffold& sc, bool show_switches);

}  // namespace dlp
