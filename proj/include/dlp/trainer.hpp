#pragma once

#include "dlp/autodiff.hpp"
#include "dlp/curriculum.hpp"
#include "dlp/optimizer.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace dlp {

enum class Selector { Sigmoid, Gumbel };

struct GumbelConfig {
  double tau = 1.0;
  double tau_final = 1.0;  // exponential decay from tau to tau_final over the run
  bool hard = false;       // straight-through: forward uses 0/1 weights
};

struct TrainConfig {
  int epochs = 0;
  AdamWConfig optimizer;
  CurriculumSpec curriculum;
  NoiseChannelSpec noise;
  Selector selector = Selector::Sigmoid;
  GumbelConfig gumbel;
  std::uint64_t seed = 0;
};

struct EpochRecord {
  int epoch = 0;
  LossBreakdown loss;
  double t_curriculum = 0.0;
  double w_simp = 0.0;
  Eigen::VectorXd s;
  Eigen::VectorXd theta;
  double wall_ms = 0.0;
};

struct TrainingTrace {
  std::vector<EpochRecord> records;
  bool aborted = false;
  std::string error;
  std::size_t noise_draws_seed = 0;
};

// Axiom set for a given curriculum position (annealed Hamiltonian, w_simp).
AxiomSet axioms_at(const AxiomSet& base, const CurriculumSpec& cur, const CurriculumPoint& p);

TrainingTrace train(Scaffold& sc, const AxiomSet& axioms, const TrainConfig& cfg);

// Switch values a finished run commits to: sigmoid(lambda), or the hard
// Gumbel architecture alpha > 0.
Eigen::VectorXd final_switches(const Scaffold& sc, Selector selector);

void write_trace_csv(std::ostream& os, const TrainingTrace& trace, std::size_t slots);
std::string trace_csv_header(std::size_t slots);

}  // namespace dlp
