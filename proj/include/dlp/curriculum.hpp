#pragma once

#include "dlp/gates.hpp"

namespace dlp {

enum class CurriculumKind { None, Annealing, TwoPhase, SoftPrune };

struct CurriculumSpec {
  CurriculumKind kind = CurriculumKind::None;
  // annealing: H(t) = (1 - t) H_easy + t H_hard, t linear over [anneal_start, anneal_end]
  HamiltonianSpec h_easy;
  HamiltonianSpec h_hard;
  int anneal_start = 0;
  int anneal_end = 0;
  // two_phase: w_simp = 0 before switch_epoch, w_simp_final after
  int switch_epoch = 0;
  // soft_prune (and optional simplicity ramp for annealing): 0 until warmup,
  // then linear to w_simp_final at ramp_end
  int warmup = 0;
  int ramp_end = 0;
  double w_simp_final = 0.0;
  bool ramp_simplicity = false;  // annealing only

  void validate() const;
};

struct CurriculumPoint {
  double t = 0.0;
  double w_simp = 0.0;
};

// base_w_simp is used wherever the curriculum does not schedule simplicity.
CurriculumPoint curriculum_weights(const CurriculumSpec& spec, int epoch, double base_w_simp);
HamiltonianSpec annealed_hamiltonian(const CurriculumSpec& spec, double t);

}  // namespace dlp
