#include "dlp/curriculum.hpp"

#include <algorithm>

namespace dlp {

namespace {

double ramp(int epoch, int start, int end) {
  if (epoch < start) return 0.0;
  if (end <= start || epoch >= end) return 1.0;
  return static_cast<double>(epoch - start) / static_cast<double>(end - start);
}

}  // namespace

void CurriculumSpec::validate() const {
  if (kind == CurriculumKind::Annealing) {
    if (h_easy.n != h_hard.n || h_easy.n == 0) throw ValidationError("annealing needs H_easy and H_hard of equal size");
    if (anneal_end < anneal_start) throw ValidationError("annealing window is reversed");
  }
  if (kind == CurriculumKind::SoftPrune || (kind == CurriculumKind::Annealing && ramp_simplicity))
    if (ramp_end < warmup) throw ValidationError("simplicity ramp ends before warmup");
  if (kind == CurriculumKind::TwoPhase && switch_epoch < 0) throw ValidationError("switch_epoch must be >= 0");
  if (w_simp_final < 0) throw ValidationError("w_simp_final must be >= 0");
}

CurriculumPoint curriculum_weights(const CurriculumSpec& spec, int epoch, double base_w_simp) {
  CurriculumPoint p{0.0, base_w_simp};
  switch (spec.kind) {
    case CurriculumKind::None:
      break;
    case CurriculumKind::Annealing:
      p.t = ramp(epoch, spec.anneal_start, spec.anneal_end);
      if (spec.ramp_simplicity) p.w_simp = spec.w_simp_final * ramp(epoch, spec.warmup, spec.ramp_end);
      break;
    case CurriculumKind::TwoPhase:
      p.w_simp = epoch < spec.switch_epoch ? 0.0 : spec.w_simp_final;
      break;
    case CurriculumKind::SoftPrune:
      p.w_simp = epoch < spec.warmup ? 0.0 : spec.w_simp_final * ramp(epoch, spec.warmup, spec.ramp_end);
      break;
  }
  return p;
}

HamiltonianSpec annealed_hamiltonian(const CurriculumSpec& spec, double t) {
  if (t <= 0.0) return spec.h_easy;
  if (t >= 1.0) return spec.h_hard;
  return combine(spec.h_easy, 1.0 - t, spec.h_hard, t);
}

}  // namespace dlp
