#pragma once

#include "dlp/scaffold.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace dlp {

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;      // worst observed statistic
  double tolerance = 0.0;
  std::size_t cases = 0;
};

struct SuiteReport {
  std::vector<CheckResult> checks;
  std::vector<std::string> notes;
  double seconds = 0.0;
  bool all_pass() const;
};

// Haar-distributed unitary via QR of a complex Ginibre matrix.
Matrix random_unitary(std::size_t dim, std::mt19937_64& rng);

// A layer of random RY rotations on every qubit, a CNOT ladder, `slots` random
// gates from {H, X, S, T, RY, RZ, CNOT, CPHASE, SWAP}, then an H / CNOT / H
// tail.  Logits and angles are random.
Scaffold random_scaffold(int n, int slots, std::mt19937_64& rng);

SuiteReport verify_theory(std::uint64_t seed = 7);
SuiteReport verify_gradients(std::uint64_t seed = 11, int scaffolds = 50);

std::string format_report(const SuiteReport& r);

}  // namespace dlp
