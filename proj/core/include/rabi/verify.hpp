#pragma once

// Small-scale invariant suite (eta <= 16, n_max <= 512) shared by the
// `verify` subcommand and the tests.

#include <string>
#include <vector>

namespace rabi {

struct CheckResult {
  std::string module;
  std::string name;
  bool passed = false;
  double observed = 0.0;
  double bound = 0.0;
};

struct VerifyOptions {
  /// Shift one off-diagonal Hamiltonian element on one side only before the
  /// hermiticity check; the suite must then report a failure.
  bool inject_hermiticity_fault = false;
  unsigned seed = 12345;
};

std::vector<CheckResult> run_invariant_suite(const VerifyOptions& opts = {});

}  // namespace rabi
