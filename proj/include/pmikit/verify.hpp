#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pmikit/prob.hpp"

namespace pmikit {

// Randomized self-checks over one probability model: the paraphrase and
// analogy identities on sampled word sets, the exact shift laws, and the
// bitwise zero laws of trivial quadruples. Draws that hit undefined events
// are rejected and retried up to attempts_per_draw times; a check that runs
// out of attempts stops early and reports itself exhausted.
struct VerifyOptions {
  int draws = 100;
  std::uint64_t seed = 42;
  double shift_k = 5.0;               // shift laws run at ln(shift_k)
  double bound_identity = 1e-9;
  double bound_cancellation = 1e-12;  // exact laws: shifts, trivial quadruples
  int max_set_size = 3;               // clamped to the window capacity 2l
  int attempts_per_draw = 200;

  void validate() const;
};

struct CheckResult {
  std::string name;
  int requested_draws = 0;
  int draws = 0;  // accomplished before exhaustion
  double max_residual = 0.0;
  double bound = 0.0;
  bool pass = false;  // draws complete and max_residual within bound
  bool exhausted = false;
};

// Runs every check; result order is fixed. Deterministic for a fixed seed
// within one build.
std::vector<CheckResult> run_identity_suite(const ProbabilityModel& model,
                                            const VerifyOptions& options = {});

bool all_pass(const std::vector<CheckResult>& results);

}  // namespace pmikit
