#pragma once

#include <cstdint>
#include <vector>

#include "qnc/netcode.hpp"
#include "qnc/protocol.hpp"

namespace qnc {

// Self-contained property checkers. They build their states by direct
// amplitude placement and compute expected results from closed forms, so
// they share no logic with the compiler/executor stack they judge.

struct OracleReport {
  size_t instances = 0;  // independent random instances tried
  size_t checks = 0;     // individual comparisons made
  size_t failures = 0;   // instances with any deviation beyond kTol
  double max_error = 0.0;  // worst amplitude deviation seen
};

// Readout law: on sum_x alpha_x |x> (x) |g.x>, forcing fourier outcome y on
// the last register must leave sum_x w^{-y(g.x)} alpha_x |x>, for every y.
// Register counts cycle through 1..max_regs; alpha and g are drawn fresh
// per instance from `seed`.
OracleReport check_functional_readout(uint32_t p, size_t max_regs, size_t instances,
                                      uint64_t seed);

// Cancellation law: applying Z((p-b_i) mod p) to every register of
// sum_x w^{b.x} alpha_x |x> must recover sum_x alpha_x |x> exactly.
OracleReport check_phase_cancellation(uint32_t p, size_t max_regs, size_t instances,
                                      uint64_t seed);

// Every joint input in F_p^{|S|} decodes to itself at every target when
// p^{|S|} <= cap (Errc::size_budget otherwise).
OracleReport check_code_exhaustive(const LinearCode& code, size_t cap = 1024);

// Every ordered receiver assignment: size-|S| target subsets in document
// order, crossed with all permutations.
std::vector<TargetSelection> all_selections(const Network& net);

struct FidelityReport {
  size_t runs = 0;
  size_t failures = 0;       // runs below threshold
  double min_fidelity = 1.0;
  size_t transmissions = 0;  // per-run transmission count (constant per network)
};

// Full pipeline across all selections x measurement seeds x payloads.
FidelityReport end_to_end_sweep(const Network& net,
                                const std::vector<uint64_t>& meas_seeds,
                                const std::vector<std::vector<Cx>>& inputs,
                                double threshold = 1.0 - 1e-9);

}  // namespace qnc
