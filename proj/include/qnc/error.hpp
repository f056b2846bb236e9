#pragma once

#include <stdexcept>
#include <string>

namespace qnc {

// Every failure mode gets its own code so callers (and tests) can tell
// a malformed document from an infeasible network from a numeric violation.
enum class Errc {
  schema_violation,
  cycle_detected,
  unknown_node,
  not_prime,
  modulus_mismatch,
  no_inverse,
  size_budget,
  bad_register,
  control_equals_target,
  entangled_discard,
  not_pure,
  impossible_outcome,
  not_normalized,
  infeasible,
  code_construction_failed,
  bad_selection,
  pair_not_epr,
};

class Error : public std::runtime_error {
public:
  Error(Errc c, const std::string& msg) : std::runtime_error(msg), code_(c) {}
  Errc code() const { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc c, const std::string& msg) { throw Error(c, msg); }

}  // namespace qnc
