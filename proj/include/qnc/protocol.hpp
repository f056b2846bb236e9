#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qnc/netcode.hpp"
#include "qnc/qsim.hpp"

namespace qnc {

// Symbolic register name used by compiled programs and transcripts.
// S1.. are payload registers, S'1.. their local halves, R1.. channel
// registers (one per unit edge), Tt.k the k-th output register of target t.
struct RegId {
  Role role = Role::scratch;
  int a = 0;  // source ordinal, unit-edge id, or target ordinal
  int b = 0;  // symbol ordinal for target outputs
  friend auto operator<=>(const RegId&, const RegId&) = default;
  std::string display() const;
};

enum class OpKind { create, prepare_plus, controlled_add, transmit };

struct Op {
  OpKind kind = OpKind::create;
  std::string node;     // executing node
  RegId reg;            // register created / prepared / written / sent
  RegId control;        // controlled_add only
  uint32_t gamma = 0;   // controlled_add only
  std::string to_node;  // transmit only
  std::string display() const;
};

// Local operations plus one transmission per channel, realizing a linear
// code coherently: prepare |+> at every source, then per node (topological
// order) create the outgoing registers, add gamma-weighted inputs into them,
// and send each channel register to the head of its edge.
struct QuantumProgram {
  uint32_t p = 0;
  size_t h = 0;  // symbols carried per run (= source count)
  std::vector<Op> ops;
  size_t transmissions() const;
  std::string to_text() const;  // newline-joined human-readable op list
};

QuantumProgram compile_program(const LinearCode& code);

// Which target receives each transported payload: payload k ends up at
// nodes[perm[k]]. nodes are distinct target ids, one per source.
struct TargetSelection {
  std::vector<std::string> nodes;
  std::vector<size_t> perm;
};

// First |S| targets in document order, identity permutation.
TargetSelection default_selection(const Network& net);
// Errc::bad_selection on duplicates, non-targets, or a non-permutation.
void validate_selection(const UnitNetwork& net, size_t h, const TargetSelection& sel);

std::vector<Cx> input_zero(uint32_t p, size_t h);
std::vector<Cx> input_plus(uint32_t p, size_t h);
// Haar-random joint payload state (normalized complex Gaussians).
std::vector<Cx> input_random(uint32_t p, size_t h, uint64_t seed);

// Stateful executor for the transport pipeline:
//   (construction) load the payload onto S registers and run the compiled
//                  program, entangling sources, channels and targets
//   measure_edges  read every channel register in the fourier basis, then
//                  cancel the accumulated phases on the first target's legs
//   distill        shrink each shared cat state to one payload/receiver pair
//   teleport       consume the pairs to move the payloads onto the receivers
// Randomized and outcome-forcing variants of each measuring stage share the
// same code path, so forced runs exercise exactly the shipped logic.
class ProtocolRun {
public:
  ProtocolRun(LinearCode code, std::vector<Cx> input, size_t max_registers = 0);

  const QuantumProgram& program() const { return prog_; }
  const LinearCode& code() const { return code_; }
  StateVector& state() { return psi_; }
  const StateVector& state() const { return psi_; }

  int reg(const RegId& id) const;  // handle; Errc::bad_register if absent
  // The linear functional of the source symbols a register's value realizes.
  const FVec& functional(const RegId& id) const;

  // Outcomes indexed by unit edge id. `order` (a permutation of edge slots)
  // overrides the default edge-id measurement order.
  std::vector<uint32_t> measure_edges(std::mt19937_64& rng,
                                      const std::vector<size_t>* order = nullptr);
  std::vector<uint32_t> measure_edges_forced(const std::vector<uint32_t>& outcomes,
                                             const std::vector<size_t>* order = nullptr);

  void distill(const TargetSelection& sel, std::mt19937_64& rng);
  // Outcomes for the measured legs in execution order: for each payload k,
  // the non-receiving targets in document order.
  void distill_forced(const TargetSelection& sel, const std::vector<uint32_t>& outcomes);

  void teleport(std::mt19937_64& rng);
  // Per payload: (computational outcome on S'k, fourier outcome on Sk).
  void teleport_forced(const std::vector<std::pair<uint32_t, uint32_t>>& outcomes);

  // Receiver registers / names in payload order; valid once distilled.
  std::vector<int> output_registers() const;
  const std::vector<RegId>& receivers() const { return receivers_; }

  const std::vector<std::string>& transcript() const { return transcript_; }
  // |<input|state on the receivers>|^2; valid once teleported.
  double payload_fidelity() const;

private:
  using Measurer = std::function<uint32_t(const RegId&, int handle, Basis)>;
  void execute(const Op& op);
  std::vector<uint32_t> measure_edges_impl(const Measurer& m,
                                           const std::vector<size_t>* order);
  void distill_impl(const TargetSelection& sel, const Measurer& m);
  void teleport_impl(const Measurer& m);
  uint32_t read_and_drop(const RegId& id, Basis basis, const Measurer& m,
                         const char* phase);
  void note_correction(const char* phase, const char* event, const RegId& reg,
                       uint32_t amount);

  LinearCode code_;
  std::vector<Cx> input_;
  QuantumProgram prog_;
  StateVector psi_;
  std::map<RegId, int> handle_;
  std::map<RegId, FVec> functional_;
  std::vector<std::string> transcript_;
  std::vector<RegId> receivers_;
  std::vector<int> outputs_;
  bool edges_measured_ = false;
  bool distilled_ = false;
  bool teleported_ = false;
};

struct RunOptions {
  uint32_t field = 0;      // 0 = auto; otherwise raised to at least the auto choice
  uint64_t code_seed = 0;  // first construction seed tried
  uint64_t seed_scan = 512;  // seeds tried before giving up on code construction
  uint64_t meas_seed = 0;
  std::optional<TargetSelection> selection;  // default: first targets, identity
  std::vector<Cx> input;                     // empty = |+...+>
  size_t max_registers = 0;                  // 0 = simulator default budget
};

struct RunSummary {
  uint32_t p = 0;
  uint64_t code_seed = 0;
  int attempts_used = 0;
  size_t transmissions = 0;
  std::vector<uint32_t> edge_outcomes;
  std::vector<std::string> receivers;  // display names in payload order
  double fidelity = 0.0;
  std::vector<std::string> transcript;
};

// Smallest usable prime: auto choice from the target count, raised (never
// lowered) to `requested` when nonzero. Errc::not_prime on composites.
uint32_t protocol_field(const Network& net, uint32_t requested);

// construct_linear_code over seeds first..first+scan-1, returning the first
// success; rethrows Errc::code_construction_failed if all fail.
LinearCode construct_with_seed_scan(const UnitNetwork& net, uint32_t p,
                                    uint64_t first_seed, uint64_t scan);

// Feasibility check, code construction and the full pipeline in one call.
// Throws Errc::infeasible naming the violating target when the network
// cannot carry one symbol per source to every target.
RunSummary run_protocol(const Network& net, const RunOptions& opt = {});

}  // namespace qnc
