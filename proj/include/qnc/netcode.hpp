#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qnc/gf.hpp"
#include "qnc/netgraph.hpp"

namespace qnc {

enum class StepKind { source_prep, coding, fan_out, target_decode };

// A port of a node's coding map. Besides the real channels, each source has
// one virtual input feeding its symbol and each target has |S| virtual
// outputs that must reproduce all symbols.
struct Port {
  enum Kind { virtual_in, channel, virtual_out };
  Kind kind;
  int index;  // unit-edge id for channel; source ordinal / output ordinal otherwise

  bool operator==(const Port&) const = default;
};

// One node's linear map: out_j = sum_i gamma[i][j] * in_i over F_p.
struct CodingStep {
  int node = 0;  // index into UnitNetwork::nodes
  StepKind kind = StepKind::coding;
  std::vector<Port> inputs;   // [virtual_in if source] then channels, peer-ordered
  std::vector<Port> outputs;  // channels (peer-ordered) then [virtual_outs if target]
  FMat gamma;                 // |inputs| x |outputs|
};

struct LinearCode {
  UnitNetwork net;
  uint32_t p = 2;
  size_t rate = 0;  // |S|: symbols carried per use
  std::vector<CodingStep> steps;  // topological node order, every node present
  std::vector<FVec> edge_vectors;  // unit edge id -> global encoding vector
  std::vector<FMat> decode;        // per target: rate x rate matrix inverting the basis edges
  std::vector<std::vector<int>> decode_basis;  // per target: unit-edge ids the decode inverts
  uint64_t seed = 0;
  int attempts_used = 0;
};

// Draws local coefficients at random (seeded, deterministic) until every
// target sees a full-rank set of incoming vectors; gives up after 64 attempts
// with Errc::code_construction_failed, which suggests a larger field.
LinearCode construct_linear_code(const UnitNetwork& net, uint32_t p, uint64_t seed);

// The steps, in execution order. Each node appears exactly once.
const std::vector<CodingStep>& compile_steps(const LinearCode& code);

// Global encoding vectors by unit edge id; edge value = vector . a.
const std::vector<FVec>& global_encoding_vectors(const LinearCode& code);

// Feeds concrete symbols through the code; returns each target's decoded
// vector (document target order). Acts as the ground-truth evaluator.
std::vector<FVec> classical_simulate(const LinearCode& code, const FVec& a);

std::string serialize_code(const LinearCode& code);

}  // namespace qnc
