#pragma once

#include <string>
#include <vector>

#include "qnc/error.hpp"

namespace qnc {

struct Edge {
  std::string from;
  std::string to;
  int capacity = 1;
};

// A multicast problem instance: a capacitated DAG plus ordered source and
// target lists. Order is significant: sources[i] feeds the i-th input symbol,
// targets[j] is the j-th receiver.
struct Network {
  std::vector<std::string> nodes;
  std::vector<Edge> edges;
  std::vector<std::string> sources;
  std::vector<std::string> targets;
};

// Parses and validates a network document. Throws Error with code
// schema_violation / unknown_node / cycle_detected.
Network parse_network(const std::string& json_text);
std::string serialize_network(const Network& net);
// Runs the same validation as parse_network on an in-memory instance.
void validate_network(const Network& net);

// One symbol-carrying channel: a capacity-c edge becomes c parallel unit
// edges, each remembering where it came from.
struct UnitEdge {
  int from = 0;
  int to = 0;
  int orig_edge = 0;  // index into Network::edges
  int copy = 0;       // 0 .. capacity-1
};

struct UnitNetwork {
  std::vector<std::string> nodes;
  std::vector<UnitEdge> edges;  // expansion order: document edge order, then copy
  std::vector<int> sources;     // node indices, original order
  std::vector<int> targets;
  // Per node, unit-edge ids ordered by (peer node id, expansion order).
  // This ordering defines coefficient-matrix row/column indexing downstream.
  std::vector<std::vector<int>> in_edges;
  std::vector<std::vector<int>> out_edges;

  int node_index(const std::string& id) const;
};

UnitNetwork expand_capacities(const Network& net);

// Node indices in an order compatible with the edges; lexicographic
// tie-break on node id makes it deterministic.
std::vector<int> topo_order(const UnitNetwork& net);

// Maximum s->t flow on unit edges (BFS augmenting paths).
int max_flow(const UnitNetwork& net, const std::string& s, const std::string& t);

struct Feasibility {
  bool feasible = true;
  std::string violating_target;  // first target (document order) with flow < |S|
  int flow = 0;                  // its max-flow value
  std::vector<std::pair<std::string, int>> per_target;
};

// A network can carry one symbol per source to every target iff each target
// draws max-flow >= |S| from a virtual super-source with a unit edge per source.
Feasibility multicast_feasible(const Network& net);

}  // namespace qnc
