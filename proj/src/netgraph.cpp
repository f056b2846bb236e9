#include "qnc/netgraph.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>

#include <json.hpp>

namespace qnc {

using nlohmann::json;

void validate_network(const Network& net) {
  if (net.nodes.empty()) fail(Errc::schema_violation, "network has no nodes");
  std::set<std::string> seen;
  for (const auto& n : net.nodes) {
    if (n.empty()) fail(Errc::schema_violation, "empty node id");
    if (!seen.insert(n).second) fail(Errc::schema_violation, "duplicate node id '" + n + "'");
  }
  auto known = [&](const std::string& id, const char* what) {
    if (!seen.count(id)) fail(Errc::unknown_node, std::string(what) + " references unknown node '" + id + "'");
  };
  for (const auto& e : net.edges) {
    known(e.from, "edge");
    known(e.to, "edge");
    if (e.capacity < 1) fail(Errc::schema_violation, "edge capacity must be >= 1");
  }
  if (net.sources.empty()) fail(Errc::schema_violation, "no sources");
  if (net.targets.empty()) fail(Errc::schema_violation, "no targets");
  std::set<std::string> srcs, tgts;
  for (const auto& s : net.sources) {
    known(s, "sources");
    if (!srcs.insert(s).second) fail(Errc::schema_violation, "duplicate source '" + s + "'");
  }
  for (const auto& t : net.targets) {
    known(t, "targets");
    if (!tgts.insert(t).second) fail(Errc::schema_violation, "duplicate target '" + t + "'");
  }
  for (const auto& s : net.sources)
    if (tgts.count(s))
      fail(Errc::schema_violation, "node '" + s + "' cannot be both source and target");

  // acyclicity (self-loops included) via Kahn's algorithm
  std::map<std::string, int> indeg;
  for (const auto& n : net.nodes) indeg[n] = 0;
  for (const auto& e : net.edges) ++indeg[e.to];
  std::queue<std::string> q;
  for (const auto& n : net.nodes)
    if (indeg[n] == 0) q.push(n);
  size_t done = 0;
  while (!q.empty()) {
    std::string u = q.front();
    q.pop();
    ++done;
    for (const auto& e : net.edges)
      if (e.from == u && --indeg[e.to] == 0) q.push(e.to);
  }
  if (done != net.nodes.size()) fail(Errc::cycle_detected, "network contains a cycle");
}

Network parse_network(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(Errc::schema_violation, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail(Errc::schema_violation, "document must be a JSON object");
  for (const char* key : {"nodes", "edges", "sources", "targets"})
    if (!doc.contains(key) || !doc[key].is_array())
      fail(Errc::schema_violation, std::string("missing or non-array field '") + key + "'");

  Network net;
  auto str_list = [&](const json& arr, const char* what) {
    std::vector<std::string> out;
    for (const auto& v : arr) {
      if (!v.is_string()) fail(Errc::schema_violation, std::string(what) + " entries must be strings");
      out.push_back(v.get<std::string>());
    }
    return out;
  };
  net.nodes = str_list(doc["nodes"], "nodes");
  net.sources = str_list(doc["sources"], "sources");
  net.targets = str_list(doc["targets"], "targets");
  for (const auto& e : doc["edges"]) {
    if (!e.is_object() || !e.contains("from") || !e.contains("to") || !e["from"].is_string() ||
        !e["to"].is_string())
      fail(Errc::schema_violation, "each edge needs string fields 'from' and 'to'");
    Edge edge;
    edge.from = e["from"].get<std::string>();
    edge.to = e["to"].get<std::string>();
    if (e.contains("capacity")) {
      if (!e["capacity"].is_number_integer())
        fail(Errc::schema_violation, "edge capacity must be an integer");
      edge.capacity = e["capacity"].get<int>();
    }
    net.edges.push_back(edge);
  }
  validate_network(net);
  return net;
}

std::string serialize_network(const Network& net) {
  json doc;
  doc["nodes"] = net.nodes;
  doc["edges"] = json::array();
  for (const auto& e : net.edges)
    doc["edges"].push_back({{"from", e.from}, {"to", e.to}, {"capacity", e.capacity}});
  doc["sources"] = net.sources;
  doc["targets"] = net.targets;
  return doc.dump(2);
}

int UnitNetwork::node_index(const std::string& id) const {
  for (size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i] == id) return static_cast<int>(i);
  fail(Errc::unknown_node, "unknown node '" + id + "'");
}

UnitNetwork expand_capacities(const Network& net) {
  validate_network(net);
  UnitNetwork u;
  u.nodes = net.nodes;
  std::map<std::string, int> index;
  for (size_t i = 0; i < u.nodes.size(); ++i) index[u.nodes[i]] = static_cast<int>(i);
  for (size_t e = 0; e < net.edges.size(); ++e)
    for (int c = 0; c < net.edges[e].capacity; ++c)
      u.edges.push_back({index[net.edges[e].from], index[net.edges[e].to],
                         static_cast<int>(e), c});
  for (const auto& s : net.sources) u.sources.push_back(index[s]);
  for (const auto& t : net.targets) u.targets.push_back(index[t]);

  u.in_edges.resize(u.nodes.size());
  u.out_edges.resize(u.nodes.size());
  for (size_t e = 0; e < u.edges.size(); ++e) {
    u.out_edges[u.edges[e].from].push_back(static_cast<int>(e));
    u.in_edges[u.edges[e].to].push_back(static_cast<int>(e));
  }
  auto by_peer = [&](bool incoming) {
    return [&, incoming](int a, int b) {
      const auto& ea = u.edges[a];
      const auto& eb = u.edges[b];
      const std::string& pa = u.nodes[incoming ? ea.from : ea.to];
      const std::string& pb = u.nodes[incoming ? eb.from : eb.to];
      if (pa != pb) return pa < pb;
      return a < b;  // expansion order among parallels
    };
  };
  for (auto& v : u.in_edges) std::sort(v.begin(), v.end(), by_peer(true));
  for (auto& v : u.out_edges) std::sort(v.begin(), v.end(), by_peer(false));
  return u;
}

std::vector<int> topo_order(const UnitNetwork& net) {
  size_t n = net.nodes.size();
  std::vector<int> indeg(n, 0);
  for (const auto& e : net.edges) ++indeg[e.to];
  auto cmp = [&](int a, int b) { return net.nodes[a] > net.nodes[b]; };
  std::priority_queue<int, std::vector<int>, decltype(cmp)> ready(cmp);
  for (size_t i = 0; i < n; ++i)
    if (indeg[i] == 0) ready.push(static_cast<int>(i));
  std::vector<int> order;
  while (!ready.empty()) {
    int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (const auto& e : net.edges)
      if (e.from == v && --indeg[e.to] == 0) ready.push(e.to);
  }
  if (order.size() != n) fail(Errc::cycle_detected, "network contains a cycle");
  return order;
}

namespace {

// Edmonds-Karp on an adjacency list with residual capacities.
struct FlowGraph {
  struct Arc {
    int to;
    int cap;
    size_t rev;
  };
  std::vector<std::vector<Arc>> adj;
  explicit FlowGraph(size_t n) : adj(n) {}
  void add(int u, int v, int cap) {
    adj[u].push_back({v, cap, adj[v].size()});
    adj[v].push_back({u, 0, adj[u].size() - 1});
  }
  int run(int s, int t) {
    int total = 0;
    for (;;) {
      std::vector<std::pair<int, size_t>> parent(adj.size(), {-1, 0});
      std::queue<int> q;
      q.push(s);
      parent[s] = {s, 0};
      while (!q.empty() && parent[t].first == -1) {
        int u = q.front();
        q.pop();
        for (size_t i = 0; i < adj[u].size(); ++i) {
          const Arc& a = adj[u][i];
          if (a.cap > 0 && parent[a.to].first == -1) {
            parent[a.to] = {u, i};
            q.push(a.to);
          }
        }
      }
      if (parent[t].first == -1) return total;
      // unit capacities: each augmenting path adds one
      for (int v = t; v != s;) {
        auto [u, i] = parent[v];
        adj[u][i].cap -= 1;
        adj[adj[u][i].to][adj[u][i].rev].cap += 1;
        v = u;
      }
      ++total;
    }
  }
};

}  // namespace

int max_flow(const UnitNetwork& net, const std::string& s, const std::string& t) {
  int si = net.node_index(s), ti = net.node_index(t);
  if (si == ti) fail(Errc::schema_violation, "max_flow endpoints must differ");
  FlowGraph g(net.nodes.size());
  for (const auto& e : net.edges) g.add(e.from, e.to, 1);
  return g.run(si, ti);
}

Feasibility multicast_feasible(const Network& net) {
  UnitNetwork u = expand_capacities(net);
  int sigma = static_cast<int>(u.nodes.size());  // virtual super-source
  Feasibility result;
  int need = static_cast<int>(u.sources.size());
  for (int t : u.targets) {
    FlowGraph g(u.nodes.size() + 1);
    for (const auto& e : u.edges) g.add(e.from, e.to, 1);
    for (int s : u.sources) g.add(sigma, s, 1);
    int f = g.run(sigma, t);
    result.per_target.emplace_back(u.nodes[t], f);
    if (f < need && result.feasible) {
      result.feasible = false;
      result.violating_target = u.nodes[t];
      result.flow = f;
    }
  }
  return result;
}

}  // namespace qnc
