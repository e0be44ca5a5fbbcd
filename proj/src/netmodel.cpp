#include "qlnc/netmodel.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "qlnc/errors.hpp"

namespace qlnc {

std::string_view to_string(NodeRole role) {
  switch (role) {
    case NodeRole::source:
      return "source";
    case NodeRole::internal:
      return "internal";
    case NodeRole::terminal:
      return "terminal";
  }
  return "internal";
}

int Topology::node(const std::string& id) const {
  auto it = node_index.find(id);
  if (it == node_index.end()) throw Error("unknown node '" + id + "'");
  return it->second;
}

int Topology::edge(const std::string& id) const {
  auto it = edge_index.find(id);
  if (it == edge_index.end()) throw Error("unknown edge '" + id + "'");
  return it->second;
}

namespace {

// Kahn's algorithm; ties resolved by file order. Returns fewer than n nodes
// when the graph has a cycle.
std::vector<int> topological_nodes(const std::vector<std::vector<int>>& inc,
                                   const std::vector<std::vector<int>>& out,
                                   const std::vector<int>& edge_head) {
  const int n = static_cast<int>(inc.size());
  std::vector<int> pending(n);
  std::set<int> ready;
  for (int v = 0; v < n; ++v) {
    pending[v] = static_cast<int>(inc[v].size());
    if (pending[v] == 0) ready.insert(v);
  }
  std::vector<int> order;
  order.reserve(n);
  while (!ready.empty()) {
    const int v = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(v);
    for (int e : out[v]) {
      const int w = edge_head[e];
      if (--pending[w] == 0) ready.insert(w);
    }
  }
  return order;
}

}  // namespace

std::vector<Violation> validate(const Network& net) {
  std::vector<Violation> out;
  auto add = [&](std::string inv, std::string elem, std::string detail) {
    out.push_back({std::move(inv), std::move(elem), std::move(detail)});
  };

  if (net.base < 2) add("base", "base", "base must be an integer >= 2");

  std::unordered_map<std::string, int> node_index;
  for (std::size_t i = 0; i < net.nodes.size(); ++i) {
    const auto& id = net.nodes[i].id;
    if (id.empty()) add("node id", "nodes[" + std::to_string(i) + "]", "empty node id");
    if (!node_index.emplace(id, static_cast<int>(i)).second)
      add("unique node ids", id, "duplicate node id");
  }

  const int n = static_cast<int>(net.nodes.size());
  std::vector<std::vector<int>> inc(n), outg(n);
  std::vector<int> head(net.edges.size(), -1), tail(net.edges.size(), -1);
  std::unordered_map<std::string, int> edge_index;
  bool dangling = false;
  for (std::size_t i = 0; i < net.edges.size(); ++i) {
    const auto& e = net.edges[i];
    if (e.id.empty()) add("edge id", "edges[" + std::to_string(i) + "]", "empty edge id");
    if (e.id.find("->") != std::string::npos)
      add("edge id", e.id, "edge ids may not contain '->'");
    if (!edge_index.emplace(e.id, static_cast<int>(i)).second)
      add("unique edge ids", e.id, "duplicate edge id");
    auto f = node_index.find(e.from);
    auto t = node_index.find(e.to);
    if (f == node_index.end() || t == node_index.end()) {
      add("edge endpoints", e.id, "edge references an unknown node");
      dangling = true;
      continue;
    }
    tail[i] = f->second;
    head[i] = t->second;
    outg[f->second].push_back(static_cast<int>(i));
    inc[t->second].push_back(static_cast<int>(i));
  }

  int source = -1;
  int source_roles = 0;
  for (int v = 0; v < n; ++v) {
    if (net.nodes[v].role == NodeRole::source) {
      ++source_roles;
      source = v;
    }
  }
  if (source_roles != 1)
    add("unique source", "nodes",
        "expected exactly one source node, found " + std::to_string(source_roles));
  if (source >= 0 && !inc[source].empty())
    add("unique source", net.nodes[source].id, "source node has incoming edges");
  for (int v = 0; v < n; ++v) {
    if (v != source && inc[v].empty())
      add("unique source", net.nodes[v].id,
          "node has no incoming edges but is not the source");
  }

  bool acyclic = true;
  if (!dangling) {
    auto order = topological_nodes(inc, outg, head);
    if (static_cast<int>(order.size()) != n) {
      acyclic = false;
      std::vector<bool> placed(n, false);
      for (int v : order) placed[v] = true;
      std::string members;
      for (int v = 0; v < n; ++v) {
        if (placed[v]) continue;
        if (!members.empty()) members += ",";
        members += net.nodes[v].id;
      }
      add("acyclicity", members, "graph contains a directed cycle");
    }
  }

  std::size_t k = 0;
  if (source_roles == 1) {
    std::set<std::string> out_ids;
    for (int e : outg[source]) out_ids.insert(net.edges[e].id);
    std::set<std::string> listed;
    for (const auto& id : net.source_edge_order) {
      if (!listed.insert(id).second)
        add("source edge order", id, "edge listed twice");
      else if (!out_ids.count(id))
        add("source edge order", id, "not an outgoing edge of the source");
    }
    for (const auto& id : out_ids) {
      if (!listed.count(id)) add("source edge order", id, "source edge missing from order");
    }
    k = out_ids.size();
    if (k == 0) add("source edge order", net.nodes[source].id, "source has no outgoing edges");
  }

  for (const auto& [terminal, wanted] : net.demands) {
    auto it = node_index.find(terminal);
    if (it == node_index.end()) {
      add("demands", terminal, "demand names an unknown node");
      continue;
    }
    if (net.nodes[it->second].role != NodeRole::terminal)
      add("demands", terminal, "demanding node does not have role 'terminal'");
    if (inc[it->second].empty())
      add("demands", terminal, "terminal has no incoming edges");
    if (wanted.empty()) add("demands", terminal, "empty demand list");
    for (int m : wanted) {
      if (m < 1 || static_cast<std::size_t>(m) > net.source_edge_order.size())
        add("demands", terminal, "demand out of range: " + std::to_string(m));
    }
  }
  for (const auto& node : net.nodes) {
    if (node.role == NodeRole::terminal && !net.demands.count(node.id))
      add("demands", node.id, "terminal node has no demands");
  }
  if (net.demands.empty()) add("demands", "demands", "network has no terminals");

  if (!dangling && acyclic && source_roles == 1 && net.edges.size() > 0) {
    // Deepest edge layer must reach a terminal.
    auto order = topological_nodes(inc, outg, head);
    std::vector<int> depth(n, 0);
    for (int v : order)
      for (int e : outg[v]) depth[head[e]] = std::max(depth[head[e]], depth[v] + 1);
    const int d = *std::max_element(depth.begin(), depth.end());
    bool found = false;
    for (std::size_t e = 0; e < net.edges.size(); ++e) {
      if (depth[tail[e]] == d - 1 &&
          net.nodes[head[e]].role == NodeRole::terminal)
        found = true;
    }
    if (!found)
      add("deepest layer", "edges",
          "no edge of the deepest layer ends in a terminal");
  }
  return out;
}

Topology make_topology(const Network& net) {
  auto problems = validate(net);
  if (!problems.empty()) {
    const auto& v = problems.front();
    throw Error("invalid network '" + net.name + "': " + v.invariant + " (" + v.element +
                "): " + v.detail);
  }
  Topology t;
  const int n = static_cast<int>(net.nodes.size());
  const int m = static_cast<int>(net.edges.size());
  t.inc.resize(n);
  t.out.resize(n);
  t.edge_tail.resize(m);
  t.edge_head.resize(m);
  for (int v = 0; v < n; ++v) {
    t.node_index.emplace(net.nodes[v].id, v);
    if (net.nodes[v].role == NodeRole::source) t.source = v;
  }
  for (int e = 0; e < m; ++e) {
    t.edge_index.emplace(net.edges[e].id, e);
    t.edge_tail[e] = t.node_index.at(net.edges[e].from);
    t.edge_head[e] = t.node_index.at(net.edges[e].to);
    t.out[t.edge_tail[e]].push_back(e);
    t.inc[t.edge_head[e]].push_back(e);
  }
  t.node_order = topological_nodes(t.inc, t.out, t.edge_head);
  for (int v : t.node_order)
    for (int e : t.out[v]) t.edge_order.push_back(e);
  for (const auto& id : net.source_edge_order) t.source_edges.push_back(t.edge_index.at(id));
  return t;
}

std::vector<DemandSlot> demand_slots(const Network& net, const Topology& topo) {
  std::vector<DemandSlot> slots;
  for (const auto& [terminal, wanted] : net.demands) {
    for (std::size_t j = 0; j < wanted.size(); ++j)
      slots.push_back({terminal, topo.node(terminal), static_cast<int>(j) + 1, wanted[j]});
  }
  return slots;
}

DepthPartition depth_partition(const Topology& topo) {
  DepthPartition dp;
  dp.node_depth.assign(topo.num_nodes(), 0);
  for (int v : topo.node_order) {
    for (int e : topo.out[v]) {
      int& w = dp.node_depth[topo.edge_head[e]];
      w = std::max(w, dp.node_depth[v] + 1);
    }
  }
  dp.depth = dp.node_depth.empty() ? 0 : *std::max_element(dp.node_depth.begin(), dp.node_depth.end());
  dp.edge_depth.resize(topo.num_edges());
  dp.layers.assign(dp.depth, {});
  for (int e = 0; e < topo.num_edges(); ++e) {
    dp.edge_depth[e] = dp.node_depth[topo.edge_tail[e]];
    dp.layers[dp.edge_depth[e]].push_back(e);
  }
  for (const auto& in : topo.inc)
    dp.max_in_degree = std::max(dp.max_in_degree, static_cast<int>(in.size()));
  return dp;
}

DepthPartition depth_partition(const Network& net) { return depth_partition(make_topology(net)); }

}  // namespace qlnc
