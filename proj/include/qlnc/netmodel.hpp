#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace qlnc {

enum class NodeRole { source, internal, terminal };

std::string_view to_string(NodeRole role);

struct Node {
  std::string id;
  NodeRole role = NodeRole::internal;

  bool operator==(const Node&) const = default;
};

struct Edge {
  std::string id;
  std::string from;
  std::string to;

  bool operator==(const Edge&) const = default;
};

/// A single-source directed acyclic network.
///
/// The order of `edges` is significant: it fixes the order of the incoming
/// edges at every node. `source_edge_order[i]` carries message i+1, and
/// `demands` lists 1-based message indices per terminal.
struct Network {
  std::string name;
  int base = 2;
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  std::vector<std::string> source_edge_order;
  std::map<std::string, std::vector<int>> demands;

  std::size_t num_messages() const { return source_edge_order.size(); }

  bool operator==(const Network&) const = default;
};

struct Violation {
  std::string invariant;
  std::string element;
  std::string detail;
};

/// Checks every structural invariant; an empty result means the network is
/// usable by the rest of the library.
std::vector<Violation> validate(const Network& net);

/// Index view of a validated network. Edge and node indices follow file order.
struct Topology {
  std::vector<int> edge_tail;
  std::vector<int> edge_head;
  std::vector<std::vector<int>> inc;
  std::vector<std::vector<int>> out;
  std::vector<int> node_order;  // topological
  std::vector<int> edge_order;  // edges sorted by tail position in node_order
  int source = -1;
  std::vector<int> source_edges;  // message index (0-based) -> edge index
  std::unordered_map<std::string, int> node_index;
  std::unordered_map<std::string, int> edge_index;

  int num_nodes() const { return static_cast<int>(inc.size()); }
  int num_edges() const { return static_cast<int>(edge_tail.size()); }
  int node(const std::string& id) const;
  int edge(const std::string& id) const;
};

/// Throws qlnc::Error when the network is not valid.
Topology make_topology(const Network& net);

/// One (terminal, demanded message) pair, in canonical order: terminals by id,
/// then demand position.
struct DemandSlot {
  std::string terminal;
  int node = -1;
  int position = 1;  // 1-based position within the terminal's demand list
  int message = 1;   // 1-based message index
};

std::vector<DemandSlot> demand_slots(const Network& net, const Topology& topo);

struct DepthPartition {
  int depth = 0;  // length of the longest path from the source
  int max_in_degree = 0;
  std::vector<int> node_depth;
  std::vector<int> edge_depth;
  std::vector<std::vector<int>> layers;  // layers[i] = edge indices at depth i
};

DepthPartition depth_partition(const Network& net);
DepthPartition depth_partition(const Topology& topo);

// File format.
Network network_from_json_text(const std::string& text);
std::string network_to_json_text(const Network& net);
Network load_network(const std::string& path);
void save_network(const Network& net, const std::string& path);

struct RandomNetworkParams {
  int nodes = 8;
  int max_in_degree = 2;
  int terminals = 2;
  std::uint64_t seed = 0;
  int max_demands = 1;
};

/// Random layered DAG; valid by construction and deterministic per seed.
Network random_network(const RandomNetworkParams& params);

}  // namespace qlnc
