#include <algorithm>
#include <numeric>
#include <random>

#include "qlnc/errors.hpp"
#include "qlnc/netmodel.hpp"

namespace qlnc {

Network random_network(const RandomNetworkParams& params) {
  if (params.nodes < 2 || params.max_in_degree < 1 || params.terminals < 1 ||
      params.max_demands < 1)
    throw Error("random_network: parameters must be positive (nodes >= 2)");

  std::mt19937_64 rng(params.seed);
  const int n = params.nodes;
  Network net;
  net.name = "random-" + std::to_string(params.seed);
  net.base = 2;
  for (int v = 0; v < n; ++v)
    net.nodes.push_back({"n" + std::to_string(v), v == 0 ? NodeRole::source : NodeRole::internal});

  // Every non-source node draws its parents from earlier nodes, which keeps
  // the graph acyclic and the source the only node without inputs.
  std::vector<std::vector<int>> parents(n);
  for (int v = 1; v < n; ++v) {
    const int hi = std::min(params.max_in_degree, v);
    const int deg = std::uniform_int_distribution<int>(1, hi)(rng);
    std::vector<int> pool(v);
    std::iota(pool.begin(), pool.end(), 0);
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(deg);
    std::sort(pool.begin(), pool.end());
    parents[v] = pool;
  }

  std::vector<int> depth(n, 0);
  std::vector<std::vector<int>> reach(n);  // messages reaching each node
  int next_edge = 1;
  for (int v = 1; v < n; ++v) {
    for (int u : parents[v]) {
      const std::string id = "e" + std::to_string(next_edge++);
      net.edges.push_back({id, net.nodes[u].id, net.nodes[v].id});
      depth[v] = std::max(depth[v], depth[u] + 1);
      if (u == 0) {
        net.source_edge_order.push_back(id);
        reach[v].push_back(static_cast<int>(net.source_edge_order.size()));
      } else {
        reach[v].insert(reach[v].end(), reach[u].begin(), reach[u].end());
      }
    }
    std::sort(reach[v].begin(), reach[v].end());
    reach[v].erase(std::unique(reach[v].begin(), reach[v].end()), reach[v].end());
  }

  int deepest = 1;
  for (int v = 1; v < n; ++v)
    if (depth[v] >= depth[deepest]) deepest = v;
  std::vector<int> others;
  for (int v = 1; v < n; ++v)
    if (v != deepest) others.push_back(v);
  std::shuffle(others.begin(), others.end(), rng);
  const int t_count = std::min(params.terminals, n - 1);
  std::vector<int> terminals{deepest};
  for (int i = 0; i + 1 < t_count; ++i) terminals.push_back(others[i]);
  std::sort(terminals.begin(), terminals.end());

  for (int t : terminals) {
    net.nodes[t].role = NodeRole::terminal;
    auto pool = reach[t];
    std::shuffle(pool.begin(), pool.end(), rng);
    const int count = std::uniform_int_distribution<int>(
        1, std::min<int>(params.max_demands, static_cast<int>(pool.size())))(rng);
    pool.resize(count);
    net.demands[net.nodes[t].id] = pool;
  }
  return net;
}

}  // namespace qlnc
