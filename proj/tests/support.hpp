#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "qlnc/netmodel.hpp"
#include "qlnc/xfer.hpp"

namespace qlnc::testing {

// Every source-to-sink edge path, by explicit enumeration.
inline void for_each_path(const Topology& topo, const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> path;
  std::function<void(int)> walk = [&](int e) {
    path.push_back(e);
    visit(path);
    for (int next : topo.out[topo.edge_head[e]]) walk(next);
    path.pop_back();
  };
  for (int e : topo.out[topo.source]) walk(e);
}

// Longest source path ending at each node, in edges.
inline std::vector<int> path_depths(const Topology& topo) {
  std::vector<int> depth(topo.num_nodes(), 0);
  for_each_path(topo, [&](const std::vector<int>& p) {
    int& d = depth[topo.edge_head[p.back()]];
    d = std::max(d, static_cast<int>(p.size()));
  });
  return depth;
}

// Gain of message i on edge e as the sum over paths of coefficient products.
inline Eigen::MatrixXd path_gains(const Network& net, const CodingSolution& sol) {
  const Topology topo = make_topology(net);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(topo.source_edges.size()), topo.num_edges());
  std::map<int, int> message_of;
  for (std::size_t i = 0; i < topo.source_edges.size(); ++i) message_of[topo.source_edges[i]] = static_cast<int>(i);
  for_each_path(topo, [&](const std::vector<int>& p) {
    double w = 1;
    for (std::size_t j = 1; j < p.size(); ++j) {
      auto it = sol.alpha.find({net.edges[p[j - 1]].id, net.edges[p[j]].id});
      w *= it == sol.alpha.end() ? 0.0 : it->second;
    }
    G(message_of.at(p.front()), p.back()) += w;
  });
  return G;
}

// Uniform coefficients on every consecutive pair and every terminal input.
inline CodingSolution random_solution(const Network& net, std::mt19937_64& rng, double lo, double hi) {
  const Topology topo = make_topology(net);
  std::uniform_real_distribution<double> draw(lo, hi);
  CodingSolution sol;
  for (int v = 0; v < topo.num_nodes(); ++v)
    for (int e : topo.inc[v])
      for (int e2 : topo.out[v]) sol.alpha[{net.edges[e].id, net.edges[e2].id}] = draw(rng);
  for (const auto& [t, wanted] : net.demands) {
    auto& per = sol.beta[t];
    per.resize(wanted.size());
    for (auto& m : per)
      for (int e : topo.inc[topo.node(t)]) m[net.edges[e].id] = draw(rng);
  }
  return sol;
}

inline Network random_net(std::uint64_t seed, int nodes, int max_indeg, int terminals, int demands = 1) {
  RandomNetworkParams p;
  p.nodes = nodes;
  p.max_in_degree = max_indeg;
  p.terminals = terminals;
  p.seed = seed;
  p.max_demands = demands;
  return random_network(p);
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

}  // namespace qlnc::testing

namespace qlnc::testing {

// s -> t over `k` parallel edges p1..pk, t demanding message 1.
inline Network parallel_edges(int k) {
  Network net;
  net.name = "parallel";
  net.nodes = {{"s", NodeRole::source}, {"t", NodeRole::terminal}};
  for (int i = 1; i <= k; ++i) {
    net.edges.push_back({"p" + std::to_string(i), "s", "t"});
    net.source_edge_order.push_back("p" + std::to_string(i));
  }
  net.demands["t"] = {1};
  return net;
}

// s -> a -> t.
inline Network short_chain() {
  Network net;
  net.name = "short-chain";
  net.nodes = {{"s", NodeRole::source}, {"a", NodeRole::internal}, {"t", NodeRole::terminal}};
  net.edges = {{"e1", "s", "a"}, {"e2", "a", "t"}};
  net.source_edge_order = {"e1"};
  net.demands["t"] = {1};
  return net;
}

}  // namespace qlnc::testing
