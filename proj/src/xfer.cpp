#include "qlnc/xfer.hpp"

#include <algorithm>
#include <cmath>

#include "qlnc/errors.hpp"

namespace qlnc {

std::vector<std::string> check_solution(const Network& net, const Topology& topo,
                                        const CodingSolution& sol) {
  std::vector<std::string> problems;
  for (const auto& [key, value] : sol.alpha) {
    const std::string name = key.first + "->" + key.second;
    auto a = topo.edge_index.find(key.first);
    auto b = topo.edge_index.find(key.second);
    if (a == topo.edge_index.end() || b == topo.edge_index.end()) {
      problems.push_back("alpha " + name + ": unknown edge");
      continue;
    }
    if (topo.edge_head[a->second] != topo.edge_tail[b->second])
      problems.push_back("alpha " + name + ": edges are not consecutive");
    if (!std::isfinite(value)) problems.push_back("alpha " + name + ": not finite");
  }
  for (const auto& [terminal, per_demand] : sol.beta) {
    auto d = net.demands.find(terminal);
    if (d == net.demands.end()) {
      problems.push_back("beta " + terminal + ": not a demanding terminal");
      continue;
    }
    if (per_demand.size() != d->second.size())
      problems.push_back("beta " + terminal + ": expected " + std::to_string(d->second.size()) +
                         " demand entries");
    const auto& inc = topo.inc[topo.node(terminal)];
    for (std::size_t j = 0; j < per_demand.size(); ++j) {
      for (const auto& [edge, value] : per_demand[j]) {
        auto e = topo.edge_index.find(edge);
        if (e == topo.edge_index.end() ||
            std::find(inc.begin(), inc.end(), e->second) == inc.end())
          problems.push_back("beta " + terminal + "/demand_" + std::to_string(j + 1) + "/" +
                             edge + ": not an incoming edge of the terminal");
        if (!std::isfinite(value))
          problems.push_back("beta " + terminal + "/" + edge + ": not finite");
      }
    }
  }
  return problems;
}

void require_valid_solution(const Network& net, const Topology& topo, const CodingSolution& sol) {
  auto problems = check_solution(net, topo, sol);
  if (!problems.empty()) throw Error("solution does not fit network: " + problems.front());
}

std::vector<AlphaEntry> alpha_entries(const Topology& topo, const CodingSolution& sol) {
  std::vector<AlphaEntry> out;
  out.reserve(sol.alpha.size());
  for (const auto& [key, value] : sol.alpha) {
    const int a = topo.edge(key.first);
    const int b = topo.edge(key.second);
    if (topo.edge_head[a] != topo.edge_tail[b])
      throw Error("alpha " + key.first + "->" + key.second + ": edges are not consecutive");
    out.push_back({a, b, value});
  }
  return out;
}

std::vector<Eigen::VectorXd> beta_vectors(const Topology& topo, const std::vector<DemandSlot>& slots,
                                          const CodingSolution& sol) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(slots.size());
  for (const auto& slot : slots) {
    const auto& inc = topo.inc[slot.node];
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(inc.size()));
    auto t = sol.beta.find(slot.terminal);
    if (t != sol.beta.end() && static_cast<std::size_t>(slot.position) <= t->second.size()) {
      for (const auto& [edge, value] : t->second[slot.position - 1]) {
        const int e = topo.edge(edge);
        auto pos = std::find(inc.begin(), inc.end(), e);
        if (pos == inc.end()) throw Error("beta edge '" + edge + "' does not enter " + slot.terminal);
        b(pos - inc.begin()) = value;
      }
    }
    out.push_back(std::move(b));
  }
  return out;
}

GammaProfile gamma_profile(const Topology& topo, const std::vector<DemandSlot>& slots,
                           const Eigen::MatrixXd& gains, const std::vector<Eigen::VectorXd>& betas) {
  GammaProfile prof;
  const Eigen::Index k = gains.rows();
  for (std::size_t s = 0; s < slots.size(); ++s) {
    const auto& inc = topo.inc[slots[s].node];
    DemandGamma dg;
    dg.slot = slots[s];
    dg.gamma = Eigen::VectorXd::Zero(k);
    for (std::size_t r = 0; r < inc.size(); ++r)
      dg.gamma += betas[s](static_cast<Eigen::Index>(r)) * gains.col(inc[r]);
    const Eigen::Index w = slots[s].message - 1;
    for (Eigen::Index i = 0; i < k; ++i) {
      const double dev = i == w ? dg.gamma(i) - 1.0 : dg.gamma(i);
      dg.deviation += std::abs(dev);
      dg.squared += dev * dev;
    }
    prof.F += dg.squared;
    prof.gamma_max = std::max(prof.gamma_max, dg.deviation);
    prof.demands.push_back(std::move(dg));
  }
  return prof;
}

GammaProfile gamma_profile(const Network& net, const CodingSolution& sol) {
  const Topology topo = make_topology(net);
  require_valid_solution(net, topo, sol);
  const auto slots = demand_slots(net, topo);
  return gamma_profile(topo, slots, gain_matrix<double>(topo, sol), beta_vectors(topo, slots, sol));
}

}  // namespace qlnc
