#include "qlnc/fixtures.hpp"

#include <cctype>

#include "qlnc/errors.hpp"

namespace qlnc::fixtures {

namespace {

struct Builder {
  Network net;

  Builder(std::string name, int messages) {
    net.name = std::move(name);
    add_node("s", NodeRole::source);
    for (int i = 1; i <= messages; ++i) {
      add_node("r" + std::to_string(i), NodeRole::internal);
      add_edge("s" + std::to_string(i), "s", "r" + std::to_string(i));
      net.source_edge_order.push_back("s" + std::to_string(i));
    }
  }
  void add_node(std::string id, NodeRole role) { net.nodes.push_back({std::move(id), role}); }
  void add_edge(std::string id, std::string from, std::string to) {
    net.edges.push_back({std::move(id), std::move(from), std::move(to)});
  }
  void terminal(std::string id, std::vector<int> demands) {
    net.demands[id] = std::move(demands);
    add_node(std::move(id), NodeRole::terminal);
  }
};

using Alpha = std::map<std::pair<std::string, std::string>, double>;

CodingSolution g1_solution();
CodingSolution g2_solution();

}  // namespace

Network identity() {
  Network net;
  net.name = "identity";
  net.nodes = {{"s", NodeRole::source}, {"t", NodeRole::terminal}};
  net.edges = {{"e1", "s", "t"}};
  net.source_edge_order = {"e1"};
  net.demands = {{"t", {1}}};
  return net;
}

Network chain() {
  Network net;
  net.name = "chain";
  net.nodes = {{"s", NodeRole::source},
               {"a", NodeRole::internal},
               {"b", NodeRole::internal},
               {"t", NodeRole::terminal}};
  net.edges = {{"e1", "s", "a"}, {"e2", "a", "b"}, {"e3", "b", "t"}};
  net.source_edge_order = {"e1"};
  net.demands = {{"t", {1}}};
  return net;
}

Network butterfly() {
  Network net;
  net.name = "butterfly";
  net.nodes = {{"s", NodeRole::source},    {"a", NodeRole::internal},
               {"b", NodeRole::internal},  {"c", NodeRole::internal},
               {"d", NodeRole::internal},  {"t1", NodeRole::terminal},
               {"t2", NodeRole::terminal}};
  net.edges = {{"e1", "s", "a"},  {"e2", "s", "b"},  {"e3", "a", "c"},
               {"e4", "b", "c"},  {"e5", "a", "t1"}, {"e6", "b", "t2"},
               {"e7", "c", "d"},  {"e8", "d", "t1"}, {"e9", "d", "t2"}};
  net.source_edge_order = {"e1", "e2"};
  net.demands = {{"t1", {1, 2}}, {"t2", {1, 2}}};
  return net;
}

// Five messages, seven terminals. v1, v2, v3 carry pairwise sums of m1..m3;
// the middle terminal v4 recovers m1 as (-v1 + v2 + v3) / 2, which needs an
// odd characteristic and is exact over the reals.
Network g1() {
  Builder b("g1", 5);
  for (const char* v : {"v1", "v2", "v3", "w1", "w2"}) b.add_node(v, NodeRole::internal);
  b.add_edge("a1", "r2", "v1");
  b.add_edge("a2", "r3", "v1");
  b.add_edge("a3", "r1", "v2");
  b.add_edge("a4", "r3", "v2");
  b.add_edge("a5", "r1", "v3");
  b.add_edge("a6", "r2", "v3");
  b.add_edge("a7", "v1", "w1");
  b.add_edge("a8", "r4", "w1");
  b.add_edge("a9", "v2", "w2");
  b.add_edge("a10", "r5", "w2");
  b.terminal("t1", {2});
  b.add_edge("b1", "v3", "t1");
  b.add_edge("b2", "r1", "t1");
  b.terminal("t2", {3});
  b.add_edge("b3", "v1", "t2");
  b.add_edge("b4", "r2", "t2");
  b.terminal("t3", {1});
  b.add_edge("b5", "v2", "t3");
  b.add_edge("b6", "r3", "t3");
  b.terminal("v4", {1});
  b.add_edge("b7", "v1", "v4");
  b.add_edge("b8", "v2", "v4");
  b.add_edge("b9", "v3", "v4");
  b.terminal("t5", {4});
  b.add_edge("b10", "w1", "t5");
  b.add_edge("b11", "v1", "t5");
  b.terminal("t6", {5});
  b.add_edge("b12", "w2", "t6");
  b.add_edge("b13", "v2", "t6");
  b.terminal("t7", {4});
  b.add_edge("b14", "w1", "t7");
  b.add_edge("b15", "r2", "t7");
  b.add_edge("b16", "r3", "t7");
  return b.net;
}

// Three messages, three terminals. Edges e1..e12 carry the coded symbols:
// combiners e1,e2->e5 and e3,e4->e6 in the first stage, e7,e8->e11 and
// e9,e10->e12 in the second. Single-input nodes repeat their input.
Network g2() {
  Builder b("g2", 3);
  for (const char* v : {"x", "y", "rx", "ry", "z3", "z4", "rz3", "rz4"})
    b.add_node(v, NodeRole::internal);
  b.terminal("t1", {3});
  b.terminal("t2", {2});
  b.terminal("t3", {1});
  b.add_edge("e1", "r1", "x");
  b.add_edge("e2", "r2", "x");
  b.add_edge("e3", "r2", "y");
  b.add_edge("e4", "r3", "y");
  b.add_edge("f1", "r1", "t1");
  b.add_edge("e5", "x", "rx");
  b.add_edge("e6", "y", "ry");
  b.add_edge("e7", "rx", "z3");
  b.add_edge("e8", "ry", "z3");
  b.add_edge("e9", "rx", "z4");
  b.add_edge("e10", "r3", "z4");
  b.add_edge("e11", "z3", "rz3");
  b.add_edge("e12", "z4", "rz4");
  b.add_edge("g1", "rz3", "t1");
  b.add_edge("g2", "rz3", "t2");
  b.add_edge("g3", "rz4", "t2");
  b.add_edge("g4", "rz4", "t3");
  b.add_edge("f2", "ry", "t3");
  return b.net;
}

namespace {

std::string prefixed(const std::string& prefix, const std::string& id, bool shared) {
  return shared ? id : prefix + id;
}

bool shared_node(const std::string& id) { return id == "s" || (id.size() > 1 && id[0] == 'r' && std::isdigit(static_cast<unsigned char>(id[1]))); }
bool shared_edge(const std::string& id) { return id.size() > 1 && id[0] == 's' && std::isdigit(static_cast<unsigned char>(id[1])); }

// Joins two Builder-made networks that share the source and the message
// repeaters r1..rk; everything else is renamed with a prefix.
void merge_into(Network& out, const Network& part, const std::string& prefix) {
  for (const auto& n : part.nodes) {
    if (shared_node(n.id)) continue;
    out.nodes.push_back({prefix + n.id, n.role});
  }
  for (const auto& e : part.edges) {
    if (shared_edge(e.id)) continue;
    out.edges.push_back({prefix + e.id, prefixed(prefix, e.from, shared_node(e.from)),
                         prefixed(prefix, e.to, shared_node(e.to))});
  }
  for (const auto& [t, w] : part.demands) out.demands[prefix + t] = w;
}

void merge_solution(CodingSolution& out, const CodingSolution& part, const std::string& prefix) {
  for (const auto& [key, value] : part.alpha)
    out.alpha[{prefixed(prefix, key.first, shared_edge(key.first)),
               prefixed(prefix, key.second, shared_edge(key.second))}] = value;
  for (const auto& [t, per_demand] : part.beta) {
    auto& dst = out.beta[prefix + t];
    for (const auto& d : per_demand) {
      std::map<std::string, double> renamed;
      for (const auto& [edge, value] : d) renamed[prefixed(prefix, edge, shared_edge(edge))] = value;
      dst.push_back(std::move(renamed));
    }
  }
}

}  // namespace

// g1 and g2 side by side on a common five-message source; the g2 half uses
// messages 1..3.
Network g3() {
  Builder b("g3", 5);
  merge_into(b.net, g1(), "a_");
  merge_into(b.net, g2(), "b_");
  return b.net;
}

std::vector<std::string> names() { return {"identity", "chain", "butterfly", "g1", "g2", "g3"}; }

Network by_name(const std::string& name) {
  if (name == "identity") return identity();
  if (name == "chain") return chain();
  if (name == "butterfly") return butterfly();
  if (name == "g1") return g1();
  if (name == "g2") return g2();
  if (name == "g3") return g3();
  throw Error("unknown fixture '" + name + "'");
}

namespace {

// Every node other than the source forwards to each outgoing edge the plain
// sum of its inputs.
Alpha summing_alpha(const Network& net) {
  Alpha alpha;
  for (const auto& out : net.edges) {
    if (out.from == "s") continue;
    for (const auto& in : net.edges)
      if (in.to == out.from) alpha[{in.id, out.id}] = 1.0;
  }
  return alpha;
}

CodingSolution g1_solution() {
  CodingSolution sol;
  sol.alpha = summing_alpha(g1());
  sol.beta["t1"] = {{{"b1", 1.0}, {"b2", -1.0}}};
  sol.beta["t2"] = {{{"b3", 1.0}, {"b4", -1.0}}};
  sol.beta["t3"] = {{{"b5", 1.0}, {"b6", -1.0}}};
  sol.beta["v4"] = {{{"b7", -0.5}, {"b8", 0.5}, {"b9", 0.5}}};
  sol.beta["t5"] = {{{"b10", 1.0}, {"b11", -1.0}}};
  sol.beta["t6"] = {{{"b12", 1.0}, {"b13", -1.0}}};
  sol.beta["t7"] = {{{"b14", 1.0}, {"b15", -1.0}, {"b16", -1.0}}};
  return sol;
}

CodingSolution g2_solution() {
  CodingSolution sol;
  // Repeaters.
  for (auto [a, b] : std::initializer_list<std::pair<const char*, const char*>>{
           {"s1", "e1"}, {"s1", "f1"}, {"s2", "e2"}, {"s2", "e3"}, {"s3", "e4"},
           {"s3", "e10"}, {"e5", "e7"}, {"e5", "e9"}, {"e6", "e8"}, {"e6", "f2"},
           {"e11", "g1"}, {"e11", "g2"}, {"e12", "g3"}, {"e12", "g4"}})
    sol.alpha[{a, b}] = 1.0;
  sol.alpha[{"e1", "e5"}] = 0.0332528;
  sol.alpha[{"e2", "e5"}] = -11.8712;
  sol.alpha[{"e3", "e6"}] = 16.3384;
  sol.alpha[{"e4", "e6"}] = 2.69746;
  sol.alpha[{"e7", "e11"}] = 2.79007;
  sol.alpha[{"e8", "e11"}] = 2.02721;
  sol.alpha[{"e9", "e12"}] = -1.16509;
  sol.alpha[{"e10", "e12"}] = 2.28349;
  sol.beta["t1"] = {{{"f1", -0.0169705}, {"g1", 0.182872}}};
  sol.beta["t2"] = {{{"g2", -0.030174}, {"g3", 0.0722992}}};
  sol.beta["t3"] = {{{"g4", -25.8106}, {"f2", 21.8495}}};
  return sol;
}

}  // namespace

std::optional<CodingSolution> reference_solution(const std::string& name) {
  if (name == "identity") {
    CodingSolution sol;
    sol.beta["t"] = {{{"e1", 1.0}}};
    return sol;
  }
  if (name == "chain") {
    CodingSolution sol;
    sol.alpha = summing_alpha(chain());
    sol.beta["t"] = {{{"e3", 1.0}}};
    return sol;
  }
  if (name == "butterfly") {
    CodingSolution sol;
    sol.alpha = summing_alpha(butterfly());
    sol.beta["t1"] = {{{"e5", 1.0}, {"e8", 0.0}}, {{"e5", -1.0}, {"e8", 1.0}}};
    sol.beta["t2"] = {{{"e6", -1.0}, {"e9", 1.0}}, {{"e6", 1.0}, {"e9", 0.0}}};
    return sol;
  }
  if (name == "g1") return g1_solution();
  if (name == "g2") return g2_solution();
  if (name == "g3") {
    CodingSolution sol;
    merge_solution(sol, g1_solution(), "a_");
    merge_solution(sol, g2_solution(), "b_");
    return sol;
  }
  return std::nullopt;
}

}  // namespace qlnc::fixtures
