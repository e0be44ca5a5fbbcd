#include <fstream>
#include <sstream>

#include "qlnc/errors.hpp"
#include "qlnc/json_io.hpp"
#include "qlnc/netmodel.hpp"

namespace qlnc {

namespace {

[[noreturn]] void schema_error(const std::string& field, const std::string& what) {
  throw LoadError(LoadError::Kind::schema, "schema error at '" + field + "': " + what);
}

const Json& member(const Json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(where + "." + key, "missing field");
  return *it;
}

std::string string_field(const Json& obj, const char* key, const std::string& where) {
  const Json& v = member(obj, key, where);
  if (!v.is_string()) schema_error(where + "." + key, "expected a string");
  return v.get<std::string>();
}

int int_value(const Json& v, const std::string& where) {
  if (!v.is_number_integer()) schema_error(where, "expected an integer");
  return v.get<int>();
}

NodeRole parse_role(const std::string& s, const std::string& where) {
  if (s == "source") return NodeRole::source;
  if (s == "internal") return NodeRole::internal;
  if (s == "terminal") return NodeRole::terminal;
  schema_error(where, "unknown role '" + s + "'");
}

Network network_from_json(const Json& doc) {
  if (!doc.is_object()) schema_error("$", "expected an object");
  Network net;
  net.name = string_field(doc, "name", "$");
  net.base = int_value(member(doc, "base", "$"), "$.base");

  const Json& nodes = member(doc, "nodes", "$");
  if (!nodes.is_array()) schema_error("$.nodes", "expected an array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string where = "$.nodes[" + std::to_string(i) + "]";
    if (!nodes[i].is_object()) schema_error(where, "expected an object");
    Node node;
    node.id = string_field(nodes[i], "id", where);
    node.role = parse_role(string_field(nodes[i], "role", where), where + ".role");
    net.nodes.push_back(std::move(node));
  }

  const Json& edges = member(doc, "edges", "$");
  if (!edges.is_array()) schema_error("$.edges", "expected an array");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string where = "$.edges[" + std::to_string(i) + "]";
    if (!edges[i].is_object()) schema_error(where, "expected an object");
    net.edges.push_back({string_field(edges[i], "id", where),
                         string_field(edges[i], "from", where),
                         string_field(edges[i], "to", where)});
  }

  const Json& order = member(doc, "source_edge_order", "$");
  if (!order.is_array()) schema_error("$.source_edge_order", "expected an array");
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (!order[i].is_string())
      schema_error("$.source_edge_order[" + std::to_string(i) + "]", "expected a string");
    net.source_edge_order.push_back(order[i].get<std::string>());
  }

  const Json& demands = member(doc, "demands", "$");
  if (!demands.is_object()) schema_error("$.demands", "expected an object");
  const int k = static_cast<int>(net.source_edge_order.size());
  for (auto it = demands.begin(); it != demands.end(); ++it) {
    const std::string where = "$.demands." + it.key();
    if (!it.value().is_array()) schema_error(where, "expected an array");
    std::vector<int> wanted;
    for (std::size_t j = 0; j < it.value().size(); ++j) {
      const std::string at = where + "[" + std::to_string(j) + "]";
      const int m = int_value(it.value()[j], at);
      if (m < 1 || m > k)
        schema_error(at, "demand out of range: " + std::to_string(m) + " not in [1, " +
                             std::to_string(k) + "]");
      wanted.push_back(m);
    }
    net.demands.emplace(it.key(), std::move(wanted));
  }
  return net;
}

Json network_to_json(const Network& net) {
  Json doc = Json::object();
  doc["name"] = net.name;
  doc["base"] = net.base;
  doc["nodes"] = Json::array();
  for (const auto& n : net.nodes)
    doc["nodes"].push_back({{"id", n.id}, {"role", std::string(to_string(n.role))}});
  doc["edges"] = Json::array();
  for (const auto& e : net.edges)
    doc["edges"].push_back({{"id", e.id}, {"from", e.from}, {"to", e.to}});
  doc["source_edge_order"] = net.source_edge_order;
  doc["demands"] = Json::object();
  for (const auto& [t, w] : net.demands) doc["demands"][t] = w;
  return doc;
}

}  // namespace

Network network_from_json_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw LoadError(LoadError::Kind::parse, e.what());
  }
  return network_from_json(doc);
}

std::string network_to_json_text(const Network& net) { return dump_json(network_to_json(net)); }

Network load_network(const std::string& path) {
  try {
    return network_from_json(read_json_file(path));
  } catch (const LoadError& e) {
    if (e.kind() == LoadError::Kind::schema)
      throw LoadError(LoadError::Kind::schema, path + ": " + e.what());
    throw;
  }
}

void save_network(const Network& net, const std::string& path) {
  write_json_file(path, network_to_json(net));
}

}  // namespace qlnc
