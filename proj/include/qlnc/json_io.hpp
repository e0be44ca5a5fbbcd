#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

namespace qlnc {

using Json = nlohmann::json;

// Serializes with every floating-point number printed at 17 significant
// digits, so binary64 values round-trip exactly.
std::string dump_json(const Json& doc, int indent = 2);
void write_json_file(const std::string& path, const Json& doc);
Json read_json_file(const std::string& path);

std::string format_double(double x);

}  // namespace qlnc
