#pragma once

#include <optional>
#include <string>

#include "qlnc/json_io.hpp"

namespace qlnc {

inline constexpr const char* kToolVersion = "qlnc 0.1.0";

std::string sha256_file(const std::string& path);

struct ArtifactRef {
  std::string path;
  std::string sha256;
};

/// Everything needed to reproduce a run: inputs by hash, solver settings,
/// the plan and the verification outcome.
struct RunManifest {
  ArtifactRef network;
  std::optional<ArtifactRef> solution;
  std::optional<ArtifactRef> plan_file;
  std::optional<ArtifactRef> report_file;
  std::optional<Json> solver;  // config and seed from the design log
  std::optional<Json> plan;
  std::optional<Json> verification;
  std::string tool_version = kToolVersion;
};

Json manifest_to_json(const RunManifest& m);

/// Human-readable summary with the rate reference table.
std::string render_summary(const RunManifest& m, const Json& solution_doc);

}  // namespace qlnc
