#include "manifest.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include <openssl/evp.h>

#include "qlnc/errors.hpp"

namespace qlnc {

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(LoadError::Kind::io, "cannot read " + path);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256 failed for " + path);
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

namespace {

Json ref_json(const ArtifactRef& r) { return {{"path", r.path}, {"sha256", r.sha256}}; }

}  // namespace

Json manifest_to_json(const RunManifest& m) {
  Json doc = Json::object();
  doc["tool_version"] = m.tool_version;
  doc["network"] = ref_json(m.network);
  doc["solution"] = m.solution ? ref_json(*m.solution) : Json(nullptr);
  doc["solver"] = m.solver ? *m.solver : Json(nullptr);
  doc["plan_file"] = m.plan_file ? ref_json(*m.plan_file) : Json(nullptr);
  doc["plan"] = m.plan ? *m.plan : Json(nullptr);
  doc["report_file"] = m.report_file ? ref_json(*m.report_file) : Json(nullptr);
  doc["verification"] = m.verification ? *m.verification : Json(nullptr);
  return doc;
}

std::string render_summary(const RunManifest& m, const Json& solution_doc) {
  std::ostringstream out;
  out << m.tool_version << "\n";
  out << "network   " << m.network.path << "  sha256 " << m.network.sha256 << "\n";
  if (m.solution) {
    out << "solution  " << m.solution->path << "  sha256 " << m.solution->sha256 << "\n";
    if (solution_doc.contains("gamma_max"))
      out << "  gamma_max " << format_double(solution_doc["gamma_max"].get<double>()) << "  F "
          << format_double(solution_doc.value("F", 0.0)) << "\n";
  }
  if (m.solver) {
    const Json& c = m.solver->at("config");
    out << "solver    seed " << c.at("seed") << "  restarts " << c.at("restarts") << "  max_iters "
        << c.at("max_iters") << "  best restart " << m.solver->value("best_restart", -1) << "\n";
  }
  if (m.plan) {
    const Json& p = *m.plan;
    out << "plan      method " << p.at("method").get<std::string>() << "  b=" << p.at("b") << " P=" << p.at("P")
        << " p=" << p.at("p") << " M=" << p.at("M") << " n=" << p.at("n_bits")
        << "  rate " << p.at("rate").get<std::string>() << "\n";
  }
  if (m.verification) {
    const Json& v = *m.verification;
    out << "verify    " << v.at("mode").get<std::string>() << "  cases " << v.at("total_cases") << "  failures "
        << v.at("failure_count") << "  " << (v.at("passed").get<bool>() ? "PASSED" : "FAILED") << "\n";
    out << "  max terminal residual " << format_double(v.at("max_terminal_residual").get<double>()) << "\n";
  }
  out << "\nrate table\n";
  out << "  best routing, combined network      1/3\n";
  out << "  quasi-linear, n=7, P=14, p=6        7/20\n";
  out << "  routing on g2 with quasi-linear g1  2/3\n";
  if (m.plan) out << "  this run                            " << m.plan->at("rate").get<std::string>() << "\n";
  return out.str();
}

}  // namespace qlnc
