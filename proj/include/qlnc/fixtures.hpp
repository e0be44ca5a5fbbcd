#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qlnc/netmodel.hpp"
#include "qlnc/xfer.hpp"

// Built-in networks. g1, g2 and g3 are reconstructions of well-known
// non-multicast networks; see fixtures/README.md for how each was pinned down.
namespace qlnc::fixtures {

Network identity();
Network chain();
Network butterfly();
Network g1();
Network g2();
Network g3();

std::vector<std::string> names();
Network by_name(const std::string& name);

/// Known solution for a fixture: exact codes for identity, chain, butterfly
/// and g1; the published approximate coefficients for g2; both combined for g3.
std::optional<CodingSolution> reference_solution(const std::string& name);

}  // namespace qlnc::fixtures
