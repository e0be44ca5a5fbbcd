#include <doctest.h>

#include "qlnc/fixtures.hpp"
#include "qlnc/xfer.hpp"

using namespace qlnc;

namespace {

std::string shipped(const std::string& file) { return std::string(QLNC_FIXTURE_DIR) + "/" + file; }

}  // namespace

TEST_SUITE("fixtures") {
  TEST_CASE("shipped files match the built-in fixtures") {
    for (const auto& name : fixtures::names()) {
      CAPTURE(name);
      CHECK(load_network(shipped(name + ".json")) == fixtures::by_name(name));
      CHECK(load_solution(shipped(name + ".sol.json")) == *fixtures::reference_solution(name));
    }
  }

  TEST_CASE("g1 terminal v4 recovers m1 from three sums") {
    const auto sol = *fixtures::reference_solution("g1");
    const auto& v4 = sol.beta.at("v4").at(0);
    CHECK(v4.at("b7") == -0.5);
    CHECK(v4.at("b8") == 0.5);
    CHECK(v4.at("b9") == 0.5);
  }

  TEST_CASE("g2 reconstruction shape") {
    const Network net = fixtures::g2();
    CHECK(net.edges.size() == 21);
    CHECK(depth_partition(net).depth == 6);
    CHECK(net.num_messages() == 3);
    const auto prof = gamma_profile(net, *fixtures::reference_solution("g2"));
    CHECK(prof.gamma_max == doctest::Approx(0.00571923).epsilon(1e-6));
  }

  TEST_CASE("g3 joins g1 and g2 without interference") {
    const auto p1 = gamma_profile(fixtures::g1(), *fixtures::reference_solution("g1"));
    const auto p2 = gamma_profile(fixtures::g2(), *fixtures::reference_solution("g2"));
    const auto p3 = gamma_profile(fixtures::g3(), *fixtures::reference_solution("g3"));
    CHECK(p3.gamma_max == doctest::Approx(std::max(p1.gamma_max, p2.gamma_max)).epsilon(1e-12));
    CHECK(p3.F == doctest::Approx(p1.F + p2.F).epsilon(1e-12));
    CHECK(fixtures::g3().num_messages() == 5);
  }
}
