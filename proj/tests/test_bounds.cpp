#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "qlnc/bounds.hpp"
#include "qlnc/errors.hpp"
#include "qlnc/fixtures.hpp"
#include "qlnc/simkernel.hpp"
#include "qlnc/solver.hpp"
#include "support.hpp"

using namespace qlnc;

namespace {

NetworkStats stats(int depth, int indeg, double alpha, int base = 2) {
  NetworkStats s;
  s.depth = depth;
  s.max_in_degree = indeg;
  s.alpha_max = alpha;
  s.base = base;
  return s;
}

constexpr double kPaperGamma = 0.00572545;

}  // namespace

TEST_SUITE("bounds") {
  TEST_CASE("lemma bounds by direct formula") {
    const auto s = stats(3, 2, 2.0);
    CHECK(lemma1_bound(s, 10, 0) == 10.0);
    CHECK(lemma1_bound(s, 10, 2) == 160.0);
    CHECK(lemma2_bound(s, 4, 0) == 0.0);
    CHECK(lemma2_bound(s, 4, 2) == doctest::Approx(0.3125));
    const auto unit = stats(5, 2, 0.5);
    CHECK(lemma2_bound(unit, 3, 4) == doctest::Approx(4.0 / 8));
    CHECK(lemma1_bound(unit, 7, 4) == 7.0);
  }

  TEST_CASE("lemma bounds reject shrinking networks and bad depths") {
    const auto small = stats(4, 2, 0.25);
    CHECK(lemma1_bound(small, 10, 0) == 10.0);
    CHECK_THROWS_AS(lemma1_bound(small, 10, 1), DomainError);
    CHECK_THROWS_AS(lemma2_bound(small, 3, 2), DomainError);
    CHECK_THROWS_AS(lemma1_bound(stats(3, 2, 2), 10, 3), DomainError);
    CHECK_THROWS_AS(lemma1_bound(stats(3, 2, 2), 10, -1), DomainError);
  }

  TEST_CASE("theorem plan reproduces the published digit counts") {
    const auto plan = plan_theorem(stats(6, 2, 16.3384), kPaperGamma, MessageRequest::with_bound(64), 3);
    CHECK(plan.fmt.frac_digits == 8);
    CHECK(plan.fmt.int_digits == 18);
    CHECK(plan.n_bits == 7);
    CHECK(plan.margin > 0);
    CHECK(plan.effective_depth == 3);
  }

  TEST_CASE("message bound and bit width") {
    CHECK(max_message_bound(kPaperGamma) == 87);
    CHECK(bits_for_bound(87) == 7);
    CHECK(bound_for_bits(7) == 64);
    for (int n = 1; n <= 62; ++n) {
      CHECK(bits_for_bound(bound_for_bits(n)) == n);
      // The usable range [-2^(n-1), 2^(n-1)-1] must sit inside [-M, M].
      const std::int64_t M = bound_for_bits(n);
      CHECK(bound_for_bits(bits_for_bound(M)) <= M);
      if (n < 62) CHECK(bits_for_bound(2 * M - 1) == n);
    }
    CHECK(bits_for_bound(63) == 6);
    CHECK_THROWS_AS(max_message_bound(0.6), InfeasibleError);
    CHECK_THROWS_AS(max_message_bound(0.0), Error);
  }

  TEST_CASE("feasibility boundary on M") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(1e-5, 0.2);
    const auto s = stats(3, 2, 1.5);
    for (int i = 0; i < 500; ++i) {
      const double g = u(rng);
      const auto M = max_message_bound(g);
      CHECK_NOTHROW(plan_theorem(s, g, MessageRequest::with_bound(M)));
      if (static_cast<double>(M + 1) >= 1 / (2 * g))
        CHECK_THROWS_AS(plan_theorem(s, g, MessageRequest::with_bound(M + 1)), InfeasibleError);
    }
    CHECK_THROWS_AS(plan_theorem(s, kPaperGamma, MessageRequest::with_bound(88)), InfeasibleError);
  }

  TEST_CASE("depth one needs no fractional digits") {
    const auto plan = plan_theorem(stats(1, 1, 0.0), 0.0, MessageRequest::with_bound(100));
    CHECK(plan.fmt.frac_digits == 0);
    CHECK(plan.fmt.int_digits == 8);
  }

  TEST_CASE("rates") {
    CHECK(rate(7, 14, 6, 2).to_string() == "7/20");
    CHECK(rate(1, 1, 0, 2).to_string() == "1/1");
    CHECK(rate(7, 14, 7, 2).to_string() == "1/3");
    for (int n = 1; n <= 64; ++n) {
      const Rate r = rate(n, n + 2, 0, 2);
      const int g = std::gcd(n, n + 2);
      CHECK(r.exact);
      CHECK(r.num == n / g);
      CHECK(r.den == (n + 2) / g);
    }
    CHECK(rate(6, 3, 0, 4).to_string() == "1/1");
    const Rate r10 = rate(4, 2, 1, 10);
    CHECK_FALSE(r10.exact);
    CHECK(r10.value == doctest::Approx(4 / (3 * std::log2(10.0))));
  }

  TEST_CASE("tight plan on the identity network") {
    CodingSolution id;
    id.beta["t"] = {{{"e1", 1.0}}};
    for (std::int64_t M : {1, 7, 8, 64, 1000}) {
      const auto plan = plan_tight(fixtures::identity(), id, MessageRequest::with_bound(M));
      CHECK(plan.fmt.frac_digits == 0);
      CHECK(plan.fmt.int_digits == static_cast<int>(std::ceil(std::log2(2.0 * M + 2))));
    }
    const auto four = plan_tight(fixtures::identity(), id, MessageRequest::with_bits(4));
    CHECK(four.fmt.int_digits == 5);
    CHECK(four.rate.to_string() == "4/5");
  }

  TEST_CASE("tight analysis on g2") {
    const Network net = fixtures::g2();
    const CodingSolution sol = *fixtures::reference_solution("g2");
    const TightAnalysis ta = tight_analysis(net, sol, 64);
    const Topology topo = make_topology(net);
    CHECK(ta.error_units[topo.edge("e11")] == doctest::Approx(5.81728).epsilon(1e-5));
    CHECK(ta.error_units[topo.edge("e12")] == doctest::Approx(2.16509).epsilon(1e-5));
    // Repeater edges add no error of their own.
    CHECK(ta.error_units[topo.edge("e1")] == 0.0);
    CHECK(ta.error_units[topo.edge("e5")] == 1.0);
    CHECK(ta.error_units[topo.edge("e7")] == ta.error_units[topo.edge("e5")]);

    const auto plan = plan_tight(net, sol, MessageRequest::with_bound(64));
    CHECK(plan.fmt.int_digits == 14);
    CHECK(plan.fmt.frac_digits == 7);
  }

  TEST_CASE("monotonicity in M and gamma") {
    const Network net = fixtures::g2();
    const CodingSolution sol = *fixtures::reference_solution("g2");
    const NetworkStats s = network_stats(net, sol);
    int lastP = 0, lastp = 0, lastTP = 0, lasttp = 0;
    for (std::int64_t M = 1; M <= 87; ++M) {
      const auto th = plan_theorem(s, kPaperGamma, MessageRequest::with_bound(M), 3);
      const auto ti = plan_tight(net, sol, MessageRequest::with_bound(M));
      CHECK(th.fmt.int_digits >= lastTP);
      CHECK(th.fmt.frac_digits >= lasttp);
      CHECK(ti.fmt.int_digits >= lastP);
      CHECK(ti.fmt.frac_digits >= lastp);
      lastTP = th.fmt.int_digits, lasttp = th.fmt.frac_digits;
      lastP = ti.fmt.int_digits, lastp = ti.fmt.frac_digits;
    }
    int last = 0;
    for (double g = 0; g < 0.0077; g += 0.0001) {
      const auto th = plan_theorem(s, g, MessageRequest::with_bound(64), 3);
      CHECK(th.fmt.frac_digits >= last);
      last = th.fmt.frac_digits;
    }
  }

  TEST_CASE("tight plans never need more digits than the theorem when beta mass is at most two") {
    int compared = 0;
    SolverConfig cfg;
    cfg.restarts = 4;
    cfg.max_iters = 150;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const Network net = testing::random_net(seed, 7, 2, 2);
      cfg.seed = seed;
      const SolverReport rep = solve(net, cfg);
      const NetworkStats s = network_stats(net, rep.best);
      if (s.growth() < 1) continue;
      bool light = true;
      for (const auto& [t, per] : rep.best.beta)
        for (const auto& m : per) {
          double mass = 0;
          for (const auto& [e, b] : m) mass += std::abs(b);
          light = light && mass <= 2;
        }
      if (!light) continue;
      const double g = rep.profile.gamma_max;
      if (g >= 0.25) continue;
      const std::int64_t M = g > 0 ? std::min<std::int64_t>(32, max_message_bound(g)) : 32;
      const auto th = plan_theorem(s, g, MessageRequest::with_bound(M));
      const auto ti = plan_tight(net, rep.best, g, MessageRequest::with_bound(M));
      CAPTURE(seed);
      CHECK(ti.fmt.frac_digits <= th.fmt.frac_digits);
      const TightAnalysis ta = tight_analysis(net, rep.best, M);
      const double half = std::pow(2.0, -ti.fmt.frac_digits) / 2;
      const bool small_drift = std::all_of(ta.error_units.begin(), ta.error_units.end(),
                                           [&](double c) { return c * half <= 0.5; });
      if (small_drift) CHECK(ti.fmt.int_digits <= th.fmt.int_digits);
      ++compared;
    }
    CHECK(compared >= 10);
  }

  TEST_CASE("plans verify on fixtures") {
    for (const std::string name : {"identity", "chain", "butterfly"}) {
      CAPTURE(name);
      const Network net = fixtures::by_name(name);
      const CodingSolution sol = *fixtures::reference_solution(name);
      for (const auto& plan : {plan_theorem(network_stats(net, sol), 0.0, MessageRequest::with_bound(40)),
                               plan_tight(net, sol, MessageRequest::with_bound(40))})
        CHECK(verify(net, sol, plan.fmt, plan.message_bound, SweepMode::exhaustive()).passed);
    }
    const Network g1 = fixtures::g1();
    const CodingSolution s1 = *fixtures::reference_solution("g1");
    const auto p1 = plan_tight(g1, s1, MessageRequest::with_bound(8));
    CHECK(p1.fmt.frac_digits == 0);
    CHECK(verify(g1, s1, p1.fmt, 8, SweepMode::exhaustive()).passed);
  }

  TEST_CASE("plan files round-trip and reject malformed input") {
    const auto plan = plan_theorem(stats(6, 2, 16.3384), kPaperGamma, MessageRequest::with_bound(64), 3);
    const std::string path = (std::filesystem::temp_directory_path() / "qlnc_test_plan.json").string();
    save_plan(plan, path);
    const auto back = load_plan(path);
    CHECK(back.fmt == plan.fmt);
    CHECK(back.message_bound == 64);
    CHECK(back.n_bits == 7);
    CHECK(back.rate.to_string() == "7/26");
    CHECK(back.margin == plan.margin);
    CHECK(back.effective_depth == 3);
    CHECK(back.method == PlanMethod::theorem);
    std::remove(path.c_str());

    Json doc = plan_to_json(plan);
    CHECK(doc["rate"] == "7/26");
    doc["P"] = "eighteen";
    CHECK_THROWS_AS(plan_from_json(doc), LoadError);
    doc = plan_to_json(plan);
    doc["method"] = "magic";
    CHECK_THROWS_AS(plan_from_json(doc), LoadError);
  }
}
