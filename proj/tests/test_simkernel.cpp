#include <doctest.h>

#include <random>

#include "qlnc/bounds.hpp"
#include "qlnc/errors.hpp"
#include "qlnc/fixtures.hpp"
#include "qlnc/simkernel.hpp"
#include "support.hpp"

using namespace qlnc;
using testing::rel_diff;

namespace {

std::vector<std::int64_t> draw_messages(std::mt19937_64& rng, std::size_t k, std::int64_t M) {
  std::uniform_int_distribution<std::int64_t> d(-M, M);
  std::vector<std::int64_t> m(k);
  for (auto& x : m) x = d(rng);
  return m;
}

// Every failing (vector, slot) pair by straightforward enumeration.
std::uint64_t count_failures(const Network& net, const CodingSolution& sol, const FixedPointFormat& fmt,
                             std::int64_t M) {
  const Evaluator ev(net, sol);
  const std::size_t k = ev.num_messages();
  std::vector<std::int64_t> m(k, -M);
  std::uint64_t failures = 0;
  while (true) {
    try {
      const FixedRun run = ev.run_fixed(m, fmt);
      for (std::size_t s = 0; s < ev.slots().size(); ++s)
        if (run.decoded[s] != m[ev.slots()[s].message - 1]) ++failures;
    } catch (const OverflowError&) {
      ++failures;
    }
    std::size_t i = k;
    while (i > 0 && m[i - 1] == M) m[--i] = -M;
    if (i == 0) break;
    ++m[i - 1];
  }
  return failures;
}

}  // namespace

TEST_SUITE("simkernel") {
  TEST_CASE("real mode examples") {
    CodingSolution id;
    id.beta["t"] = {{{"e1", 1.0}}};
    const std::vector<double> seven{7};
    const RealRun r1 = run_real(fixtures::identity(), id, seven);
    CHECK(r1.edge_values == std::vector<double>{7});
    CHECK(r1.decoded == std::vector<double>{7});

    CodingSolution ch;
    ch.alpha[{"e1", "e2"}] = 2;
    ch.beta["t"] = {{{"e2", 0.5}}};
    const std::vector<double> three{3};
    const RealRun r2 = run_real(testing::short_chain(), ch, three);
    CHECK(r2.edge_values == std::vector<double>{3, 6});
    CHECK(r2.decoded == std::vector<double>{3});

    const std::vector<double> m{5, -2};
    const RealRun r3 = run_real(fixtures::butterfly(), *fixtures::reference_solution("butterfly"), m);
    CHECK(r3.decoded == std::vector<double>{5, -2, 5, -2});
  }

  TEST_CASE("fixed mode on identity") {
    CodingSolution id;
    id.beta["t"] = {{{"e1", 1.0}}};
    const std::vector<std::int64_t> m{7};
    const FixedRun run = run_fixed(fixtures::identity(), id, m, {2, 8, 0});
    CHECK(run.decoded == std::vector<std::int64_t>{7});
    CHECK(run.edge_values.at(0).mantissa == 7);
    const std::vector<std::int64_t> big{300};
    CHECK_THROWS_AS(run_fixed(fixtures::identity(), id, big, {2, 8, 0}), OverflowError);
  }

  TEST_CASE("g1 summing scheme decodes every n-bit vector with P = n + 2, p = 0") {
    const Network net = fixtures::g1();
    const CodingSolution sol = *fixtures::reference_solution("g1");
    for (int n = 1; n <= 3; ++n) {
      const auto M = bound_for_bits(n);
      const auto rep = verify(net, sol, {2, n + 2, 0}, M, SweepMode::exhaustive());
      CAPTURE(n);
      CHECK(rep.passed);
      CHECK(rep.total_cases == static_cast<std::uint64_t>(std::pow(2 * M + 1, 5)));
    }
  }

  TEST_CASE("high-precision fixed mode reproduces real-mode decoding") {
    std::mt19937_64 rng(8);
    int compared = 0;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
      const Network net = testing::random_net(seed, 8, 2, 3, 2);
      const CodingSolution sol = testing::random_solution(net, rng, -1, 1);
      const Evaluator ev(net, sol);
      for (int trial = 0; trial < 20; ++trial) {
        const auto m = draw_messages(rng, ev.num_messages(), 100);
        const RealRun real = ev.run_real(std::span<const std::int64_t>(m));
        const FixedRun fixed = ev.run_fixed(m, {2, 20, 40});
        for (std::size_t s = 0; s < real.decoded.size(); ++s) {
          const double frac = real.decoded[s] - std::floor(real.decoded[s]);
          if (std::abs(frac - 0.5) < 1e-6) continue;
          CHECK(fixed.decoded[s] == round_to_int(real.decoded[s]));
          ++compared;
        }
      }
    }
    CHECK(compared > 1000);
  }

  TEST_CASE("decoded reals equal the gamma prediction and scale linearly") {
    std::mt19937_64 rng(17);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const Network net = testing::random_net(seed, 9, 3, 3, 2);
      const CodingSolution sol = testing::random_solution(net, rng, -2, 2);
      const GammaProfile prof = gamma_profile(net, sol);
      const Evaluator ev(net, sol);
      std::vector<double> m(ev.num_messages());
      std::uniform_real_distribution<double> u(-50, 50);
      for (auto& x : m) x = u(rng);
      const RealRun run = ev.run_real(std::span<const double>(m));
      for (std::size_t s = 0; s < run.decoded.size(); ++s) {
        double predicted = 0;
        for (std::size_t i = 0; i < m.size(); ++i) predicted += prof.demands[s].gamma(static_cast<Eigen::Index>(i)) * m[i];
        CHECK(rel_diff(run.decoded[s], predicted) < 1e-9);
      }
      std::vector<double> m3(m);
      for (auto& x : m3) x *= -3;
      const RealRun run3 = ev.run_real(std::span<const double>(m3));
      for (std::size_t e = 0; e < run.edge_values.size(); ++e)
        CHECK(rel_diff(run3.edge_values[e], -3 * run.edge_values[e]) < 1e-12);
    }
  }

  TEST_CASE("verify examples") {
    CodingSolution id;
    id.beta["t"] = {{{"e1", 1.0}}};
    const auto r = verify(fixtures::identity(), id, {2, 8, 0}, 100, SweepMode::exhaustive());
    CHECK(r.passed);
    CHECK(r.total_cases == 201);
    CHECK(r.max_terminal_residual == 0.0);

    const Network bf = fixtures::butterfly();
    const CodingSolution sol = *fixtures::reference_solution("butterfly");
    const auto plan = plan_theorem(network_stats(bf, sol), 0.0, MessageRequest::with_bound(32));
    const auto rb = verify(bf, sol, plan.fmt, 32, SweepMode::exhaustive());
    CHECK(rb.passed);
    CHECK(rb.total_cases == 65 * 65);
  }

  TEST_CASE("exhaustive failure counts match enumeration and do not depend on threads") {
    const Network net = fixtures::g2();
    const CodingSolution sol = *fixtures::reference_solution("g2");
    const FixedPointFormat coarse{2, 12, 2};
    const std::int64_t M = 6;
    const auto one = verify(net, sol, coarse, M, SweepMode::exhaustive(), {kDefaultExhaustiveBudget, 1});
    const auto many = verify(net, sol, coarse, M, SweepMode::exhaustive(), {kDefaultExhaustiveBudget, 4});
    CHECK(one.failure_count == count_failures(net, sol, coarse, M));
    CHECK(one.failure_count > kReportedFailureCap);
    CHECK(dump_json(report_to_json(one)) == dump_json(report_to_json(many)));
    CHECK(one.failures.size() == kReportedFailureCap);
    CHECK(std::is_sorted(one.failures.begin(), one.failures.end(),
                         [](const DecodeFailure& a, const DecodeFailure& b) { return a.m < b.m; }));
    CHECK(report_to_json(one)["failures_truncated"] == true);
    CHECK_FALSE(one.passed);
  }

  TEST_CASE("sampled mode starts with the boundary vectors and is seed-deterministic") {
    const auto bv = boundary_vectors(3, 5);
    CHECK(bv.size() == 9);
    CHECK(bv[0] == std::vector<std::int64_t>{0, 0, 0});
    CHECK(bv[1] == std::vector<std::int64_t>{5, 5, 5});
    CHECK(bv[2] == std::vector<std::int64_t>{-5, -5, -5});
    CHECK(bv[3] == std::vector<std::int64_t>{5, 0, 0});
    CHECK(bv[4] == std::vector<std::int64_t>{-5, 0, 0});

    const Network net = fixtures::g2();
    const CodingSolution sol = *fixtures::reference_solution("g2");
    const FixedPointFormat coarse{2, 14, 3};
    const auto a = verify(net, sol, coarse, 64, SweepMode::sampled(500, 3));
    const auto b = verify(net, sol, coarse, 64, SweepMode::sampled(500, 3));
    CHECK(a.total_cases == 509);
    CHECK(dump_json(report_to_json(a)) == dump_json(report_to_json(b)));
    const auto j = report_to_json(a);
    CHECK(j["mode"] == "sampled");
    CHECK(j["samples"] == 500);
    CHECK(j["seed"] == 3);
  }

  TEST_CASE("oversized exhaustive sweeps are refused") {
    const Network net = fixtures::g1();
    const CodingSolution sol = *fixtures::reference_solution("g1");
    CHECK_THROWS_AS(verify(net, sol, {2, 20, 0}, 64, SweepMode::exhaustive()), BudgetError);
    CHECK_THROWS_AS(verify(net, sol, {2, 20, 0}, 3, SweepMode::exhaustive(), {100, 0}), BudgetError);
  }

  TEST_CASE("overflow is recorded as a failure") {
    CodingSolution ch;
    ch.alpha[{"e1", "e2"}] = 4;
    ch.beta["t"] = {{{"e2", 0.25}}};
    const auto r = verify(testing::short_chain(), ch, {2, 4, 0}, 5, SweepMode::exhaustive());
    CHECK_FALSE(r.passed);
    CHECK(r.failure_count == 4);  // |4m| > 15 exactly when |m| >= 4
    REQUIRE_FALSE(r.failures.empty());
    CHECK_FALSE(r.failures[0].decoded.has_value());
    CHECK(r.failures[0].note.find("overflow") != std::string::npos);
    CHECK(r.failures[0].note.find("e2") != std::string::npos);
  }
}
