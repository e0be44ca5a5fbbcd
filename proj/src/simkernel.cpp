#include "qlnc/simkernel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "qlnc/errors.hpp"

namespace qlnc {

Evaluator::Evaluator(const Network& net, const CodingSolution& sol) {
  const Topology topo = make_topology(net);
  require_valid_solution(net, topo, sol);
  for (const auto& e : net.edges) edge_ids_.push_back(e.id);
  source_edges_ = topo.source_edges;

  std::vector<std::vector<Term>> inputs(topo.num_edges());
  for (const auto& a : alpha_entries(topo, sol)) inputs[a.to_edge].push_back({a.from_edge, a.value});
  for (int e : topo.edge_order) {
    if (topo.edge_tail[e] == topo.source) continue;
    // Canonical inc() order fixes the summation order.
    std::vector<Term> terms;
    for (int in : topo.inc[topo.edge_tail[e]]) {
      for (const auto& t : inputs[e])
        if (t.edge == in) terms.push_back(t);
    }
    program_.push_back({e, std::move(terms)});
  }

  slots_ = demand_slots(net, topo);
  const auto betas = beta_vectors(topo, slots_, sol);
  for (std::size_t s = 0; s < slots_.size(); ++s) {
    std::vector<Term> terms;
    const auto& inc = topo.inc[slots_[s].node];
    for (std::size_t r = 0; r < inc.size(); ++r)
      terms.push_back({inc[r], betas[s](static_cast<Eigen::Index>(r))});
    decoders_.push_back(std::move(terms));
  }
}

RealRun Evaluator::run_real(std::span<const double> m) const {
  if (m.size() != source_edges_.size()) throw Error("message vector has the wrong length");
  RealRun run;
  run.edge_values.assign(edge_ids_.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) run.edge_values[source_edges_[i]] = m[i];
  for (const auto& c : program_) {
    double v = 0;
    for (const auto& t : c.terms) v += t.coeff * run.edge_values[t.edge];
    run.edge_values[c.edge] = v;
  }
  for (const auto& d : decoders_) {
    double v = 0;
    for (const auto& t : d) v += t.coeff * run.edge_values[t.edge];
    run.decoded.push_back(v);
  }
  return run;
}

RealRun Evaluator::run_real(std::span<const std::int64_t> m) const {
  std::vector<double> md(m.begin(), m.end());
  return run_real(md);
}

FixedRun Evaluator::run_fixed(std::span<const std::int64_t> m, const FixedPointFormat& fmt) const {
  if (m.size() != source_edges_.size()) throw Error("message vector has the wrong length");
  fmt.check();
  const std::int64_t scale = fmt.scale();
  const std::int64_t limit = fmt.max_mantissa();
  FixedRun run;
  std::vector<std::int64_t> mant(edge_ids_.size(), 0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const __int128 scaled = static_cast<__int128>(m[i]) * scale;
    if (scaled > limit || scaled < -limit)
      throw OverflowError("edge " + edge_ids_[source_edges_[i]] + ": message " +
                          std::to_string(m[i]) + " outside the range of " + fmt.to_string());
    mant[source_edges_[i]] = static_cast<std::int64_t>(scaled);
  }
  for (const auto& c : program_) {
    double sum = 0;
    long double wide = 0;
    for (const auto& t : c.terms) {
      sum += t.coeff * static_cast<double>(mant[t.edge]);
      wide += static_cast<long double>(t.coeff) * static_cast<long double>(mant[t.edge]);
    }
    run.max_internal_residual =
        std::max(run.max_internal_residual, static_cast<double>(std::fabs(sum - wide) / scale));
    try {
      mant[c.edge] = quantize_mantissa(sum, fmt);
    } catch (const OverflowError& e) {
      throw OverflowError("edge " + edge_ids_[c.edge] + ": " + e.what());
    }
  }
  for (const auto& d : decoders_) {
    double v = 0;
    for (const auto& t : d) v += t.coeff * static_cast<double>(mant[t.edge]);
    v /= static_cast<double>(scale);
    run.terminal_values.push_back(v);
    run.decoded.push_back(round_to_int(v));
  }
  run.edge_values.reserve(mant.size());
  for (auto x : mant) run.edge_values.push_back({fmt, x});
  return run;
}

RealRun run_real(const Network& net, const CodingSolution& sol, std::span<const double> m) {
  return Evaluator(net, sol).run_real(m);
}

FixedRun run_fixed(const Network& net, const CodingSolution& sol, std::span<const std::int64_t> m,
                   const FixedPointFormat& fmt) {
  return Evaluator(net, sol).run_fixed(m, fmt);
}

std::vector<std::vector<std::int64_t>> boundary_vectors(std::size_t k, std::int64_t bound) {
  std::vector<std::vector<std::int64_t>> out;
  out.emplace_back(k, 0);
  out.emplace_back(k, bound);
  out.emplace_back(k, -bound);
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<std::int64_t> up(k, 0), down(k, 0);
    up[i] = bound;
    down[i] = -bound;
    out.push_back(std::move(up));
    out.push_back(std::move(down));
  }
  return out;
}

namespace {

struct Partial {
  std::uint64_t failure_count = 0;
  std::vector<DecodeFailure> failures;
  double max_terminal_residual = 0;
  double max_internal_residual = 0;
};

bool failure_less(const DecodeFailure& a, const DecodeFailure& b) {
  if (a.m != b.m) return a.m < b.m;
  if (a.terminal != b.terminal) return a.terminal < b.terminal;
  return a.demand < b.demand;
}

void trim(std::vector<DecodeFailure>& f) {
  std::sort(f.begin(), f.end(), failure_less);
  if (f.size() > kReportedFailureCap) f.resize(kReportedFailureCap);
}

void check_case(const Evaluator& ev, const FixedPointFormat& fmt, const std::vector<std::int64_t>& m,
                Partial& acc) {
  FixedRun run;
  try {
    run = ev.run_fixed(m, fmt);
  } catch (const OverflowError& e) {
    ++acc.failure_count;
    acc.failures.push_back({m, "", 0, std::nullopt, 0, std::string("overflow: ") + e.what()});
    return;
  }
  acc.max_internal_residual = std::max(acc.max_internal_residual, run.max_internal_residual);
  const auto& slots = ev.slots();
  for (std::size_t s = 0; s < slots.size(); ++s) {
    const std::int64_t expected = m[slots[s].message - 1];
    acc.max_terminal_residual = std::max(
        acc.max_terminal_residual, std::fabs(run.terminal_values[s] - static_cast<double>(expected)));
    if (run.decoded[s] != expected) {
      ++acc.failure_count;
      acc.failures.push_back({m, slots[s].terminal, slots[s].position, run.decoded[s], expected, ""});
    }
  }
  if (acc.failures.size() > 8 * kReportedFailureCap) trim(acc.failures);
}

unsigned thread_count(const VerifyOptions& opts, std::uint64_t cases) {
  unsigned t = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  t = std::min(t, 16u);
  if (cases < 4096) t = 1;
  return t;
}

}  // namespace

VerificationReport verify(const Network& net, const CodingSolution& sol, const FixedPointFormat& fmt,
                          std::int64_t message_bound, SweepMode mode, const VerifyOptions& opts) {
  if (message_bound < 0) throw Error("message bound must be non-negative");
  fmt.check();
  const Evaluator ev(net, sol);
  const std::size_t k = ev.num_messages();

  VerificationReport report;
  report.mode = mode;
  report.message_bound = message_bound;
  report.format = fmt;

  std::vector<std::vector<std::int64_t>> listed;  // sampled mode only
  std::uint64_t cases = 0;
  const std::uint64_t width = 2 * static_cast<std::uint64_t>(message_bound) + 1;
  if (mode.kind == SweepMode::Kind::exhaustive) {
    long double total = std::pow(static_cast<long double>(width), static_cast<long double>(k));
    if (total > static_cast<long double>(opts.exhaustive_budget))
      throw BudgetError("exhaustive sweep needs " + std::to_string(static_cast<double>(total)) +
                        " cases, budget is " + std::to_string(opts.exhaustive_budget) +
                        "; use sampled mode");
    cases = static_cast<std::uint64_t>(total);
  } else {
    listed = boundary_vectors(k, message_bound);
    std::mt19937_64 rng(mode.seed);
    std::uniform_int_distribution<std::int64_t> draw(-message_bound, message_bound);
    for (std::uint64_t i = 0; i < mode.count; ++i) {
      std::vector<std::int64_t> m(k);
      for (auto& x : m) x = draw(rng);
      listed.push_back(std::move(m));
    }
    cases = listed.size();
  }
  report.total_cases = cases;

  const unsigned threads = thread_count(opts, cases);
  std::vector<Partial> parts(threads);
  auto work = [&](unsigned t) {
    const std::uint64_t lo = cases * t / threads;
    const std::uint64_t hi = cases * (t + 1) / threads;
    std::vector<std::int64_t> m(k);
    for (std::uint64_t c = lo; c < hi; ++c) {
      if (mode.kind == SweepMode::Kind::exhaustive) {
        // Case index in mixed radix, most significant message first.
        std::uint64_t r = c;
        for (std::size_t i = k; i-- > 0;) {
          m[i] = static_cast<std::int64_t>(r % width) - message_bound;
          r /= width;
        }
        check_case(ev, fmt, m, parts[t]);
      } else {
        check_case(ev, fmt, listed[c], parts[t]);
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }

  for (auto& p : parts) {
    report.failure_count += p.failure_count;
    report.max_terminal_residual = std::max(report.max_terminal_residual, p.max_terminal_residual);
    report.max_internal_residual = std::max(report.max_internal_residual, p.max_internal_residual);
    report.failures.insert(report.failures.end(), p.failures.begin(), p.failures.end());
  }
  trim(report.failures);
  report.passed = report.failure_count == 0;
  return report;
}

Json report_to_json(const VerificationReport& r) {
  Json doc = Json::object();
  if (r.mode.kind == SweepMode::Kind::exhaustive) {
    doc["mode"] = "exhaustive";
  } else {
    doc["mode"] = "sampled";
    doc["samples"] = r.mode.count;
    doc["seed"] = r.mode.seed;
  }
  doc["M"] = r.message_bound;
  doc["b"] = r.format.base;
  doc["P"] = r.format.int_digits;
  doc["p"] = r.format.frac_digits;
  doc["total_cases"] = r.total_cases;
  doc["failure_count"] = r.failure_count;
  Json fails = Json::array();
  for (const auto& f : r.failures) {
    Json j = {{"m", f.m}, {"terminal", f.terminal}, {"demand", f.demand}, {"expected", f.expected}};
    j["decoded"] = f.decoded ? Json(*f.decoded) : Json(nullptr);
    if (!f.note.empty()) j["note"] = f.note;
    fails.push_back(std::move(j));
  }
  doc["failures"] = std::move(fails);
  doc["failures_truncated"] = r.failure_count > r.failures.size();
  doc["max_terminal_residual"] = r.max_terminal_residual;
  doc["max_internal_residual"] = r.max_internal_residual;
  doc["passed"] = r.passed;
  return doc;
}

}  // namespace qlnc
