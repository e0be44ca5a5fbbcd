#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "manifest.hpp"
#include "qlnc/bounds.hpp"
#include "qlnc/errors.hpp"
#include "qlnc/fixtures.hpp"
#include "qlnc/netmodel.hpp"
#include "qlnc/simkernel.hpp"
#include "qlnc/solver.hpp"

using namespace qlnc;

namespace {

enum Exit : int { ok = 0, invalid = 1, infeasible = 2, verify_failed = 3, io = 4, usage = 5 };

struct Invalid : Error {
  using Error::Error;
};

Network load_valid_network(const std::string& path) {
  Network net = load_network(path);
  const auto violations = validate(net);
  if (!violations.empty()) {
    for (const auto& v : violations) std::cout << v.invariant << ": " << v.element << ": " << v.detail << "\n";
    throw Invalid(path + " is not a valid network");
  }
  return net;
}

CodingSolution load_fitting_solution(const Network& net, const std::string& path) {
  CodingSolution sol = load_solution(path);
  const auto problems = check_solution(net, make_topology(net), sol);
  if (!problems.empty()) {
    for (const auto& p : problems) std::cout << p << "\n";
    throw Invalid(path + " does not fit the network");
  }
  return sol;
}

void print_plan(const PrecisionPlan& plan) {
  std::printf("b=%d P=%d p=%d M=%lld n_bits=%d rate=%s margin=%s\n", plan.fmt.base, plan.fmt.int_digits,
              plan.fmt.frac_digits, static_cast<long long>(plan.message_bound), plan.n_bits,
              plan.rate.to_string().c_str(), format_double(plan.margin).c_str());
}

int cmd_validate(const std::string& path) {
  Network net;
  try {
    net = load_network(path);
  } catch (const LoadError& e) {
    if (e.kind() != LoadError::Kind::schema) throw;
    std::cout << "schema: " << e.what() << "\n";
    return invalid;
  }
  const auto violations = validate(net);
  for (const auto& v : violations) std::cout << v.invariant << ": " << v.element << ": " << v.detail << "\n";
  if (!violations.empty()) return invalid;
  std::cout << "valid\n";
  return ok;
}

struct DesignArgs {
  std::string net, out, log;
  SolverConfig cfg;
};

int cmd_design(const DesignArgs& a) {
  const Network net = load_valid_network(a.net);
  const SolverReport rep = solve(net, a.cfg);
  save_solution(rep.best, rep.profile, a.out);
  if (!a.log.empty()) write_json_file(a.log, solver_log_to_json(a.cfg, rep));
  std::printf("F=%s gamma_max=%s wall_time=%.3fs converged=%s best_restart=%d\n", format_double(rep.profile.F).c_str(),
              format_double(rep.profile.gamma_max).c_str(), rep.wall_time, rep.converged ? "true" : "false",
              rep.best_restart);
  for (const auto& d : rep.diagnostics) std::printf("warning: %s\n", d.c_str());
  return ok;
}

struct PlanArgs {
  std::string net, sol, out, method = "tight";
  std::optional<int> bits;
  std::optional<std::int64_t> bound;
  std::optional<int> effective_depth;
};

int cmd_plan(const PlanArgs& a) {
  const Network net = load_valid_network(a.net);
  const CodingSolution sol = load_fitting_solution(net, a.sol);
  if (a.bits.has_value() == a.bound.has_value()) throw CLI::ValidationError("give exactly one of --bits and --M");
  const MessageRequest req{a.bound, a.bits};
  const double gamma = gamma_profile(net, sol).gamma_max;
  PrecisionPlan plan;
  if (a.method == "theorem") {
    plan = plan_theorem(network_stats(net, sol), gamma, req, a.effective_depth);
  } else {
    if (a.effective_depth) throw CLI::ValidationError("--effective-depth applies to --method theorem only");
    plan = plan_tight(net, sol, gamma, req);
  }
  save_plan(plan, a.out);
  print_plan(plan);
  return ok;
}

struct VerifyArgs {
  std::string net, sol, plan, out;
  bool exhaustive = false;
  std::optional<std::uint64_t> samples;
  std::uint64_t seed = 0;
  std::uint64_t budget = kDefaultExhaustiveBudget;
  unsigned threads = 0;
};

int cmd_verify(const VerifyArgs& a) {
  const Network net = load_valid_network(a.net);
  const CodingSolution sol = load_fitting_solution(net, a.sol);
  const PrecisionPlan plan = load_plan(a.plan);
  if (plan.fmt.base != net.base) throw Invalid("plan base does not match the network base");
  if (a.exhaustive == a.samples.has_value()) throw CLI::ValidationError("give exactly one of --exhaustive and --samples");
  const SweepMode mode = a.exhaustive ? SweepMode::exhaustive() : SweepMode::sampled(*a.samples, a.seed);
  const VerificationReport rep = verify(net, sol, plan.fmt, plan.message_bound, mode, {a.budget, a.threads});
  if (!a.out.empty()) write_json_file(a.out, report_to_json(rep));
  std::printf("cases=%llu failures=%llu max_terminal_residual=%s %s\n",
              static_cast<unsigned long long>(rep.total_cases), static_cast<unsigned long long>(rep.failure_count),
              format_double(rep.max_terminal_residual).c_str(), rep.passed ? "PASSED" : "FAILED");
  if (!rep.failures.empty()) {
    const auto& f = rep.failures.front();
    std::string m;
    for (auto x : f.m) m += (m.empty() ? "" : ",") + std::to_string(x);
    std::printf("first failure: m=(%s) terminal=%s demand=%d expected=%lld %s\n", m.c_str(), f.terminal.c_str(),
                f.demand, static_cast<long long>(f.expected),
                f.decoded ? ("decoded=" + std::to_string(*f.decoded)).c_str() : f.note.c_str());
  }
  return rep.passed ? ok : verify_failed;
}

struct SimulateArgs {
  std::string net, sol, plan;
  std::vector<std::int64_t> m;
  std::optional<int> int_digits, frac_digits;
};

int cmd_simulate(const SimulateArgs& a) {
  const Network net = load_valid_network(a.net);
  const CodingSolution sol = load_fitting_solution(net, a.sol);
  FixedPointFormat fmt{net.base, 0, 0};
  if (!a.plan.empty()) {
    fmt = load_plan(a.plan).fmt;
  } else if (a.int_digits && a.frac_digits) {
    fmt = {net.base, *a.int_digits, *a.frac_digits};
  } else {
    throw CLI::ValidationError("give --plan or both --int-digits and --frac-digits");
  }
  const Evaluator ev(net, sol);
  const RealRun real = ev.run_real(std::span<const std::int64_t>(a.m));
  std::optional<FixedRun> fixed;
  std::string overflow;
  try {
    fixed = ev.run_fixed(a.m, fmt);
  } catch (const OverflowError& e) {
    overflow = e.what();
  }
  std::printf("%-12s %24s %24s\n", "edge", "real", fixed ? fmt.to_string().c_str() : "fixed");
  for (std::size_t e = 0; e < ev.num_edges(); ++e)
    std::printf("%-12s %24s %24s\n", ev.edge_id(static_cast<int>(e)).c_str(),
                format_double(real.edge_values[e]).c_str(),
                fixed ? format_double(fixed->edge_values[e].value()).c_str() : "-");
  bool all_ok = fixed.has_value();
  for (std::size_t s = 0; s < ev.slots().size(); ++s) {
    const auto& slot = ev.slots()[s];
    const std::int64_t expected = a.m[slot.message - 1];
    std::printf("%s demand_%d (m%d=%lld): real %s", slot.terminal.c_str(), slot.position, slot.message,
                static_cast<long long>(expected), format_double(real.decoded[s]).c_str());
    if (fixed) {
      std::printf(", fixed %s -> %lld", format_double(fixed->terminal_values[s]).c_str(),
                  static_cast<long long>(fixed->decoded[s]));
      if (fixed->decoded[s] != expected) all_ok = false;
    }
    std::printf("\n");
  }
  if (!overflow.empty()) std::printf("overflow: %s\n", overflow.c_str());
  return all_ok ? ok : verify_failed;
}

struct GenArgs {
  RandomNetworkParams params;
  std::string fixture, out, reference;
};

int cmd_gen(const GenArgs& a) {
  if (!a.fixture.empty()) {
    save_network(fixtures::by_name(a.fixture), a.out);
    if (!a.reference.empty()) {
      const auto ref = fixtures::reference_solution(a.fixture);
      if (!ref) throw CLI::ValidationError("fixture " + a.fixture + " has no reference solution");
      save_solution(*ref, gamma_profile(fixtures::by_name(a.fixture), *ref), a.reference);
    }
    return ok;
  }
  if (a.params.nodes < 2 || a.params.max_in_degree < 1 || a.params.terminals < 1)
    throw CLI::ValidationError("--nodes must be >= 2, --max-indeg and --terminals >= 1");
  save_network(random_network(a.params), a.out);
  return ok;
}

struct ReportArgs {
  std::string net, sol, plan, verify, log, out;
};

int cmd_report(const ReportArgs& a) {
  RunManifest m;
  m.network = {a.net, sha256_file(a.net)};
  Json sol_doc = Json::object();
  if (!a.sol.empty()) {
    m.solution = ArtifactRef{a.sol, sha256_file(a.sol)};
    sol_doc = read_json_file(a.sol);
  }
  if (!a.log.empty()) {
    Json log = read_json_file(a.log);
    m.solver = Json{{"config", log.at("config")}, {"best_restart", log.value("best_restart", -1)}};
  }
  if (!a.plan.empty()) {
    m.plan_file = ArtifactRef{a.plan, sha256_file(a.plan)};
    m.plan = plan_to_json(load_plan(a.plan));
  }
  if (!a.verify.empty()) {
    m.report_file = ArtifactRef{a.verify, sha256_file(a.verify)};
    Json v = read_json_file(a.verify);
    v.erase("failures");
    m.verification = v;
  }
  if (!a.out.empty()) write_json_file(a.out, manifest_to_json(m));
  std::cout << render_summary(m, sol_doc);
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-linear network code design, precision planning and verification"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  int status = ok;
  std::function<int()> action;

  std::string validate_path;
  auto* v = app.add_subcommand("validate", "Check a network file against all structural invariants");
  v->add_option("network", validate_path)->required();
  v->callback([&] { action = [&] { return cmd_validate(validate_path); }; });

  DesignArgs design;
  auto* d = app.add_subcommand("design", "Search for coefficients minimising the squared decoding deviation");
  d->add_option("network", design.net)->required();
  d->add_option("-o,--output", design.out, "Solution file")->required();
  d->add_option("--seed", design.cfg.seed);
  d->add_option("--restarts", design.cfg.restarts);
  d->add_option("--iters", design.cfg.max_iters);
  d->add_option("--tolF", design.cfg.tol_F);
  d->add_option("--tol-step", design.cfg.tol_step);
  d->add_option("--init-scale", design.cfg.init_scale);
  d->add_option("--alpha-cap", design.cfg.alpha_cap);
  d->add_option("--threads", design.cfg.threads);
  d->add_option("--log", design.log, "Solver run log (JSON)");
  d->callback([&] { action = [&] { return cmd_design(design); }; });

  PlanArgs plan;
  auto* p = app.add_subcommand("plan", "Choose fixed-point digits for a solution");
  p->add_option("network", plan.net)->required();
  p->add_option("solution", plan.sol)->required();
  p->add_option("-o,--output", plan.out, "Plan file")->required();
  p->add_option("--bits", plan.bits, "Message width n");
  p->add_option("--M", plan.bound, "Message bound M");
  p->add_option("--method", plan.method)->check(CLI::IsMember({"theorem", "tight"}));
  p->add_option("--effective-depth", plan.effective_depth);
  p->callback([&] { action = [&] { return cmd_plan(plan); }; });

  VerifyArgs ver;
  auto* vf = app.add_subcommand("verify", "Sweep message vectors through the fixed-point simulator");
  vf->add_option("network", ver.net)->required();
  vf->add_option("solution", ver.sol)->required();
  vf->add_option("plan", ver.plan)->required();
  vf->add_option("-o,--output", ver.out, "Report file");
  vf->add_flag("--exhaustive", ver.exhaustive);
  vf->add_option("--samples", ver.samples);
  vf->add_option("--seed", ver.seed);
  vf->add_option("--budget", ver.budget, "Largest exhaustive case count");
  vf->add_option("--threads", ver.threads);
  vf->callback([&] { action = [&] { return cmd_verify(ver); }; });

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Run one message vector in real and fixed-point mode");
  s->add_option("network", sim.net)->required();
  s->add_option("solution", sim.sol)->required();
  s->add_option("--m", sim.m, "Messages, comma separated")->required()->delimiter(',');
  s->add_option("--plan", sim.plan);
  s->add_option("--int-digits", sim.int_digits);
  s->add_option("--frac-digits", sim.frac_digits);
  s->callback([&] { action = [&] { return cmd_simulate(sim); }; });

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Write a random network or a built-in fixture");
  g->add_option("-o,--output", gen.out)->required();
  g->add_option("--nodes", gen.params.nodes);
  g->add_option("--max-indeg", gen.params.max_in_degree);
  g->add_option("--terminals", gen.params.terminals);
  g->add_option("--demands", gen.params.max_demands, "Most demands per terminal");
  g->add_option("--seed", gen.params.seed);
  g->add_option("--fixture", gen.fixture)->check(CLI::IsMember(fixtures::names()));
  g->add_option("--reference", gen.reference, "Also write the fixture's reference solution here");
  g->callback([&] { action = [&] { return cmd_gen(gen); }; });

  ReportArgs rep;
  auto* r = app.add_subcommand("report", "Summarise a run and write its manifest");
  r->add_option("network", rep.net)->required();
  r->add_option("--solution", rep.sol);
  r->add_option("--plan", rep.plan);
  r->add_option("--verify", rep.verify, "Verification report");
  r->add_option("--log", rep.log, "Solver run log");
  r->add_option("-o,--output", rep.out, "Manifest file");
  r->callback([&] { action = [&] { return cmd_report(rep); }; });

  try {
    app.parse(argc, argv);
    status = action();
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage;
  } catch (const Invalid& e) {
    std::cerr << "error: " << e.what() << "\n";
    return invalid;
  } catch (const LoadError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return io;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return infeasible;
  } catch (const DomainError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return infeasible;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return usage;
  }
  return status;
}
