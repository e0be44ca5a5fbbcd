#include "qlnc/bounds.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "qlnc/errors.hpp"

namespace qlnc {

namespace {

// Strict inequalities are enforced with this much headroom.
constexpr double kStrictSlack = 1e-12;
constexpr double kUnitGrowthTol = 1e-12;

double log_base(double x, int base) { return std::log(x) / std::log(static_cast<double>(base)); }

// Smallest non-negative integer p with p > x.
int smallest_above(double x) { return std::max(0, static_cast<int>(std::floor(x + kStrictSlack)) + 1); }

// Smallest non-negative integer P with P >= x.
int smallest_at_least(double x) { return std::max(0, static_cast<int>(std::ceil(x - kStrictSlack))); }

// ((g^i - 1) / (g - 1)), the geometric sum 1 + g + ... + g^(i-1).
double geometric_units(double g, int i) {
  if (i <= 0) return 0;
  if (std::abs(g - 1) < kUnitGrowthTol) return i;
  return (std::pow(g, i) - 1) / (g - 1);
}

void require_growth(const NetworkStats& stats, int i) {
  if (i >= 1 && stats.growth() < 1)
    throw DomainError("max in-degree * max |alpha| = " + std::to_string(stats.growth()) +
                      " < 1; rescale the coefficients so the product is at least 1");
}

struct Resolved {
  std::int64_t bound;
  int bits;
};

Resolved resolve(const MessageRequest& req) {
  if (req.bound && req.bits) throw Error("give either a message bound or a bit width, not both");
  if (req.bits) {
    if (*req.bits < 1 || *req.bits > 62) throw Error("bit width must be in [1, 62]");
    return {bound_for_bits(*req.bits), *req.bits};
  }
  if (req.bound) {
    if (*req.bound < 1) throw Error("message bound must be >= 1");
    return {*req.bound, bits_for_bound(*req.bound)};
  }
  throw Error("a message bound or bit width is required");
}

void require_feasible(double gamma, std::int64_t bound) {
  if (gamma > 0 && !(2 * gamma * static_cast<double>(bound) < 1))
    throw InfeasibleError("gamma = " + format_double(gamma) + " requires M < " +
                          format_double(1 / (2 * gamma)) + ", got M = " + std::to_string(bound));
}

FixedPointFormat checked_format(int base, int int_digits, int frac_digits) {
  FixedPointFormat fmt{base, int_digits, frac_digits};
  fmt.check();
  return fmt;
}

}  // namespace

NetworkStats network_stats(const Network& net, const CodingSolution& sol) {
  const Topology topo = make_topology(net);
  require_valid_solution(net, topo, sol);
  const DepthPartition dp = depth_partition(topo);
  NetworkStats s;
  s.depth = dp.depth;
  s.max_in_degree = dp.max_in_degree;
  s.base = net.base;
  for (const auto& [key, value] : sol.alpha) s.alpha_max = std::max(s.alpha_max, std::abs(value));
  return s;
}

double lemma1_bound(const NetworkStats& stats, double message_bound, int i) {
  if (i < 0 || i >= std::max(stats.depth, 1))
    throw DomainError("depth index " + std::to_string(i) + " outside [0, d-1]");
  require_growth(stats, i);
  return std::pow(stats.growth(), i) * message_bound;
}

double lemma2_bound(const NetworkStats& stats, int frac_digits, int i) {
  if (i < 0 || i >= std::max(stats.depth, 1))
    throw DomainError("depth index " + std::to_string(i) + " outside [0, d-1]");
  require_growth(stats, i);
  return geometric_units(stats.growth(), i) * std::pow(static_cast<double>(stats.base), -frac_digits);
}

std::string Rate::to_string() const {
  if (exact) return std::to_string(num) + "/" + std::to_string(den);
  return format_double(value);
}

Rate rate(int n_bits, int int_digits, int frac_digits, int base) {
  const int digits = int_digits + frac_digits;
  if (digits <= 0 || n_bits <= 0) throw Error("rate needs positive bit and digit counts");
  Rate r;
  if (base > 0 && std::has_single_bit(static_cast<unsigned>(base))) {
    const std::int64_t bits_per_digit = std::countr_zero(static_cast<unsigned>(base));
    r.num = n_bits;
    r.den = digits * bits_per_digit;
    const std::int64_t g = std::gcd(r.num, r.den);
    r.num /= g;
    r.den /= g;
    r.value = static_cast<double>(r.num) / static_cast<double>(r.den);
  } else {
    r.exact = false;
    r.value = n_bits / (digits * std::log2(static_cast<double>(base)));
  }
  return r;
}

int bits_for_bound(std::int64_t m) {
  if (m < 1) throw Error("message bound must be >= 1");
  return std::bit_width(static_cast<std::uint64_t>(m));
}

std::int64_t bound_for_bits(int bits) {
  if (bits < 1 || bits > 62) throw Error("bit width must be in [1, 62]");
  return std::int64_t{1} << (bits - 1);
}

std::int64_t max_message_bound(double gamma) {
  if (!(gamma > 0)) throw Error("gamma = 0 places no bound on M; choose M explicitly");
  const double limit = std::floor((1 - 1e-9) / (2 * gamma));
  if (limit < 1) throw InfeasibleError("gamma = " + format_double(gamma) + " admits no M >= 1");
  return static_cast<std::int64_t>(std::min(limit, 4.0e18));
}

PrecisionPlan plan_theorem(const NetworkStats& stats, double gamma, const MessageRequest& request,
                           std::optional<int> effective_depth) {
  const Resolved msg = resolve(request);
  require_feasible(gamma, msg.bound);
  const int d = effective_depth.value_or(stats.depth);
  if (d < 1) throw Error("depth must be >= 1");
  require_growth(stats, d - 1);

  const double units = geometric_units(stats.growth(), d - 1);
  const double slack = 0.5 - gamma * static_cast<double>(msg.bound);
  const int p = units == 0 ? 0 : smallest_above(log_base(units, stats.base) - log_base(slack, stats.base));
  const double top = (d - 1 == 0 ? 1.0 : std::pow(stats.growth(), d - 1)) * static_cast<double>(msg.bound);
  const int P = smallest_at_least(log_base(2 * top + 2, stats.base));

  PrecisionPlan plan;
  plan.fmt = checked_format(stats.base, P, p);
  plan.message_bound = msg.bound;
  plan.n_bits = msg.bits;
  plan.rate = rate(msg.bits, P, p, stats.base);
  plan.method = PlanMethod::theorem;
  plan.margin = slack - units * std::pow(static_cast<double>(stats.base), -p);
  plan.effective_depth = effective_depth;
  return plan;
}

TightAnalysis tight_analysis(const Network& net, const CodingSolution& sol, std::int64_t message_bound) {
  const Topology topo = make_topology(net);
  require_valid_solution(net, topo, sol);
  const auto slots = demand_slots(net, topo);
  const auto betas = beta_vectors(topo, slots, sol);
  const GammaProfile prof = gamma_profile(topo, slots, gain_matrix<double>(topo, sol), betas);

  std::vector<std::vector<AlphaEntry>> inputs(topo.num_edges());
  for (const auto& a : alpha_entries(topo, sol)) inputs[a.to_edge].push_back(a);

  TightAnalysis ta;
  ta.value_bound.assign(topo.num_edges(), 0);
  ta.error_units.assign(topo.num_edges(), 0);
  for (int e : topo.edge_order) {
    if (topo.edge_tail[e] == topo.source) {
      ta.value_bound[e] = static_cast<double>(message_bound);
      continue;
    }
    // Integer combinations of grid values stay on the grid, so only edges
    // with a fractional coefficient pay a fresh rounding step.
    bool on_grid = true;
    double v = 0, u = 0;
    for (const auto& a : inputs[e]) {
      v += std::abs(a.value) * ta.value_bound[a.from_edge];
      u += std::abs(a.value) * ta.error_units[a.from_edge];
      if (a.value != std::round(a.value)) on_grid = false;
    }
    ta.value_bound[e] = v;
    ta.error_units[e] = u + (on_grid ? 0.0 : 1.0);
  }
  for (std::size_t s = 0; s < slots.size(); ++s) {
    const auto& inc = topo.inc[slots[s].node];
    double units = 0;
    for (std::size_t r = 0; r < inc.size(); ++r)
      units += std::abs(betas[s](static_cast<Eigen::Index>(r))) * ta.error_units[inc[r]];
    ta.terminal_units.push_back(units);
    ta.deviation.push_back(prof.demands[s].deviation);
  }
  return ta;
}

PrecisionPlan plan_tight(const Network& net, const CodingSolution& sol, double gamma,
                         const MessageRequest& request) {
  const Resolved msg = resolve(request);
  require_feasible(gamma, msg.bound);
  const TightAnalysis ta = tight_analysis(net, sol, msg.bound);
  const int b = net.base;
  const double M = static_cast<double>(msg.bound);

  int p = 0;
  for (std::size_t s = 0; s < ta.terminal_units.size(); ++s) {
    const double slack = 0.5 - ta.deviation[s] * M;
    if (!(slack > 0))
      throw InfeasibleError("demand slot " + std::to_string(s) + " has deviation " +
                            format_double(ta.deviation[s]) + ", too large for M = " +
                            std::to_string(msg.bound));
    if (ta.terminal_units[s] > 0)
      p = std::max(p, smallest_above(log_base(ta.terminal_units[s] / (2 * slack), b)));
  }
  const double half_step = std::pow(static_cast<double>(b), -p) / 2;

  // Edges whose drift exceeds 1/2 need room beyond the value bound.
  double need = 0;
  for (std::size_t e = 0; e < ta.value_bound.size(); ++e)
    need = std::max(need, ta.value_bound[e] + std::max(ta.error_units[e] * half_step - 0.5, 0.0));
  const int P = smallest_at_least(log_base(2 * need + 2, b));

  double margin = 0.5;
  for (std::size_t s = 0; s < ta.terminal_units.size(); ++s)
    margin = std::min(margin, 0.5 - ta.deviation[s] * M - ta.terminal_units[s] * half_step);

  PrecisionPlan plan;
  plan.fmt = checked_format(b, P, p);
  plan.message_bound = msg.bound;
  plan.n_bits = msg.bits;
  plan.rate = rate(msg.bits, P, p, b);
  plan.method = PlanMethod::tight;
  plan.margin = margin;
  return plan;
}

PrecisionPlan plan_tight(const Network& net, const CodingSolution& sol, const MessageRequest& request) {
  return plan_tight(net, sol, gamma_profile(net, sol).gamma_max, request);
}

Json plan_to_json(const PrecisionPlan& plan) {
  Json doc = Json::object();
  doc["b"] = plan.fmt.base;
  doc["P"] = plan.fmt.int_digits;
  doc["p"] = plan.fmt.frac_digits;
  doc["M"] = plan.message_bound;
  doc["n_bits"] = plan.n_bits;
  doc["rate"] = plan.rate.to_string();
  doc["method"] = plan.method == PlanMethod::theorem ? "theorem" : "tight";
  doc["margin"] = plan.margin;
  doc["effective_depth"] = plan.effective_depth ? Json(*plan.effective_depth) : Json(nullptr);
  return doc;
}

PrecisionPlan plan_from_json(const Json& doc) {
  auto integer = [&](const char* key) -> std::int64_t {
    auto it = doc.find(key);
    if (it == doc.end() || !it->is_number_integer())
      throw LoadError(LoadError::Kind::schema, std::string("plan field '") + key + "' must be an integer");
    return it->get<std::int64_t>();
  };
  if (!doc.is_object()) throw LoadError(LoadError::Kind::schema, "plan must be a JSON object");
  PrecisionPlan plan;
  plan.fmt = {static_cast<int>(integer("b")), static_cast<int>(integer("P")), static_cast<int>(integer("p"))};
  plan.message_bound = integer("M");
  plan.n_bits = static_cast<int>(integer("n_bits"));
  const std::string method = doc.value("method", std::string("tight"));
  if (method != "theorem" && method != "tight")
    throw LoadError(LoadError::Kind::schema, "plan method must be 'theorem' or 'tight'");
  plan.method = method == "theorem" ? PlanMethod::theorem : PlanMethod::tight;
  if (auto m = doc.find("margin"); m != doc.end() && m->is_number()) plan.margin = m->get<double>();
  if (auto d = doc.find("effective_depth"); d != doc.end() && d->is_number_integer())
    plan.effective_depth = d->get<int>();
  try {
    plan.fmt.check();
    plan.rate = rate(plan.n_bits, plan.fmt.int_digits, plan.fmt.frac_digits, plan.fmt.base);
  } catch (const Error& e) {
    throw LoadError(LoadError::Kind::schema, std::string("invalid plan: ") + e.what());
  }
  return plan;
}

PrecisionPlan load_plan(const std::string& path) { return plan_from_json(read_json_file(path)); }

void save_plan(const PrecisionPlan& plan, const std::string& path) { write_json_file(path, plan_to_json(plan)); }

}  // namespace qlnc
