#include "qlnc/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <random>
#include <thread>

#include "qlnc/errors.hpp"

namespace qlnc {

namespace {

constexpr double kRankTolerance = 1e-10;
constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 60;
constexpr double kMaxStep = 1e6;
// Above this many coefficients the solver takes plain gradient steps.
constexpr Eigen::Index kDampedLimit = 400;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t restart_seed(std::uint64_t seed, int restart) {
  return splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(restart));
}

struct RestartResult {
  Eigen::VectorXd alpha;
  std::vector<Eigen::VectorXd> betas;
  double F = 0;
  bool stopped_early = false;
  std::vector<TracePoint> trace;
};

}  // namespace

void SolverConfig::check() const {
  if (restarts < 1) throw Error("restarts must be positive");
  if (max_iters < 1) throw Error("max_iters must be positive");
  if (!(tol_F >= 0) || !(tol_step >= 0)) throw Error("tolerances must be non-negative");
  if (!(init_scale > 0)) throw Error("init_scale must be positive");
  if (!(alpha_cap > 0)) throw Error("alpha_cap must be positive");
}

CodingProblem::CodingProblem(const Network& net) : net_(net), topo_(make_topology(net)) {
  slots_ = demand_slots(net_, topo_);
  pairs_into_.resize(topo_.num_edges());
  pairs_out_of_.resize(topo_.num_edges());
  for (int e2 : topo_.edge_order) {
    for (int e : topo_.inc[topo_.edge_tail[e2]]) {
      pairs_into_[e2].push_back(static_cast<int>(pairs_.size()));
      pairs_out_of_[e].push_back(static_cast<int>(pairs_.size()));
      pairs_.emplace_back(e, e2);
    }
  }
}

Eigen::MatrixXd CodingProblem::gains(const Eigen::VectorXd& alpha) const {
  const auto k = static_cast<Eigen::Index>(topo_.source_edges.size());
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(k, topo_.num_edges());
  for (Eigen::Index i = 0; i < k; ++i) G(i, topo_.source_edges[i]) = 1;
  for (int e : topo_.edge_order)
    for (int p : pairs_into_[e]) G.col(e) += alpha(p) * G.col(pairs_[p].first);
  return G;
}

std::vector<Eigen::VectorXd> CodingProblem::best_betas(const Eigen::MatrixXd& G) const {
  std::vector<Eigen::VectorXd> out;
  out.reserve(slots_.size());
  for (const auto& slot : slots_) {
    const auto& inc = topo_.inc[slot.node];
    Eigen::MatrixXd A(G.rows(), static_cast<Eigen::Index>(inc.size()));
    for (std::size_t r = 0; r < inc.size(); ++r) A.col(static_cast<Eigen::Index>(r)) = G.col(inc[r]);
    Eigen::VectorXd target = Eigen::VectorXd::Unit(G.rows(), slot.message - 1);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
    cod.setThreshold(kRankTolerance);
    cod.compute(A);
    out.push_back(cod.solve(target));
  }
  return out;
}

double CodingProblem::objective(const Eigen::MatrixXd& G, const std::vector<Eigen::VectorXd>& betas) const {
  double F = 0;
  for (std::size_t s = 0; s < slots_.size(); ++s) {
    const auto& inc = topo_.inc[slots_[s].node];
    Eigen::VectorXd dev = -Eigen::VectorXd::Unit(G.rows(), slots_[s].message - 1);
    for (std::size_t r = 0; r < inc.size(); ++r)
      dev += betas[s](static_cast<Eigen::Index>(r)) * G.col(inc[r]);
    F += dev.squaredNorm();
  }
  return F;
}

Eigen::VectorXd CodingProblem::gradient(const Eigen::VectorXd& alpha,
                                        const std::vector<Eigen::VectorXd>& betas) const {
  const Eigen::MatrixXd G = gains(alpha);
  const Eigen::Index k = G.rows();
  // Y(c, :) collects how F responds to the gain column of edge c.
  Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(topo_.num_edges(), k);
  for (std::size_t s = 0; s < slots_.size(); ++s) {
    const auto& inc = topo_.inc[slots_[s].node];
    Eigen::VectorXd dev = -Eigen::VectorXd::Unit(k, slots_[s].message - 1);
    for (std::size_t r = 0; r < inc.size(); ++r)
      dev += betas[s](static_cast<Eigen::Index>(r)) * G.col(inc[r]);
    for (std::size_t r = 0; r < inc.size(); ++r)
      Y.row(inc[r]) += 2 * betas[s](static_cast<Eigen::Index>(r)) * dev.transpose();
  }
  // D = (I - T)^-1 Y, accumulated backwards through the DAG.
  Eigen::MatrixXd D = Y;
  for (auto it = topo_.edge_order.rbegin(); it != topo_.edge_order.rend(); ++it)
    for (int p : pairs_out_of_[*it]) D.row(*it) += alpha(p) * D.row(pairs_[p].second);

  Eigen::VectorXd grad(static_cast<Eigen::Index>(pairs_.size()));
  for (std::size_t p = 0; p < pairs_.size(); ++p)
    grad(static_cast<Eigen::Index>(p)) = G.col(pairs_[p].first).dot(D.row(pairs_[p].second));
  return grad;
}

Eigen::MatrixXd CodingProblem::residual_jacobian(const Eigen::VectorXd& alpha,
                                                 const std::vector<Eigen::VectorXd>& betas,
                                                 Eigen::VectorXd& residual) const {
  const Eigen::MatrixXd G = gains(alpha);
  const Eigen::Index k = G.rows();
  const auto S = static_cast<Eigen::Index>(slots_.size());
  residual.resize(S * k);
  // H(:, s) = (I - T)^-1 applied to slot s's beta, spread over its edges.
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(topo_.num_edges(), S);
  for (Eigen::Index s = 0; s < S; ++s) {
    const auto& inc = topo_.inc[slots_[s].node];
    Eigen::VectorXd dev = -Eigen::VectorXd::Unit(k, slots_[s].message - 1);
    for (std::size_t r = 0; r < inc.size(); ++r) {
      dev += betas[s](static_cast<Eigen::Index>(r)) * G.col(inc[r]);
      H(inc[r], s) += betas[s](static_cast<Eigen::Index>(r));
    }
    residual.segment(s * k, k) = dev;
  }
  for (auto it = topo_.edge_order.rbegin(); it != topo_.edge_order.rend(); ++it)
    for (int p : pairs_out_of_[*it]) H.row(*it) += alpha(p) * H.row(pairs_[p].second);

  Eigen::MatrixXd J(S * k, static_cast<Eigen::Index>(pairs_.size()));
  for (std::size_t p = 0; p < pairs_.size(); ++p)
    for (Eigen::Index s = 0; s < S; ++s)
      J.block(s * k, static_cast<Eigen::Index>(p), k, 1) = G.col(pairs_[p].first) * H(pairs_[p].second, s);
  return J;
}

Eigen::VectorXd CodingProblem::alpha_vector(const CodingSolution& sol) const {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(pairs_.size()));
  for (std::size_t p = 0; p < pairs_.size(); ++p) {
    const std::pair<std::string, std::string> key{net_.edges[pairs_[p].first].id,
                                                  net_.edges[pairs_[p].second].id};
    if (auto it = sol.alpha.find(key); it != sol.alpha.end()) a(static_cast<Eigen::Index>(p)) = it->second;
  }
  return a;
}

CodingSolution CodingProblem::to_solution(const Eigen::VectorXd& alpha,
                                          const std::vector<Eigen::VectorXd>& betas) const {
  CodingSolution sol;
  for (std::size_t p = 0; p < pairs_.size(); ++p)
    sol.alpha[{net_.edges[pairs_[p].first].id, net_.edges[pairs_[p].second].id}] =
        alpha(static_cast<Eigen::Index>(p));
  for (std::size_t s = 0; s < slots_.size(); ++s) {
    auto& per_demand = sol.beta[slots_[s].terminal];
    if (per_demand.size() < static_cast<std::size_t>(slots_[s].position)) per_demand.resize(slots_[s].position);
    const auto& inc = topo_.inc[slots_[s].node];
    for (std::size_t r = 0; r < inc.size(); ++r)
      per_demand[slots_[s].position - 1][net_.edges[inc[r]].id] = betas[s](static_cast<Eigen::Index>(r));
  }
  return sol;
}

std::vector<std::size_t> CodingProblem::unreachable_slots() const {
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < slots_.size(); ++s) {
    std::vector<char> seen(topo_.num_edges(), 0);
    std::vector<int> stack{topo_.source_edges[slots_[s].message - 1]};
    seen[stack.back()] = 1;
    while (!stack.empty()) {
      const int e = stack.back();
      stack.pop_back();
      for (int next : topo_.out[topo_.edge_head[e]])
        if (!seen[next]) seen[next] = 1, stack.push_back(next);
    }
    const auto& inc = topo_.inc[slots_[s].node];
    if (std::none_of(inc.begin(), inc.end(), [&](int e) { return seen[e]; })) out.push_back(s);
  }
  return out;
}

CodingSolution refine_beta(const Network& net, const CodingSolution& alpha_fixed) {
  const CodingProblem prob(net);
  require_valid_solution(net, prob.topology(), alpha_fixed);
  const Eigen::VectorXd a = prob.alpha_vector(alpha_fixed);
  CodingSolution sol = prob.to_solution(a, prob.best_betas(prob.gains(a)));
  sol.alpha = alpha_fixed.alpha;
  return sol;
}

std::map<std::pair<std::string, std::string>, double> objective_gradient(const Network& net,
                                                                         const CodingSolution& sol) {
  const CodingProblem prob(net);
  require_valid_solution(net, prob.topology(), sol);
  const Eigen::VectorXd g =
      prob.gradient(prob.alpha_vector(sol), beta_vectors(prob.topology(), prob.slots(), sol));
  std::map<std::pair<std::string, std::string>, double> out;
  for (std::size_t p = 0; p < prob.pairs().size(); ++p)
    out[{net.edges[prob.pairs()[p].first].id, net.edges[prob.pairs()[p].second].id}] =
        g(static_cast<Eigen::Index>(p));
  return out;
}

namespace {

RestartResult run_restart(const CodingProblem& prob, const SolverConfig& cfg, int restart) {
  RestartResult res;
  std::mt19937_64 rng(restart_seed(cfg.seed, restart));
  std::uniform_real_distribution<double> draw(-cfg.init_scale, cfg.init_scale);
  const auto n = static_cast<Eigen::Index>(prob.num_alpha());
  auto clip = [&](Eigen::VectorXd v) { return v.cwiseMax(-cfg.alpha_cap).cwiseMin(cfg.alpha_cap).eval(); };

  res.alpha = Eigen::VectorXd(n);
  for (Eigen::Index i = 0; i < n; ++i) res.alpha(i) = draw(rng);
  res.alpha = clip(res.alpha);
  res.betas = prob.best_betas(prob.gains(res.alpha));
  res.F = prob.objective(prob.gains(res.alpha), res.betas);
  res.trace.push_back({restart, 0, res.F});

  double step = 1;
  double damping = 1e-3;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    if (res.F < cfg.tol_F || n == 0) {
      res.stopped_early = true;
      break;
    }
    Eigen::VectorXd cand;
    std::vector<Eigen::VectorXd> cand_betas;
    double cand_F = 0;
    bool accepted = false;
    auto try_point = [&](Eigen::VectorXd point) {
      const Eigen::MatrixXd G = prob.gains(point);
      cand_betas = prob.best_betas(G);
      cand_F = prob.objective(G, cand_betas);
      cand = std::move(point);
      return std::isfinite(cand_F);
    };

    if (n <= kDampedLimit) {
      // Damped Gauss-Newton on the deviations, beta refitted after each step.
      Eigen::VectorXd r;
      const Eigen::MatrixXd J = prob.residual_jacobian(res.alpha, res.betas, r);
      const Eigen::MatrixXd JtJ = J.transpose() * J;
      const Eigen::VectorXd Jtr = J.transpose() * r;
      for (int bt = 0; bt < kMaxBacktracks && !accepted; ++bt) {
        Eigen::MatrixXd A = JtJ;
        A.diagonal().array() += damping * (1 + JtJ.diagonal().array());
        const Eigen::VectorXd delta = A.ldlt().solve(-Jtr);
        if (try_point(clip(res.alpha + delta)) && cand_F < res.F) {
          accepted = true;
          damping = std::max(damping / 3, 1e-12);
        } else {
          damping *= 4;
        }
      }
    } else {
      const Eigen::VectorXd g = prob.gradient(res.alpha, res.betas);
      double t = std::min(2 * step, kMaxStep);
      for (int bt = 0; bt < kMaxBacktracks && !accepted; ++bt, t /= 2) {
        if (try_point(clip(res.alpha - t * g)) && cand_F <= res.F - kArmijo * g.dot(res.alpha - cand)) {
          accepted = true;
          step = t;
        }
      }
    }
    if (!accepted) {
      res.stopped_early = true;
      break;
    }
    const double rel = (res.F - cand_F) / std::max(res.F, 1e-300);
    res.alpha = std::move(cand);
    res.betas = std::move(cand_betas);
    res.F = cand_F;
    res.trace.push_back({restart, it, res.F});
    if (rel < cfg.tol_step) {
      res.stopped_early = true;
      break;
    }
  }
  return res;
}

}  // namespace

SolverReport solve(const Network& net, const SolverConfig& cfg) {
  cfg.check();
  const auto start = std::chrono::steady_clock::now();
  const CodingProblem prob(net);

  std::vector<RestartResult> results(cfg.restarts);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < cfg.restarts; r = next++) results[r] = run_restart(prob, cfg, r);
  };
  unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(cfg.restarts));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SolverReport report;
  int best = 0;
  for (int r = 1; r < cfg.restarts; ++r)
    if (results[r].F < results[best].F) best = r;
  for (const auto& r : results) report.F_trace.insert(report.F_trace.end(), r.trace.begin(), r.trace.end());

  report.best_restart = best;
  report.best = prob.to_solution(results[best].alpha, results[best].betas);
  report.profile = gamma_profile(net, report.best);
  report.converged = report.profile.F < cfg.tol_F || results[best].stopped_early;
  for (std::size_t s : prob.unreachable_slots()) {
    const auto& slot = prob.slots()[s];
    report.converged = false;
    report.diagnostics.push_back("terminal " + slot.terminal + " cannot receive message m" +
                                 std::to_string(slot.message));
  }
  report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

Json solver_log_to_json(const SolverConfig& cfg, const SolverReport& report) {
  Json doc = Json::object();
  doc["config"] = {{"restarts", cfg.restarts},     {"max_iters", cfg.max_iters},
                   {"tol_F", cfg.tol_F},           {"tol_step", cfg.tol_step},
                   {"seed", cfg.seed},             {"init_scale", cfg.init_scale},
                   {"alpha_cap", cfg.alpha_cap}};
  doc["best_restart"] = report.best_restart;
  doc["F"] = report.profile.F;
  doc["gamma_max"] = report.profile.gamma_max;
  doc["converged"] = report.converged;
  doc["wall_time"] = report.wall_time;
  doc["diagnostics"] = report.diagnostics;
  Json trace = Json::array();
  for (const auto& p : report.F_trace) trace.push_back({p.restart, p.iteration, p.F});
  doc["trace"] = std::move(trace);
  return doc;
}

}  // namespace qlnc
