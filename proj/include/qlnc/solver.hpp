#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qlnc/json_io.hpp"
#include "qlnc/netmodel.hpp"
#include "qlnc/xfer.hpp"

namespace qlnc {

struct SolverConfig {
  int restarts = 32;
  int max_iters = 2000;
  double tol_F = 1e-12;
  double tol_step = 1e-10;
  std::uint64_t seed = 0;
  double init_scale = 2.0;
  double alpha_cap = 64.0;
  unsigned threads = 0;  // 0 = hardware concurrency; does not affect results

  void check() const;
};

struct TracePoint {
  int restart;
  int iteration;
  double F;
};

struct SolverReport {
  CodingSolution best;
  GammaProfile profile;
  int best_restart = -1;
  std::vector<TracePoint> F_trace;
  double wall_time = 0;  // seconds
  bool converged = false;
  std::vector<std::string> diagnostics;
};

/// The search space: one coordinate per consecutive edge pair (e, e2).
/// Pairs are ordered by e2 in topological edge order, then by e in inc().
class CodingProblem {
 public:
  explicit CodingProblem(const Network& net);

  const Network& network() const { return net_; }
  const Topology& topology() const { return topo_; }
  const std::vector<DemandSlot>& slots() const { return slots_; }
  std::size_t num_alpha() const { return pairs_.size(); }
  const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }

  /// Source rows of (I - T)^-1 for the given coefficients (k x |E|).
  Eigen::MatrixXd gains(const Eigen::VectorXd& alpha) const;
  /// Exact minimum-norm beta per slot for the given gains.
  std::vector<Eigen::VectorXd> best_betas(const Eigen::MatrixXd& gains) const;
  double objective(const Eigen::MatrixXd& gains, const std::vector<Eigen::VectorXd>& betas) const;
  /// dF/dalpha with beta held fixed.
  Eigen::VectorXd gradient(const Eigen::VectorXd& alpha, const std::vector<Eigen::VectorXd>& betas) const;
  /// Jacobian of the stacked per-slot deviations with beta held fixed; the
  /// deviations themselves are written to `residual`.
  Eigen::MatrixXd residual_jacobian(const Eigen::VectorXd& alpha, const std::vector<Eigen::VectorXd>& betas,
                                    Eigen::VectorXd& residual) const;

  Eigen::VectorXd alpha_vector(const CodingSolution& sol) const;
  CodingSolution to_solution(const Eigen::VectorXd& alpha, const std::vector<Eigen::VectorXd>& betas) const;

  /// Demand slots whose message cannot reach the terminal.
  std::vector<std::size_t> unreachable_slots() const;

 private:
  Network net_;
  Topology topo_;
  std::vector<DemandSlot> slots_;
  std::vector<std::pair<int, int>> pairs_;  // (from_edge, to_edge)
  std::vector<std::vector<int>> pairs_into_;   // per edge, indices into pairs_
  std::vector<std::vector<int>> pairs_out_of_;
};

/// Exact beta for fixed alpha.
CodingSolution refine_beta(const Network& net, const CodingSolution& alpha_fixed);

/// dF/dalpha at `sol` with beta fixed, keyed like CodingSolution::alpha.
std::map<std::pair<std::string, std::string>, double> objective_gradient(const Network& net,
                                                                         const CodingSolution& sol);

SolverReport solve(const Network& net, const SolverConfig& cfg = {});

Json solver_log_to_json(const SolverConfig& cfg, const SolverReport& report);

}  // namespace qlnc
