#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "qlnc/netmodel.hpp"

namespace qlnc {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Real coefficients of a linear code.
///
/// `alpha[{e, e2}]` is the weight of incoming edge e in the combination sent
/// on e2 (head(e) == tail(e2)); missing pairs are zero. `beta[t][j][e]` is the
/// weight terminal t gives incoming edge e when decoding its (j+1)-th demand.
struct CodingSolution {
  std::map<std::pair<std::string, std::string>, double> alpha;
  std::map<std::string, std::vector<std::map<std::string, double>>> beta;

  bool operator==(const CodingSolution&) const = default;
};

/// Structural problems of `sol` against `net`; empty when usable.
std::vector<std::string> check_solution(const Network& net, const Topology& topo,
                                        const CodingSolution& sol);
void require_valid_solution(const Network& net, const Topology& topo, const CodingSolution& sol);

struct AlphaEntry {
  int from_edge;
  int to_edge;
  double value;
};

std::vector<AlphaEntry> alpha_entries(const Topology& topo, const CodingSolution& sol);

/// Per demand slot, the terminal's weights over its incoming edges (in
/// canonical inc(t) order).
std::vector<Eigen::VectorXd> beta_vectors(const Topology& topo, const std::vector<DemandSlot>& slots,
                                          const CodingSolution& sol);

/// Networks with more edges than this use sparse transfer matrices.
inline constexpr int kDenseEdgeLimit = 512;

template <typename Scalar = double>
MatrixX<Scalar> build_T(const Topology& topo, const CodingSolution& sol) {
  MatrixX<Scalar> T = MatrixX<Scalar>::Zero(topo.num_edges(), topo.num_edges());
  for (const auto& a : alpha_entries(topo, sol)) T(a.from_edge, a.to_edge) = Scalar(a.value);
  return T;
}

template <typename Scalar = double>
MatrixX<Scalar> build_T(const Network& net, const CodingSolution& sol) {
  const Topology topo = make_topology(net);
  require_valid_solution(net, topo, sol);
  return build_T<Scalar>(topo, sol);
}

template <typename Scalar = double>
Eigen::SparseMatrix<Scalar> build_T_sparse(const Topology& topo, const CodingSolution& sol) {
  std::vector<Eigen::Triplet<Scalar>> trips;
  for (const auto& a : alpha_entries(topo, sol))
    trips.emplace_back(a.from_edge, a.to_edge, Scalar(a.value));
  Eigen::SparseMatrix<Scalar> T(topo.num_edges(), topo.num_edges());
  T.setFromTriplets(trips.begin(), trips.end());
  return T;
}

/// Source-row selector: row i has a one in the column of message i's edge.
template <typename Scalar = double>
MatrixX<Scalar> source_selector(const Topology& topo) {
  MatrixX<Scalar> S = MatrixX<Scalar>::Zero(static_cast<Eigen::Index>(topo.source_edges.size()),
                                            topo.num_edges());
  for (std::size_t i = 0; i < topo.source_edges.size(); ++i)
    S(static_cast<Eigen::Index>(i), topo.source_edges[i]) = Scalar(1);
  return S;
}

/// Rows of sum_{j=0}^{depth} T^j for the source edges (k x |E|).
template <typename Scalar, typename TransferMatrix>
MatrixX<Scalar> accumulate_gains(const Topology& topo, const TransferMatrix& T, int depth) {
  MatrixX<Scalar> term = source_selector<Scalar>(topo);
  MatrixX<Scalar> sum = term;
  for (int j = 1; j <= depth; ++j) {
    term = (term * T).eval();
    sum += term;
  }
  return sum;
}

template <typename Scalar = double>
MatrixX<Scalar> gain_matrix(const Topology& topo, const CodingSolution& sol) {
  const int depth = depth_partition(topo).depth;
  if (topo.num_edges() <= kDenseEdgeLimit)
    return accumulate_gains<Scalar>(topo, build_T<Scalar>(topo, sol), depth);
  return accumulate_gains<Scalar>(topo, build_T_sparse<Scalar>(topo, sol), depth);
}

template <typename Scalar = double>
MatrixX<Scalar> gain_matrix(const Network& net, const CodingSolution& sol) {
  const Topology topo = make_topology(net);
  require_valid_solution(net, topo, sol);
  return gain_matrix<Scalar>(topo, sol);
}

struct DemandGamma {
  DemandSlot slot;
  Eigen::VectorXd gamma;  // coefficient of each source message (size k)
  double deviation = 0;   // |gamma_w - 1| + sum_{i != w} |gamma_i|
  double squared = 0;     // (gamma_w - 1)^2 + sum_{i != w} gamma_i^2
};

struct GammaProfile {
  std::vector<DemandGamma> demands;
  double F = 0;
  double gamma_max = 0;
};

/// Scores terminal combinations given the source-row gain matrix.
GammaProfile gamma_profile(const Topology& topo, const std::vector<DemandSlot>& slots,
                           const Eigen::MatrixXd& gains, const std::vector<Eigen::VectorXd>& betas);
GammaProfile gamma_profile(const Network& net, const CodingSolution& sol);

// Solution file.
CodingSolution solution_from_json_text(const std::string& text);
CodingSolution load_solution(const std::string& path);
/// Writes alpha/beta plus the profile's F and gamma_max.
void save_solution(const CodingSolution& sol, const GammaProfile& profile, const std::string& path);
std::string solution_to_json_text(const CodingSolution& sol, const GammaProfile& profile);

}  // namespace qlnc
