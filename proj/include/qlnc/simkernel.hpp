#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qlnc/fxp.hpp"
#include "qlnc/json_io.hpp"
#include "qlnc/netmodel.hpp"
#include "qlnc/xfer.hpp"

namespace qlnc {

struct RealRun {
  std::vector<double> edge_values;  // indexed like Network::edges
  std::vector<double> decoded;      // one per demand slot
};

struct FixedRun {
  std::vector<FixedPointValue> edge_values;
  std::vector<double> terminal_values;  // pre-rounding combination per slot
  std::vector<std::int64_t> decoded;
  // Largest |binary64 sum - extended-precision sum| over all combining
  // nodes, in value units.
  double max_internal_residual = 0;
};

/// A network and solution flattened into a forward-evaluation program.
class Evaluator {
 public:
  Evaluator(const Network& net, const CodingSolution& sol);

  std::size_t num_messages() const { return source_edges_.size(); }
  std::size_t num_edges() const { return edge_ids_.size(); }
  const std::vector<DemandSlot>& slots() const { return slots_; }
  const std::string& edge_id(int e) const { return edge_ids_[e]; }

  RealRun run_real(std::span<const double> m) const;
  RealRun run_real(std::span<const std::int64_t> m) const;
  FixedRun run_fixed(std::span<const std::int64_t> m, const FixedPointFormat& fmt) const;

 private:
  struct Term {
    int edge;
    double coeff;
  };
  struct Combination {
    int edge;
    std::vector<Term> terms;
  };

  std::vector<std::string> edge_ids_;
  std::vector<int> source_edges_;
  std::vector<Combination> program_;  // non-source edges in topological order
  std::vector<DemandSlot> slots_;
  std::vector<std::vector<Term>> decoders_;
};

RealRun run_real(const Network& net, const CodingSolution& sol, std::span<const double> m);
FixedRun run_fixed(const Network& net, const CodingSolution& sol, std::span<const std::int64_t> m,
                   const FixedPointFormat& fmt);

struct SweepMode {
  enum class Kind { exhaustive, sampled };
  Kind kind = Kind::exhaustive;
  std::uint64_t count = 0;
  std::uint64_t seed = 0;

  static SweepMode exhaustive() { return {}; }
  static SweepMode sampled(std::uint64_t count, std::uint64_t seed) {
    return {Kind::sampled, count, seed};
  }
};

inline constexpr std::uint64_t kDefaultExhaustiveBudget = std::uint64_t{1} << 22;
inline constexpr std::size_t kReportedFailureCap = 100;

struct VerifyOptions {
  std::uint64_t exhaustive_budget = kDefaultExhaustiveBudget;
  unsigned threads = 0;  // 0 = hardware concurrency
};

struct DecodeFailure {
  std::vector<std::int64_t> m;
  std::string terminal;
  int demand = 0;
  std::optional<std::int64_t> decoded;  // empty when the run overflowed
  std::int64_t expected = 0;
  std::string note;
};

struct VerificationReport {
  SweepMode mode;
  std::int64_t message_bound = 0;
  FixedPointFormat format;
  std::uint64_t total_cases = 0;
  std::uint64_t failure_count = 0;
  std::vector<DecodeFailure> failures;  // lexicographically first, capped
  double max_terminal_residual = 0;
  double max_internal_residual = 0;
  bool passed = false;
};

/// The 2k+3 extreme vectors every sampled sweep starts with.
std::vector<std::vector<std::int64_t>> boundary_vectors(std::size_t k, std::int64_t bound);

VerificationReport verify(const Network& net, const CodingSolution& sol, const FixedPointFormat& fmt,
                          std::int64_t message_bound, SweepMode mode, const VerifyOptions& opts = {});

Json report_to_json(const VerificationReport& report);

}  // namespace qlnc
