#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qlnc/fxp.hpp"
#include "qlnc/json_io.hpp"
#include "qlnc/netmodel.hpp"
#include "qlnc/xfer.hpp"

namespace qlnc {

/// Structural quantities the closed-form bounds depend on.
struct NetworkStats {
  int depth = 0;
  int max_in_degree = 0;
  double alpha_max = 0;  // max |alpha| over the solution
  int base = 2;

  double growth() const { return max_in_degree * alpha_max; }
};

NetworkStats network_stats(const Network& net, const CodingSolution& sol);

/// Largest edge magnitude at depth i in real mode: (din * alpha)^i * M.
double lemma1_bound(const NetworkStats& stats, double message_bound, int depth_index);

/// Largest quantization drift at depth i: ((din*alpha)^i - 1) / (din*alpha - 1) * b^-p,
/// with the limit i * b^-p when din*alpha == 1.
double lemma2_bound(const NetworkStats& stats, int frac_digits, int depth_index);

enum class PlanMethod { theorem, tight };

struct Rate {
  std::int64_t num = 0;
  std::int64_t den = 1;
  bool exact = true;  // false unless the base is a power of two
  double value = 0;

  std::string to_string() const;
};

Rate rate(int n_bits, int int_digits, int frac_digits, int base);

/// Either a message bound M or a message width in bits.
struct MessageRequest {
  std::optional<std::int64_t> bound;
  std::optional<int> bits;

  static MessageRequest with_bound(std::int64_t m) { return {m, std::nullopt}; }
  static MessageRequest with_bits(int n) { return {std::nullopt, n}; }
};

/// Bits needed for the usable range [-2^(n-1), 2^(n-1) - 1] to fit in [-M, M].
int bits_for_bound(std::int64_t message_bound);
std::int64_t bound_for_bits(int bits);

/// Largest integer M with gamma * M < 1/2 (by at least a 1e-9 relative
/// margin). Throws InfeasibleError if no M >= 1 qualifies.
std::int64_t max_message_bound(double gamma);

struct PrecisionPlan {
  FixedPointFormat fmt;
  std::int64_t message_bound = 0;
  int n_bits = 0;
  Rate rate;
  PlanMethod method = PlanMethod::tight;
  double margin = 0;  // 1/2 minus the worst-case terminal error
  std::optional<int> effective_depth;
};

PrecisionPlan plan_theorem(const NetworkStats& stats, double gamma, const MessageRequest& request,
                           std::optional<int> effective_depth = std::nullopt);

/// Per-edge bounds with exact coefficients. Each edge's error bound is
/// error_units[e] * b^-p / 2.
struct TightAnalysis {
  std::vector<double> value_bound;
  std::vector<double> error_units;
  std::vector<double> terminal_units;  // sum_r |beta_r| * error_units, per demand slot
  std::vector<double> deviation;       // per demand slot
};

TightAnalysis tight_analysis(const Network& net, const CodingSolution& sol, std::int64_t message_bound);

PrecisionPlan plan_tight(const Network& net, const CodingSolution& sol, double gamma,
                         const MessageRequest& request);
PrecisionPlan plan_tight(const Network& net, const CodingSolution& sol, const MessageRequest& request);

Json plan_to_json(const PrecisionPlan& plan);
PrecisionPlan plan_from_json(const Json& doc);
PrecisionPlan load_plan(const std::string& path);
void save_plan(const PrecisionPlan& plan, const std::string& path);

}  // namespace qlnc
