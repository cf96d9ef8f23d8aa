#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "arqshare/allocation.hpp"
#include "arqshare/channel.hpp"

namespace arqshare {

/// Longest network for which borrowing-state tables are built.
inline constexpr int kMaxHops = 30;

/// Per-hop drop probabilities below this are reported as 0 and flagged.
inline constexpr double kUnderflowFloor = 1e-280;

/// Number of binary strings of length n without two consecutive ones.
/// Throws std::overflow_error once the count no longer fits in 64 bits.
std::uint64_t fb_count(int n);

/// Borrowing states b_1..b_N of the nodes that carried a packet to the last
/// hop; b_m = 1 means node m needed residual ARQs of node m - 1.
struct StateSequence {
  std::vector<std::uint8_t> bits;
  bool operator==(const StateSequence&) const = default;
  auto operator<=>(const StateSequence&) const = default;
};

/// All length-n state sequences [0 x 0] / [0 x 1] built from the
/// no-consecutive-ones strings x of length n - 2, in lexicographic order.
/// Throws DomainError for n < 2.
std::vector<StateSequence> enumerate_state_sequences(int n);

// Partial-sum factors. Empty index ranges sum to exactly zero.

/// sum_{i=1}^{q} P^{q-i}
double beta_no_borrow(double p, int q);
/// sum_{i=1}^{q_a} P_a^{q_a-i} P_b^{i-1}
double beta_external(double p_a, double p_b, int q_a);
/// sum_{i=1}^{q_a} P_a^{q_a-i} sum_{k=0}^{i-2} P_b^{q_b+k}
double beta_internal(double p_a, double p_b, int q_a, int q_b);

enum class BetaKind : std::uint8_t { no_borrow, external, internal };

/// One factor of a hop-factor term; `position` is the 0-based node index
/// (the first node of the pair for external/internal factors).
struct BetaFactor {
  BetaKind kind;
  int position;
};

/// Occurrence counts observed while assembling F_j.
struct AssemblyStats {
  std::size_t terms = 0;
  int max_external = 0;
  int max_no_borrow = 0;
  int max_internal = 0;
};

/// Translation of every state sequence of length j into its beta product.
/// Tables are built once per length and shared between threads.
struct HopFactorPlan {
  int length = 0;
  std::vector<StateSequence> sequences;
  std::vector<std::vector<BetaFactor>> terms;
  AssemblyStats stats;
};

const HopFactorPlan& hop_factor_plan(int j);

/// F_j for 2 <= j: sum over the state sequences of length j of the product
/// of beta factors. Reads P_1..P_j and q_1..q_{j-1} (1-based); `p` must hold
/// at least j entries and `q` at least j - 1.
double hop_factor(std::span<const double> p, std::span<const int> q, int j);

struct PdpBreakdown {
  std::vector<double> per_hop;
  double total = 0.0;
  bool underflow_flag = false;
};

/// Exact drop probability of the semi-cumulative scheme, split by the hop at
/// which the packet is lost.
PdpBreakdown pdp_semi_cumulative(const OutageVector& p, const ArqAllocation& q);
PdpBreakdown pdp_semi_cumulative(const OutageVector& p, std::span<const int> q);

/// Total only, without validation. Used by the search kernels, which only
/// ever pass allocations that satisfy the adjacency rule.
double pdp_semi_cumulative_total(std::span<const double> p, std::span<const int> q);

/// 1 - prod_i (1 - P_i^{q_i}); q_i = 0 means a certain drop at hop i.
double pdp_non_cooperative(const OutageVector& p, std::span<const int> q);
double pdp_non_cooperative_total(std::span<const double> p, std::span<const int> q);

}  // namespace arqshare
