#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "arqshare/allocation.hpp"
#include "arqshare/channel.hpp"

namespace arqshare {

/// Problem instance: minimise the semi-cumulative PDP over feasible
/// allocations of exactly q_sum ARQs.
struct FoldContext {
  OutageVector outage;
  int q_sum = 1;

  int hops() const { return static_cast<int>(outage.size()); }
};

void validate_context(const FoldContext& ctx);

/// binom(n, k); saturates at UINT64_MAX.
std::uint64_t binomial(int n, int k);

/// binom(q_sum + N - 1, N - 1), the number of compositions of q_sum.
std::uint64_t search_space_bound(int hops, int q_sum);

/// Streams every feasible allocation of q_sum over `hops` nodes exactly once,
/// in lexicographic order.
class AllocationEnumerator {
 public:
  AllocationEnumerator(int hops, int q_sum);
  bool next(std::vector<int>& out);

 private:
  bool advance();

  std::vector<int> q_;
  int q_sum_;
  bool started_ = false;
  bool done_ = false;
};

std::vector<std::vector<int>> enumerate_allocations(const FoldContext& ctx);

// PDPs within this relative distance of the minimum count as tied; ties go to
// the lexicographically smallest allocation.
inline constexpr double kTieRelTol = 1e-12;

/// Running argmin with tie tolerance. The result does not depend on the
/// order in which candidates are offered, so partial accumulators from
/// different threads can be merged in any order.
class ArgminAccumulator {
 public:
  void offer(double pdp, std::span<const int> q);
  void merge(const ArgminAccumulator& other);
  bool empty() const { return near_.empty(); }
  /// Lexicographically smallest allocation whose PDP is tied with the minimum.
  std::pair<std::vector<int>, double> best() const;

 private:
  bool tied(double pdp) const { return pdp <= min_ + kTieRelTol * min_; }

  double min_ = 2.0;
  std::vector<std::pair<double, std::vector<int>>> near_;
};

struct SearchResult {
  std::vector<int> allocation;
  double pdp = 1.0;
  std::size_t list_size = 0;  // candidates the method compared
  bool found = false;
};

SearchResult exhaustive_search(const FoldContext& ctx);
SearchResult exhaustive_search_serial(const FoldContext& ctx);

/// Optimum of the non-cooperative scheme over allocations with every q_i >= 1.
SearchResult exhaustive_search_non_cooperative(const FoldContext& ctx);

struct FoldRatios {
  double r1 = 0.0;
  double r2 = 0.0;
};

/// Values of (q_{N-1}, q_N) used to evaluate R2, which does not depend on them.
struct TailPlaceholder {
  int penultimate = 1;
  int last = 1;
};

// With q_{N-1} = 0 the difference F'_N / P_N - F_N involves no cancelling
// P_{N-1}^{q_{N-1}} terms, so the primary evaluation keeps full precision.
inline constexpr TailPlaceholder kPrimaryPlaceholder{0, 1};
inline constexpr TailPlaceholder kCheckPlaceholder{1, 1};
inline constexpr double kPlaceholderRelTol = 1e-9;

/// R1 = F_{N-1} / prod_{i<=N-2} P_i^{q_i} and
/// R2 = (F'_N / P_N - F_N) / prod_{i<=N-1} P_i^{q_i}
/// for the N = prefix.size() + 2 hop network formed by the first N entries
/// of `p`, with the tail set to `placeholder`.
FoldRatios fold_ratios_at(std::span<const double> p, std::span<const int> prefix,
                          TailPlaceholder placeholder);

/// fold_ratios_at with kPrimaryPlaceholder, cross-checked against
/// kCheckPlaceholder. Throws NumericalDegeneracy if the two R2 values are not
/// finite or differ by more than kPlaceholderRelTol relative plus the
/// rounding error the subtraction can produce.
FoldRatios fold_ratios(std::span<const double> p, std::span<const int> prefix);

/// log(R1 / R2) / log P_N: the real-valued q_N at which moving one more ARQ
/// from the last hop to the penultimate one stops lowering the PDP.
/// +inf when such moves never help, -inf when they always do.
double fold_exponent(std::span<const double> p, std::span<const int> prefix);

struct TailSplit {
  int penultimate = 0;
  int last = 0;
  bool clamped = false;
};

/// Best (q_{N-1}, q_N) with q_{N-1} + q_N = tail_sum given the prefix.
/// q_N starts at floor(fold_exponent), is projected onto the feasible range
/// (flagged as clamped when that moves it) and is then compared with its
/// feasible neighbours. Throws InfeasibleAllocation when no split of
/// tail_sum is feasible.
TailSplit tail_split(std::span<const double> p, std::span<const int> prefix, int tail_sum);

/// Every (N-2)-prefix searched exhaustively, the tail placed by tail_split.
/// list_size counts prefixes that admit a feasible tail.
SearchResult onefold_search(const FoldContext& ctx);

struct Candidate {
  std::vector<int> q;
  int partial_sum = 0;
  double pdp = 0.0;  // PDP of the truncated q.size()-hop network
};

struct CandidateList {
  int stage = 0;
  std::vector<Candidate> entries;
  bool empty_flag = false;
};

/// Folds available for an N-hop network: floor((N - 1) / 2).
int max_folds(int hops);

/// Multi-folding list with `folds` folds (1 <= folds <= max_folds). The seed
/// stage s = N - 2 folds lists every prefix with sum in
/// [s, q_sum - (N - s) + 1]; each later stage j fixes q_j = floor(log R_j /
/// log P_j) per prefix and sweeps the partial sum over
/// [j, q_sum - (N - j) + 1]. The final list keeps feasible full-budget entries.
CandidateList fold_list(const FoldContext& ctx, int folds);

/// fold_list with the maximum number of folds.
CandidateList multifold_list(const FoldContext& ctx);

/// Multi-folding list that keeps, per stage and partial sum, only the
/// lowest-PDP prefix and its variant with one ARQ moved from the penultimate
/// to the last node.
CandidateList greedy_multifold(const FoldContext& ctx);

SearchResult best_of(const CandidateList& list);

enum class Method { exhaustive, onefold, multifold, greedy };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

/// Dispatches to the requested method. Networks with N <= 2 cannot be
/// folded and always use exhaustive search.
SearchResult optimize(const FoldContext& ctx, Method method);

}  // namespace arqshare
