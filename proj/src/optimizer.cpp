#include "arqshare/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "arqshare/error.hpp"
#include "arqshare/parallel.hpp"
#include "arqshare/pdp.hpp"

namespace arqshare {
namespace {

constexpr std::size_t kBlock = 4096;

int sum_of(std::span<const int> q) { return std::accumulate(q.begin(), q.end(), 0); }

double stage_pdp(std::span<const double> p, std::span<const int> q) {
  return pdp_semi_cumulative_total(p.first(q.size()), q);
}

// Prefixes of length `len` satisfying the adjacency rule with sum in [lo, hi],
// lexicographic order.
void append_prefixes(int len, int lo, int hi, std::vector<int>& cur,
                     std::vector<std::vector<int>>& out) {
  const int used = sum_of(cur);
  if (static_cast<int>(cur.size()) == len) {
    if (used >= lo && satisfies_adjacency(cur)) out.push_back(cur);
    return;
  }
  const int first = cur.empty() ? 1 : 0;
  for (int v = first; used + v <= hi; ++v) {
    cur.push_back(v);
    // adjacency between the two newest positions can already be decided
    const std::size_t n = cur.size();
    if (!(n >= 2 && cur[n - 2] <= 1 && cur[n - 1] == 0)) append_prefixes(len, lo, hi, cur, out);
    cur.pop_back();
  }
}

std::vector<std::vector<int>> prefixes(int len, int lo, int hi) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  if (len > 0 && hi >= 1) append_prefixes(len, lo, hi, cur, out);
  return out;
}

// R1 and R2 with the common factor 1 / prod_{i<=N-2} P_i^{q_i} left out.
struct UnscaledRatios {
  double r1;
  double r2;
  double log_scale;  // -sum_{i<=N-2} q_i log P_i
  double cond;       // rounding amplification of the subtraction behind r2
};

UnscaledRatios unscaled_ratios(std::span<const double> p, std::span<const int> prefix,
                               TailPlaceholder ph) {
  const int n = static_cast<int>(prefix.size()) + 2;
  if (static_cast<int>(p.size()) < n) {
    throw DimensionMismatch("fold ratios for " + std::to_string(n) + " hops need as many outage values");
  }
  if (ph.last < 1 || ph.penultimate < 0) {
    throw DomainError("fold placeholder needs q_N >= 1 and q_{N-1} >= 0");
  }
  std::vector<int> q(prefix.begin(), prefix.end());
  q.push_back(ph.penultimate);
  q.push_back(ph.last);
  std::vector<int> moved = q;
  moved[n - 2] += 1;
  moved[n - 1] -= 1;

  const double f_prev = n - 1 >= 2 ? hop_factor(p, q, n - 1) : 1.0;
  const double f = hop_factor(p, q, n);
  const double f_moved = hop_factor(p, moved, n);
  const double p_last = p[n - 1];
  const double diff = f_moved / p_last - f;

  double log_scale = 0.0;
  for (std::size_t i = 0; i < prefix.size(); ++i) log_scale -= prefix[i] * std::log(p[i]);
  const double cond = (std::abs(f_moved / p_last) + std::abs(f)) / std::abs(diff);
  return {f_prev, diff / std::pow(p[n - 2], ph.penultimate), log_scale, cond};
}

UnscaledRatios checked_ratios(std::span<const double> p, std::span<const int> prefix) {
  const UnscaledRatios a = unscaled_ratios(p, prefix, kPrimaryPlaceholder);
  const UnscaledRatios b = unscaled_ratios(p, prefix, kCheckPlaceholder);
  const double scale = std::max(std::abs(a.r2), std::abs(b.r2));
  // a genuine dependence on the placeholder would show up at O(1); rounding
  // in F'_N / P_N - F_N can only account for about eps * cond
  const double eps = std::numeric_limits<double>::epsilon();
  const double tol = kPlaceholderRelTol + 64.0 * eps * (a.cond + b.cond);
  if (!std::isfinite(a.r2) || !std::isfinite(b.r2) || std::abs(a.r2 - b.r2) > tol * scale) {
    throw NumericalDegeneracy("R2 depends on the tail placeholder for prefix [" +
                              format_allocation(prefix) + "]: " + std::to_string(a.r2) + " vs " +
                              std::to_string(b.r2));
  }
  return a;
}

double exponent_from(const UnscaledRatios& r, double p_last) {
  if (!(r.r2 > 0.0)) return -std::numeric_limits<double>::infinity();
  if (r.r1 <= 0.0) return std::numeric_limits<double>::infinity();
  return std::log(r.r1 / r.r2) / std::log(p_last);
}

struct TailRange {
  int lo;
  int hi;
};

// Feasible q_N values for the given prefix and tail sum form an interval.
TailRange tail_range(std::span<const int> prefix, int tail_sum) {
  int lo = 0;
  int hi = tail_sum;
  // q_{N-1} = 0 is only allowed after a node with at least 2 ARQs, and never
  // for the first node.
  if (prefix.empty() || prefix.back() <= 1) hi = tail_sum - 1;
  // q_N = 0 needs q_{N-1} = tail_sum >= 2.
  if (tail_sum <= 1) lo = 1;
  return {lo, hi};
}

// Tail values around floor(fold_exponent) worth evaluating, the projected
// start first.
struct TailWindow {
  std::vector<int> last_values;
  bool clamped = false;
};

TailWindow tail_window(std::span<const double> p, std::span<const int> prefix, int tail_sum) {
  if (tail_sum < 1) throw DomainError("tail_sum must be at least 1");
  if (!prefix.empty() && !satisfies_adjacency(prefix)) {
    throw InfeasibleAllocation("infeasible prefix [" + format_allocation(prefix) + "]");
  }
  const TailRange range = tail_range(prefix, tail_sum);
  if (range.lo > range.hi) {
    throw InfeasibleAllocation("no feasible split of " + std::to_string(tail_sum) +
                               " ARQs after prefix [" + format_allocation(prefix) + "]");
  }
  const int n = static_cast<int>(prefix.size()) + 2;
  const double x = exponent_from(checked_ratios(p, prefix), p[n - 1]);
  const double fl = std::floor(x);
  int start;
  bool clamped = false;
  if (fl < range.lo) {
    start = range.lo;
    clamped = true;
  } else if (fl > range.hi) {
    start = range.hi;
    clamped = true;
  } else {
    start = static_cast<int>(fl);
  }
  TailWindow w{{start}, clamped};
  if (start - 1 >= range.lo) w.last_values.push_back(start - 1);
  if (start + 1 <= range.hi) w.last_values.push_back(start + 1);
  return w;
}

std::vector<int> with_tail(std::span<const int> prefix, int tail_sum, int last) {
  std::vector<int> q(prefix.begin(), prefix.end());
  q.push_back(tail_sum - last);
  q.push_back(last);
  return q;
}

// q_j for stage j of the list algorithms: floor of the fold exponent, never
// negative and never above the budget.
int stage_last_count(std::span<const double> p, std::span<const int> prefix, int q_sum) {
  const int n = static_cast<int>(prefix.size()) + 2;
  const double x = exponent_from(checked_ratios(p, prefix), p[n - 1]);
  if (!(x >= 0.0)) return 0;
  if (x >= q_sum) return q_sum;
  return static_cast<int>(std::floor(x));
}

// Stage j entries grown from one stage j-2 entry.
std::vector<Candidate> grow(const FoldContext& ctx, const Candidate& parent, int j) {
  const int n = ctx.hops();
  const auto p = ctx.outage.values();
  const int last = stage_last_count(p, parent.q, ctx.q_sum);
  const int parent_sum = sum_of(parent.q);
  std::vector<Candidate> out;
  for (int partial = j; partial <= ctx.q_sum - (n - j) + 1; ++partial) {
    const int penultimate = partial - parent_sum - last;
    if (penultimate < 0) continue;
    std::vector<int> q = parent.q;
    q.push_back(penultimate);
    q.push_back(last);
    if (!satisfies_adjacency(q)) continue;
    if (j == n && partial != ctx.q_sum) continue;
    const double pdp = stage_pdp(p, q);
    out.push_back({std::move(q), partial, pdp});
  }
  return out;
}

std::vector<Candidate> grow_all(const FoldContext& ctx, const std::vector<Candidate>& prev, int j) {
  std::vector<std::vector<Candidate>> parts(prev.size());
  const auto count = static_cast<std::int64_t>(prev.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i) parts[i] = grow(ctx, prev[i], j);
  std::vector<Candidate> out;
  for (auto& part : parts) {
    for (auto& c : part) out.push_back(std::move(c));
  }
  return out;
}

CandidateList seed_list(const FoldContext& ctx, int stage) {
  const int n = ctx.hops();
  CandidateList list;
  list.stage = stage;
  const auto p = ctx.outage.values();
  for (auto& q : prefixes(stage, stage, ctx.q_sum - (n - stage) + 1)) {
    if (stage == n && sum_of(q) != ctx.q_sum) continue;
    const int s = sum_of(q);
    const double pdp = stage_pdp(p, q);
    list.entries.push_back({std::move(q), s, pdp});
  }
  return list;
}

// Keeps the lowest-PDP entry per partial sum plus its variant with one ARQ
// moved from position j-1 to position j.
std::vector<Candidate> retain_greedy(const FoldContext& ctx, const std::vector<Candidate>& entries) {
  std::vector<Candidate> out;
  if (entries.empty()) return out;
  const auto p = ctx.outage.values();
  std::vector<int> sums;
  for (const auto& e : entries) sums.push_back(e.partial_sum);
  std::sort(sums.begin(), sums.end());
  sums.erase(std::unique(sums.begin(), sums.end()), sums.end());

  for (int s : sums) {
    ArgminAccumulator acc;
    for (const auto& e : entries) {
      if (e.partial_sum == s) acc.offer(e.pdp, e.q);
    }
    auto [q, pdp] = acc.best();
    out.push_back({q, s, pdp});
    const std::size_t len = q.size();
    if (len >= 2 && q[len - 2] >= 1) {
      std::vector<int> variant = q;
      variant[len - 2] -= 1;
      variant[len - 1] += 1;
      if (satisfies_adjacency(variant)) {
        const double vp = stage_pdp(p, variant);
        out.push_back({std::move(variant), s, vp});
      }
    }
  }
  return out;
}

SearchResult trivial_single_hop(const FoldContext& ctx) {
  SearchResult r;
  r.allocation = {ctx.q_sum};
  r.pdp = pdp_semi_cumulative_total(ctx.outage.values(), r.allocation);
  r.list_size = 1;
  r.found = true;
  return r;
}

SearchResult from_accumulator(const ArgminAccumulator& acc, std::size_t list_size) {
  SearchResult r;
  r.list_size = list_size;
  if (acc.empty()) return r;
  auto [q, pdp] = acc.best();
  r.allocation = std::move(q);
  r.pdp = pdp;
  r.found = true;
  return r;
}

template <class Objective>
SearchResult exhaustive_blocks(const FoldContext& ctx, Objective objective, bool all_positive,
                               bool parallel) {
  validate_context(ctx);
  const auto p = ctx.outage.values();
  AllocationEnumerator gen(ctx.hops(), ctx.q_sum);
  ArgminAccumulator acc;
  std::size_t count = 0;
  std::vector<std::vector<int>> block;
  std::vector<double> values;
  std::vector<int> q;
  bool more = true;
  while (more) {
    block.clear();
    while (block.size() < kBlock && (more = gen.next(q))) {
      if (all_positive && std::any_of(q.begin(), q.end(), [](int v) { return v < 1; })) continue;
      block.push_back(q);
    }
    values.assign(block.size(), 0.0);
    const auto m = static_cast<std::int64_t>(block.size());
    if (parallel) {
#pragma omp parallel for schedule(static)
      for (std::int64_t i = 0; i < m; ++i) values[i] = objective(p, block[i]);
    } else {
      for (std::int64_t i = 0; i < m; ++i) values[i] = objective(p, block[i]);
    }
    for (std::size_t i = 0; i < block.size(); ++i) acc.offer(values[i], block[i]);
    count += block.size();
  }
  return from_accumulator(acc, count);
}

}  // namespace

void validate_context(const FoldContext& ctx) {
  if (ctx.outage.size() == 0) throw DomainError("network needs at least one hop");
  if (ctx.outage.size() > static_cast<std::size_t>(kMaxHops)) {
    throw DomainError("at most " + std::to_string(kMaxHops) + " hops are supported");
  }
  if (ctx.q_sum < 1) throw DomainError("q_sum must be at least 1");
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  __extension__ using u128 = unsigned __int128;
  u128 r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (r > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(r);
}

std::uint64_t search_space_bound(int hops, int q_sum) { return binomial(q_sum + hops - 1, hops - 1); }

AllocationEnumerator::AllocationEnumerator(int hops, int q_sum) : q_sum_(q_sum) {
  if (hops < 1 || q_sum < 1) {
    done_ = true;
    return;
  }
  q_.assign(hops, 0);
  if (hops == 1) {
    q_[0] = q_sum;
  } else {
    q_[0] = 1;
    q_[hops - 1] = q_sum - 1;
  }
}

bool AllocationEnumerator::advance() {
  const int n = static_cast<int>(q_.size());
  int tail = 0;
  for (int i = n - 2; i >= 0; --i) {
    tail += q_[i + 1];
    if (tail > 0) {
      q_[i] += 1;
      for (int k = i + 1; k < n - 1; ++k) q_[k] = 0;
      q_[n - 1] = tail - 1;
      return true;
    }
  }
  return false;
}

bool AllocationEnumerator::next(std::vector<int>& out) {
  while (!done_) {
    if (started_ && !advance()) {
      done_ = true;
      break;
    }
    started_ = true;
    if (satisfies_adjacency(q_)) {
      out = q_;
      return true;
    }
  }
  return false;
}

std::vector<std::vector<int>> enumerate_allocations(const FoldContext& ctx) {
  validate_context(ctx);
  std::vector<std::vector<int>> out;
  AllocationEnumerator gen(ctx.hops(), ctx.q_sum);
  std::vector<int> q;
  while (gen.next(q)) out.push_back(q);
  return out;
}

void ArgminAccumulator::offer(double pdp, std::span<const int> q) {
  if (pdp < min_) {
    min_ = pdp;
    std::erase_if(near_, [this](const auto& e) { return !tied(e.first); });
  }
  if (tied(pdp)) near_.emplace_back(pdp, std::vector<int>(q.begin(), q.end()));
}

void ArgminAccumulator::merge(const ArgminAccumulator& other) {
  for (const auto& [pdp, q] : other.near_) offer(pdp, q);
}

std::pair<std::vector<int>, double> ArgminAccumulator::best() const {
  const auto* choice = &near_.front();
  for (const auto& e : near_) {
    if (e.second < choice->second) choice = &e;
  }
  return {choice->second, choice->first};
}

SearchResult exhaustive_search(const FoldContext& ctx) {
  return exhaustive_blocks(ctx, pdp_semi_cumulative_total, false, true);
}

SearchResult exhaustive_search_serial(const FoldContext& ctx) {
  return exhaustive_blocks(ctx, pdp_semi_cumulative_total, false, false);
}

SearchResult exhaustive_search_non_cooperative(const FoldContext& ctx) {
  return exhaustive_blocks(ctx, pdp_non_cooperative_total, true, true);
}

FoldRatios fold_ratios_at(std::span<const double> p, std::span<const int> prefix,
                          TailPlaceholder placeholder) {
  const UnscaledRatios r = unscaled_ratios(p, prefix, placeholder);
  const double scale = std::exp(r.log_scale);
  return {r.r1 * scale, r.r2 * scale};
}

FoldRatios fold_ratios(std::span<const double> p, std::span<const int> prefix) {
  const UnscaledRatios r = checked_ratios(p, prefix);
  const double scale = std::exp(r.log_scale);
  return {r.r1 * scale, r.r2 * scale};
}

double fold_exponent(std::span<const double> p, std::span<const int> prefix) {
  const int n = static_cast<int>(prefix.size()) + 2;
  return exponent_from(checked_ratios(p, prefix), p[n - 1]);
}

TailSplit tail_split(std::span<const double> p, std::span<const int> prefix, int tail_sum) {
  const TailWindow w = tail_window(p, prefix, tail_sum);
  ArgminAccumulator acc;
  for (int last : w.last_values) {
    const auto q = with_tail(prefix, tail_sum, last);
    acc.offer(stage_pdp(p, q), q);
  }
  const auto [q, pdp] = acc.best();
  return {q[q.size() - 2], q.back(), w.clamped};
}

SearchResult onefold_search(const FoldContext& ctx) {
  validate_context(ctx);
  const int n = ctx.hops();
  if (n == 1) return trivial_single_hop(ctx);
  if (n == 2) return exhaustive_search(ctx);
  const auto p = ctx.outage.values();
  const auto heads = prefixes(n - 2, n - 2, ctx.q_sum - 1);

  std::vector<ArgminAccumulator> partial(parallel::max_threads());
  std::size_t usable = 0;
  const auto count = static_cast<std::int64_t>(heads.size());
#pragma omp parallel for schedule(dynamic) reduction(+ : usable)
  for (std::int64_t i = 0; i < count; ++i) {
    const auto& head = heads[i];
    const int tail_sum = ctx.q_sum - sum_of(head);
    const TailRange range = tail_range(head, tail_sum);
    if (range.lo > range.hi) continue;
    ++usable;
    // every value in the window is kept so that floating-point near-ties are
    // resolved by the same rule as in exhaustive search
    for (int last : tail_window(p, head, tail_sum).last_values) {
      const auto q = with_tail(head, tail_sum, last);
      partial[parallel::thread_num()].offer(stage_pdp(p, q), q);
    }
  }
  ArgminAccumulator acc;
  for (const auto& a : partial) acc.merge(a);
  return from_accumulator(acc, usable);
}

int max_folds(int hops) { return hops >= 3 ? (hops - 1) / 2 : 0; }

CandidateList fold_list(const FoldContext& ctx, int folds) {
  validate_context(ctx);
  const int n = ctx.hops();
  if (folds < 1 || folds > max_folds(n)) {
    throw DomainError("a " + std::to_string(n) + "-hop network admits 1.." +
                      std::to_string(max_folds(n)) + " folds, got " + std::to_string(folds));
  }
  CandidateList list = seed_list(ctx, n - 2 * folds);
  for (int j = list.stage + 2; j <= n; j += 2) {
    list.entries = grow_all(ctx, list.entries, j);
    list.stage = j;
  }
  list.empty_flag = list.entries.empty();
  return list;
}

CandidateList multifold_list(const FoldContext& ctx) {
  validate_context(ctx);
  return fold_list(ctx, max_folds(ctx.hops()));
}

CandidateList greedy_multifold(const FoldContext& ctx) {
  validate_context(ctx);
  const int n = ctx.hops();
  const int folds = max_folds(n);
  if (folds < 1) throw DomainError("greedy folding needs at least 3 hops");
  CandidateList list = seed_list(ctx, n - 2 * folds);
  list.entries = retain_greedy(ctx, list.entries);
  for (int j = list.stage + 2; j <= n; j += 2) {
    list.entries = retain_greedy(ctx, grow_all(ctx, list.entries, j));
    list.stage = j;
  }
  list.empty_flag = list.entries.empty();
  return list;
}

SearchResult best_of(const CandidateList& list) {
  ArgminAccumulator acc;
  for (const auto& e : list.entries) acc.offer(e.pdp, e.q);
  return from_accumulator(acc, list.entries.size());
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::exhaustive: return "exhaustive";
    case Method::onefold: return "onefold";
    case Method::multifold: return "multifold";
    case Method::greedy: return "greedy";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "exhaustive") return Method::exhaustive;
  if (name == "onefold") return Method::onefold;
  if (name == "multifold") return Method::multifold;
  if (name == "greedy") return Method::greedy;
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

SearchResult optimize(const FoldContext& ctx, Method method) {
  validate_context(ctx);
  if (ctx.hops() == 1) return trivial_single_hop(ctx);
  if (ctx.hops() == 2 || method == Method::exhaustive) return exhaustive_search(ctx);
  switch (method) {
    case Method::onefold: return onefold_search(ctx);
    case Method::multifold: return best_of(multifold_list(ctx));
    case Method::greedy: return best_of(greedy_multifold(ctx));
    case Method::exhaustive: break;
  }
  return exhaustive_search(ctx);
}

}  // namespace arqshare
