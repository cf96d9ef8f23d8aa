#include "arqshare/pdp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

#include "arqshare/error.hpp"

namespace arqshare {
namespace {

// Largest n with fb_count(n) = Fib(n + 2) below 2^64.
constexpr int kMaxFbIndex = 91;

void append_fb_strings(int n, std::vector<std::uint8_t>& current,
                       std::vector<std::vector<std::uint8_t>>& out) {
  if (static_cast<int>(current.size()) == n) {
    out.push_back(current);
    return;
  }
  current.push_back(0);
  append_fb_strings(n, current, out);
  current.back() = 1;
  if (current.size() < 2 || current[current.size() - 2] == 0) {
    append_fb_strings(n, current, out);
  }
  current.pop_back();
}

// Scans left to right, pairing every "01" into one internal or external
// factor; the pairing is unique because ones never touch.
std::vector<BetaFactor> translate(const StateSequence& s) {
  const int j = static_cast<int>(s.bits.size());
  std::vector<BetaFactor> factors;
  for (int m = 0; m < j; ++m) {
    if (s.bits[m] != 0) {
      throw std::logic_error("state sequence has an unpaired borrowing state");
    }
    if (m + 1 < j && s.bits[m + 1] == 1) {
      factors.push_back({m + 1 == j - 1 ? BetaKind::external : BetaKind::internal, m});
      ++m;
    } else if (m < j - 1) {
      factors.push_back({BetaKind::no_borrow, m});
    }
    // A zero on the last node contributes 1; P_j^{q_j} is applied outside.
  }
  return factors;
}

std::unique_ptr<HopFactorPlan> build_plan(int j) {
  auto plan = std::make_unique<HopFactorPlan>();
  plan->length = j;
  plan->sequences = enumerate_state_sequences(j);
  plan->terms.reserve(plan->sequences.size());
  const int internal_bound = (j + 1) / 2;
  for (const auto& s : plan->sequences) {
    auto factors = translate(s);
    int ext = 0, nob = 0, in = 0;
    for (const auto& f : factors) {
      switch (f.kind) {
        case BetaKind::external: ++ext; break;
        case BetaKind::no_borrow: ++nob; break;
        case BetaKind::internal: ++in; break;
      }
    }
    if (ext > 1 || nob > j - 2 || in > internal_bound) {
      throw std::logic_error("hop factor term of length " + std::to_string(j) +
                             " exceeds the beta occurrence bounds");
    }
    plan->stats.max_external = std::max(plan->stats.max_external, ext);
    plan->stats.max_no_borrow = std::max(plan->stats.max_no_borrow, nob);
    plan->stats.max_internal = std::max(plan->stats.max_internal, in);
    plan->terms.push_back(std::move(factors));
  }
  plan->stats.terms = plan->terms.size();
  return plan;
}

struct PlanCache {
  std::array<std::once_flag, kMaxHops + 1> once;
  std::array<std::unique_ptr<HopFactorPlan>, kMaxHops + 1> plans;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

double hop_factor_unchecked(std::span<const double> p, std::span<const int> q, int j) {
  const HopFactorPlan& plan = hop_factor_plan(j);
  std::array<double, kMaxHops> no_borrow{};
  std::array<double, kMaxHops> internal{};
  for (int m = 0; m + 1 < j; ++m) no_borrow[m] = beta_no_borrow(p[m], q[m]);
  for (int m = 0; m + 2 < j; ++m) internal[m] = beta_internal(p[m], p[m + 1], q[m], q[m + 1]);
  const double external = beta_external(p[j - 2], p[j - 1], q[j - 2]);

  double total = 0.0;
  for (const auto& term : plan.terms) {
    double prod = 1.0;
    for (const auto& f : term) {
      switch (f.kind) {
        case BetaKind::no_borrow: prod *= no_borrow[f.position]; break;
        case BetaKind::internal: prod *= internal[f.position]; break;
        case BetaKind::external: prod *= external; break;
      }
    }
    total += prod;
  }
  return total;
}

// Fills per_hop (size N) and returns whether any entry fell under the floor.
bool per_hop_drop(std::span<const double> p, std::span<const int> q, std::span<double> per_hop) {
  const int n = static_cast<int>(p.size());
  bool underflow = false;
  double survive = 1.0;
  for (int j = 1; j <= n; ++j) {
    const double f = j >= 2 ? hop_factor_unchecked(p, q, j) : 1.0;
    double v = survive * ipow(p[j - 1], q[j - 1]) * f;
    // f == 0 is an exact zero (empty beta sums); anything else this small
    // has lost its value to underflow
    if (f != 0.0 && v < kUnderflowFloor) {
      v = 0.0;
      underflow = true;
    }
    per_hop[j - 1] = v;
    survive *= 1.0 - p[j - 1];
  }
  return underflow;
}

void check_dims(std::size_t np, std::size_t nq) {
  if (np != nq) {
    throw DimensionMismatch("outage vector has " + std::to_string(np) +
                            " hops but the allocation has " + std::to_string(nq));
  }
  if (np > static_cast<std::size_t>(kMaxHops)) {
    throw DomainError("at most " + std::to_string(kMaxHops) + " hops are supported");
  }
}

}  // namespace

std::uint64_t fb_count(int n) {
  if (n < 0) throw DomainError("fb_count: n must be non-negative");
  if (n > kMaxFbIndex) throw std::overflow_error("fb_count: result exceeds 64 bits");
  std::uint64_t prev = 1, cur = 2;  // fb(0), fb(1)
  if (n == 0) return prev;
  for (int i = 2; i <= n; ++i) {
    const std::uint64_t next = cur + prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

std::vector<StateSequence> enumerate_state_sequences(int n) {
  if (n < 2) throw DomainError("state sequences need at least 2 nodes");
  std::vector<std::vector<std::uint8_t>> inner;
  std::vector<std::uint8_t> current;
  append_fb_strings(n - 2, current, inner);

  std::vector<StateSequence> out;
  out.reserve(inner.size());
  for (const auto& x : inner) {
    StateSequence s;
    s.bits.reserve(n);
    s.bits.push_back(0);
    s.bits.insert(s.bits.end(), x.begin(), x.end());
    // An empty x counts as ending in 0.
    s.bits.push_back(!x.empty() && x.back() == 1 ? 0 : 1);
    out.push_back(std::move(s));
  }
  return out;
}

double beta_no_borrow(double p, int q) {
  double sum = 0.0;
  for (int i = 0; i < q; ++i) sum = sum * p + 1.0;
  return sum;
}

double beta_external(double p_a, double p_b, int q_a) {
  double sum = 0.0;
  double pb_pow = 1.0;
  for (int i = 1; i <= q_a; ++i) {
    sum += ipow(p_a, q_a - i) * pb_pow;
    pb_pow *= p_b;
  }
  return sum;
}

double beta_internal(double p_a, double p_b, int q_a, int q_b) {
  if (q_a < 2) return 0.0;
  // inner(i) = sum_{k=0}^{i-2} P_b^k, grown incrementally.
  double inner = 0.0;
  double pb_pow = 1.0;
  double sum = 0.0;
  for (int i = 2; i <= q_a; ++i) {
    inner += pb_pow;
    pb_pow *= p_b;
    sum += ipow(p_a, q_a - i) * inner;
  }
  return sum * ipow(p_b, q_b);
}

const HopFactorPlan& hop_factor_plan(int j) {
  if (j < 2) throw DomainError("hop factor is defined for j >= 2");
  if (j > kMaxHops) throw DomainError("hop factor length exceeds " + std::to_string(kMaxHops));
  PlanCache& cache = plan_cache();
  std::call_once(cache.once[j], [&] { cache.plans[j] = build_plan(j); });
  return *cache.plans[j];
}

double hop_factor(std::span<const double> p, std::span<const int> q, int j) {
  if (j < 2) throw DomainError("hop factor is defined for j >= 2");
  if (p.size() < static_cast<std::size_t>(j) || q.size() + 1 < static_cast<std::size_t>(j)) {
    throw DimensionMismatch("hop_factor(" + std::to_string(j) + ") needs " + std::to_string(j) +
                            " outage values and " + std::to_string(j - 1) + " ARQ counts");
  }
  return hop_factor_unchecked(p, q, j);
}

PdpBreakdown pdp_semi_cumulative(const OutageVector& p, const ArqAllocation& q) {
  check_dims(p.size(), q.size());
  PdpBreakdown out;
  out.per_hop.resize(p.size());
  out.underflow_flag = per_hop_drop(p.values(), q.values(), out.per_hop);
  for (double v : out.per_hop) out.total += v;
  out.total = std::min(out.total, 1.0);
  return out;
}

PdpBreakdown pdp_semi_cumulative(const OutageVector& p, std::span<const int> q) {
  return pdp_semi_cumulative(p, ArqAllocation(std::vector<int>(q.begin(), q.end())));
}

double pdp_semi_cumulative_total(std::span<const double> p, std::span<const int> q) {
  std::array<double, kMaxHops> per_hop{};
  per_hop_drop(p, q, std::span<double>(per_hop.data(), p.size()));
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += per_hop[i];
  return std::min(total, 1.0);
}

double pdp_non_cooperative_total(std::span<const double> p, std::span<const int> q) {
  double log_survive = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    log_survive += std::log1p(-ipow(p[i], q[i]));
  }
  return -std::expm1(log_survive);
}

double pdp_non_cooperative(const OutageVector& p, std::span<const int> q) {
  check_dims(p.size(), q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] < 0) throw InfeasibleAllocation("negative ARQ count at hop " + std::to_string(i + 1));
  }
  return pdp_non_cooperative_total(p.values(), q);
}

}  // namespace arqshare
