#pragma once

#include <span>
#include <string>
#include <vector>

namespace arqshare {

/// True iff q_1 >= 1, every q_i >= 0 and q_{i+1} != 0 whenever q_i is 0 or 1,
/// for the positions present in `q`. A trailing zero is accepted when its
/// predecessor is at least 2, so this also serves as the prefix check.
bool satisfies_adjacency(std::span<const int> q);

/// Full feasibility: adjacency plus sum(q) == q_sum.
bool is_feasible(std::span<const int> q, int q_sum);

/// ARQ distribution q_1..q_N that satisfies the adjacency rule.
class ArqAllocation {
 public:
  ArqAllocation() = default;
  /// Throws InfeasibleAllocation when `q` is empty or violates the rule.
  explicit ArqAllocation(std::vector<int> q);

  std::size_t size() const { return q_.size(); }
  int operator[](std::size_t i) const { return q_[i]; }
  int q_sum() const { return q_sum_; }
  std::span<const int> values() const { return q_; }
  const std::vector<int>& vector() const { return q_; }

  bool operator==(const ArqAllocation&) const = default;

 private:
  std::vector<int> q_;
  int q_sum_ = 0;
};

/// "q1|q2|...|qN"
std::string format_allocation(std::span<const int> q);

}  // namespace arqshare
