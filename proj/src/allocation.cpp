#include "arqshare/allocation.hpp"

#include <numeric>

#include "arqshare/error.hpp"

namespace arqshare {

bool satisfies_adjacency(std::span<const int> q) {
  if (q.empty() || q[0] < 1) return false;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] < 0) return false;
    if (i + 1 < q.size() && q[i] <= 1 && q[i + 1] == 0) return false;
  }
  return true;
}

bool is_feasible(std::span<const int> q, int q_sum) {
  return satisfies_adjacency(q) && std::accumulate(q.begin(), q.end(), 0) == q_sum;
}

ArqAllocation::ArqAllocation(std::vector<int> q) : q_(std::move(q)) {
  if (!satisfies_adjacency(q_)) {
    throw InfeasibleAllocation("infeasible ARQ allocation [" + format_allocation(q_) + "]");
  }
  q_sum_ = std::accumulate(q_.begin(), q_.end(), 0);
}

std::string format_allocation(std::span<const int> q) {
  std::string out;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (i) out += '|';
    out += std::to_string(q[i]);
  }
  return out;
}

}  // namespace arqshare
