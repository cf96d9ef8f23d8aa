// Test-only reference implementations. None of these share code with the
// library beyond its public types.
#pragma once

#include <cstdint>
#include <vector>

namespace oracle {

// Q_1(a, b) by adaptive Gauss-Kronrod quadrature of its defining integral.
double marcum_q1(double a, double b);

// CDF of |h|^2 through Boost's non-central chi-squared distribution.
double rician_power_cdf(double los, double x);

double outage(double los, double snr, double rate);

// Drop probability by forward dynamic programming over (node, residual).
double pdp_semi_cumulative(const std::vector<double>& p, const std::vector<int>& q);
// Same, split by the hop at which the packet is lost.
std::vector<double> pdp_per_hop(const std::vector<double>& p, const std::vector<int>& q);
double pdp_non_cooperative(const std::vector<double>& p, const std::vector<int>& q);

bool feasible(const std::vector<int>& q);

// Every composition of q_sum into n non-negative parts, nested loops.
std::vector<std::vector<int>> compositions(int n, int q_sum);

struct Optimum {
  double pdp = 2.0;
  std::vector<std::vector<int>> argmins;  // all allocations within tol of the minimum
};
Optimum brute_force(const std::vector<double>& p, int q_sum, double rel_tol = 1e-12);

// Binary strings of length n without two adjacent ones, by bit masks.
std::uint64_t count_no_adjacent_ones(int n);

struct Ratios {
  double r1;
  double r2;
};
// R1 and R2 recovered from two DP-exact PDP differences along the transfer path.
Ratios fold_ratios(const std::vector<double>& p, const std::vector<int>& prefix);

}  // namespace oracle
