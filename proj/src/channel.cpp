#include "arqshare/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "arqshare/error.hpp"

namespace arqshare {
namespace {

constexpr double kPoissonTailMass = 1e-14;

// log(e^{-y} y^n / n!)
double log_poisson_term(int n, double y) {
  return -y + n * std::log(y) - std::lgamma(n + 1.0);
}

// Lower regularized gamma P(n, y) for integer n >= 1 via its power series.
// Only called with y < n + 1 where the series converges fast.
double gamma_p_series(int n, double y) {
  const double prefix = std::exp(log_poisson_term(n, y));
  if (prefix == 0.0) return 0.0;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 10000; ++k) {
    term *= y / (n + k);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return prefix * sum;
}

// Upper regularized gamma Q(n, y) = e^{-y} sum_{m<n} y^m / m!.
double gamma_q_sum(int n, double y) {
  double sum = 0.0;
  for (int m = 0; m < n; ++m) sum += std::exp(log_poisson_term(m, y));
  return std::min(sum, 1.0);
}

double gamma_p_int(int n, double y) {
  if (y <= 0.0) return 0.0;
  if (y < n + 1.0) return gamma_p_series(n, y);
  return std::max(0.0, 1.0 - gamma_q_sum(n, y));
}

void check_marcum_args(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b) || a < 0.0 || b < 0.0) {
    throw DomainError("marcum_q1: arguments must be finite and non-negative (a=" +
                      std::to_string(a) + ", b=" + std::to_string(b) + ")");
  }
}

// Upper bound on sum_{m > k} Pois(m; mu) given w_{k+1}, valid when k + 2 > mu.
double poisson_tail_bound(double w_next, int k, double mu) {
  return w_next * (k + 2.0) / (k + 2.0 - mu);
}

int max_poisson_terms(double mu) {
  return static_cast<int>(mu + 60.0 * std::sqrt(mu + 1.0) + 200.0);
}

}  // namespace

OutageVector::OutageVector(std::vector<double> p) : p_(std::move(p)) {
  if (p_.empty()) throw DomainError("outage vector must contain at least one hop");
  for (std::size_t i = 0; i < p_.size(); ++i) {
    if (!(p_[i] > 0.0 && p_[i] < 1.0)) {
      throw DomainError("outage probability of hop " + std::to_string(i + 1) +
                        " must lie strictly inside (0, 1), got " + std::to_string(p_[i]));
    }
  }
}

double marcum_q1(double a, double b) {
  check_marcum_args(a, b);
  const double y = 0.5 * b * b;
  if (y == 0.0) return 1.0;
  const double mu = 0.5 * a * a;
  if (mu == 0.0) return std::exp(-y);

  const double log_mu = std::log(mu);
  const int limit = max_poisson_terms(mu);
  double q = std::exp(-y);  // Q(1, y)
  double sum = 0.0;
  for (int k = 0; k < limit; ++k) {
    const double w = std::exp(-mu + k * log_mu - std::lgamma(k + 1.0));
    sum += w * q;
    if (k + 2.0 > mu) {
      const double w_next = w * mu / (k + 1.0);
      if (poisson_tail_bound(w_next, k, mu) < kPoissonTailMass) break;
    }
    q = std::min(1.0, q + std::exp(log_poisson_term(k + 1, y)));  // Q(k + 2, y)
  }
  return std::clamp(sum, 0.0, 1.0);
}

double marcum_p1(double a, double b) {
  check_marcum_args(a, b);
  const double y = 0.5 * b * b;
  if (y == 0.0) return 0.0;
  const double mu = 0.5 * a * a;
  if (mu == 0.0) return -std::expm1(-y);

  const double log_mu = std::log(mu);
  const int limit = max_poisson_terms(mu);
  double sum = 0.0;
  for (int k = 0; k < limit; ++k) {
    const double w = std::exp(-mu + k * log_mu - std::lgamma(k + 1.0));
    const double p = gamma_p_int(k + 1, y);
    sum += w * p;
    if (k + 2.0 > mu) {
      // P(k + 1, y) is non-increasing in k, so the tail is bounded by tail * p.
      const double w_next = w * mu / (k + 1.0);
      const double tail = poisson_tail_bound(w_next, k, mu);
      if (tail * p <= 1e-17 * sum || tail < std::numeric_limits<double>::min()) break;
    }
  }
  return std::clamp(sum, 0.0, 1.0);
}

void validate_link(const LinkParams& link) {
  if (!std::isfinite(link.los) || link.los < 0.0 || link.los >= 1.0) {
    throw DomainError("los must lie in [0, 1), got " + std::to_string(link.los));
  }
  if (!std::isfinite(link.snr) || link.snr <= 0.0) {
    throw DomainError("snr must be positive, got " + std::to_string(link.snr));
  }
  if (!std::isfinite(link.rate) || link.rate <= 0.0) {
    throw DomainError("rate must be positive, got " + std::to_string(link.rate));
  }
}

double rician_power_cdf(double los, double x) {
  if (!std::isfinite(los) || los < 0.0 || los >= 1.0) {
    throw DomainError("los must lie in [0, 1), got " + std::to_string(los));
  }
  if (x <= 0.0) return 0.0;
  const double spread = 1.0 - los;
  if (los == 0.0) return -std::expm1(-x);
  return marcum_p1(std::sqrt(2.0 * los / spread), std::sqrt(2.0 * x / spread));
}

double outage_threshold(const LinkParams& link) {
  return std::expm1(link.rate * std::log(2.0)) / link.snr;
}

double outage_probability(const LinkParams& link) {
  validate_link(link);
  const double p = rician_power_cdf(link.los, outage_threshold(link));
  return std::clamp(p, kMinOutage, kMaxOutage);
}

OutageVector outage_vector(std::span<const LinkParams> links) {
  if (links.empty()) throw DomainError("outage_vector: no links given");
  std::vector<double> p;
  p.reserve(links.size());
  for (std::size_t i = 0; i < links.size(); ++i) {
    try {
      p.push_back(outage_probability(links[i]));
    } catch (const DomainError& e) {
      throw DomainError("hop " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return OutageVector(std::move(p));
}

}  // namespace arqshare
