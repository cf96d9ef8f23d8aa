#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace arqshare {

/// Physical description of one hop under quasi-static Rician fading.
///
/// `los` is the LOS mixing weight c in [0, 1) (c = 0 is Rayleigh), `snr` is
/// the linear average SNR and `rate` the code rate in bits per channel use.
/// The fading coefficient is h = sqrt(c/2)(1 + j) + sqrt((1 - c)/2) g with
/// unit-variance real and imaginary parts in g, so E|h|^2 = 1.
struct LinkParams {
  double los = 0.0;
  double snr = 1.0;
  double rate = 1.0;
};

// Outage probabilities are kept strictly inside (0, 1) so that logs and
// ratios taken by the fold arithmetic stay finite.
inline constexpr double kMinOutage = 1e-300;
inline constexpr double kMaxOutage = 1.0 - 1e-15;

/// Per-hop outage probabilities P_1..P_N, every entry in (0, 1).
class OutageVector {
 public:
  OutageVector() = default;
  explicit OutageVector(std::vector<double> p);

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  std::span<const double> values() const { return p_; }
  auto begin() const { return p_.begin(); }
  auto end() const { return p_.end(); }

  bool operator==(const OutageVector&) const = default;

 private:
  std::vector<double> p_;
};

/// First-order Marcum Q function Q_1(a, b), absolute error below 1e-12.
///
/// Evaluated as the Poisson mixture sum_k Pois(k; a^2/2) Q(k + 1, b^2/2) with
/// Q the upper regularized gamma function, truncated once the remaining
/// Poisson mass drops below 1e-14. Throws DomainError on negative or
/// non-finite arguments.
double marcum_q1(double a, double b);

/// 1 - Q_1(a, b) summed directly, which keeps relative accuracy when Q_1 is
/// close to one.
double marcum_p1(double a, double b);

/// CDF of |h|^2 at x for LOS weight c.
double rician_power_cdf(double los, double x);

/// Outage threshold on |h|^2: (2^R - 1) / snr.
double outage_threshold(const LinkParams& link);

/// P = Prob(R > log2(1 + |h|^2 snr)), clamped to [kMinOutage, kMaxOutage].
double outage_probability(const LinkParams& link);

/// Element-wise outage_probability; errors name the offending hop.
OutageVector outage_vector(std::span<const LinkParams> links);

/// Throws DomainError unless the link satisfies its invariants.
void validate_link(const LinkParams& link);

inline double db_to_linear(double db) {
  return std::pow(10.0, db / 10.0);
}

}  // namespace arqshare
