#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "arqshare/allocation.hpp"
#include "arqshare/channel.hpp"
#include "arqshare/rng.hpp"

namespace arqshare {

enum class Scheme { semi_cumulative, non_cooperative };
enum class ChannelMode { bernoulli, fading };

std::string_view to_string(Scheme s);
std::string_view to_string(ChannelMode m);
Scheme parse_scheme(std::string_view name);
ChannelMode parse_channel_mode(std::string_view name);

/// Per-attempt failure model of every hop.
///
/// Bernoulli mode fails an attempt with probability P_i. Fading mode draws a
/// fresh Rician coefficient per attempt and fails when the instantaneous
/// capacity is below the rate, which happens with probability P_i as well.
class HopChannels {
 public:
  static HopChannels bernoulli(const OutageVector& p);
  static HopChannels fading(std::span<const LinkParams> links);

  ChannelMode mode() const { return mode_; }
  std::size_t size() const { return outage_.size(); }
  double outage(std::size_t hop) const { return outage_[hop]; }

  bool attempt_fails(std::size_t hop, TrialRng& rng) const {
    if (mode_ == ChannelMode::bernoulli) return rng.uniform() < outage_[hop];
    double x, y;
    rng.normal_pair(x, y);
    const double re = los_amplitude_[hop] + scatter_[hop] * x;
    const double im = los_amplitude_[hop] + scatter_[hop] * y;
    // R > log2(1 + |h|^2 snr)  <=>  |h|^2 < (2^R - 1) / snr
    return re * re + im * im < threshold_[hop];
  }

 private:
  ChannelMode mode_ = ChannelMode::bernoulli;
  std::vector<double> outage_;
  std::vector<double> los_amplitude_;
  std::vector<double> scatter_;
  std::vector<double> threshold_;
};

struct TrialOutcome {
  bool dropped = false;
  int total_attempts = 0;
  int drop_hop = -1;  // 0-based, -1 when delivered
};

/// One packet through the chain. Under the semi-cumulative scheme node i may
/// spend q_i plus the residual of node i - 1, where the residual of a node is
/// max(0, q_i - used_i). `used`, when non-empty, receives per-node attempts.
TrialOutcome simulate_trial(const HopChannels& channels, std::span<const int> q, Scheme scheme,
                            TrialRng& rng, std::span<int> used = {});

struct SimConfig {
  OutageVector outage;            // derived from `links` when left empty
  std::vector<LinkParams> links;  // required in fading mode
  ArqAllocation q;
  Scheme scheme = Scheme::semi_cumulative;
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  ChannelMode mode = ChannelMode::bernoulli;
};

struct SimResult {
  std::uint64_t drops = 0;
  std::uint64_t trials = 0;
  double pdp_hat = 0.0;
  double std_err = 0.0;
  std::vector<std::uint64_t> attempts_histogram;  // index = total attempts n
  int max_attempts_observed = 0;
  std::vector<std::uint64_t> hop_attempts;
  std::vector<std::uint64_t> hop_failures;

  bool operator==(const SimResult&) const = default;
};

/// Monte Carlo estimate, parallel over trials. Bit-identical to
/// estimate_pdp_serial for the same config whatever the thread count.
SimResult estimate_pdp(const SimConfig& cfg);
SimResult estimate_pdp_serial(const SimConfig& cfg);

}  // namespace arqshare
