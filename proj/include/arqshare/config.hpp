#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arqshare/channel.hpp"
#include "arqshare/optimizer.hpp"
#include "arqshare/simulator.hpp"

namespace arqshare {

/// End-to-end deadline split into per-hop processing and per-link
/// retransmission delay, all in seconds.
struct LatencyBudget {
  double tau_total = 0.0;
  double tau_p = 0.0;
  double tau_d = 0.0;
};

/// floor(tau_total / (tau_p + tau_d)). Throws DomainError on non-positive
/// times or when the deadline cannot fit a single transmission.
int budget(const LatencyBudget& lb);

struct ExperimentConfig {
  int hops = 0;
  std::vector<double> los;            // one per hop
  std::vector<double> snr_db;         // sweep grid, at least one value
  std::vector<double> snr_offset_db;  // optional per-hop offset added to snr_db
  double rate = 1.0;
  std::vector<int> q_sum;             // sweep grid; filled from `latency` if given
  std::optional<LatencyBudget> latency;
  std::vector<Scheme> schemes{Scheme::semi_cumulative};
  std::vector<Method> methods{Method::exhaustive};
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  ChannelMode channel_mode = ChannelMode::bernoulli;
  std::vector<int> allocation;  // fixed allocation for `pdp` / `simulate`
};

/// Parses a JSON document. All problems found are reported together in one
/// ConfigError, one per line, each naming its field.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& path);

/// Invariant violations of an already-built config, empty when valid.
std::vector<std::string> validation_errors(const ExperimentConfig& cfg);
void validate(const ExperimentConfig& cfg);

/// Links of the network at one grid SNR.
std::vector<LinkParams> links_at(const ExperimentConfig& cfg, double snr_db);

/// Normalised config as JSON, with derived q_sum and the outage vector at
/// every grid SNR.
std::string describe(const ExperimentConfig& cfg, int indent = 2);

}  // namespace arqshare
