#include "arqshare/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "arqshare/error.hpp"
#include "arqshare/pdp.hpp"

namespace arqshare {
namespace {

struct Tally {
  std::uint64_t drops = 0;
  std::vector<std::uint64_t> histogram;
  std::vector<std::uint64_t> hop_attempts;
  std::vector<std::uint64_t> hop_failures;
  int max_attempts = 0;

  Tally(std::size_t hops, int q_sum)
      : histogram(static_cast<std::size_t>(q_sum) + 1, 0), hop_attempts(hops, 0), hop_failures(hops, 0) {}

  void add(const TrialOutcome& o, std::span<const int> used) {
    drops += o.dropped ? 1 : 0;
    if (static_cast<std::size_t>(o.total_attempts) >= histogram.size()) {
      histogram.resize(o.total_attempts + 1, 0);
    }
    ++histogram[o.total_attempts];
    max_attempts = std::max(max_attempts, o.total_attempts);
    const std::size_t last = o.dropped ? static_cast<std::size_t>(o.drop_hop) : used.size() - 1;
    for (std::size_t i = 0; i <= last; ++i) {
      hop_attempts[i] += used[i];
      // every attempt failed at the drop hop; elsewhere only the last one succeeded
      hop_failures[i] += (o.dropped && i == last) ? used[i] : used[i] - 1;
    }
  }

  void merge(const Tally& other) {
    drops += other.drops;
    if (other.histogram.size() > histogram.size()) histogram.resize(other.histogram.size(), 0);
    for (std::size_t i = 0; i < other.histogram.size(); ++i) histogram[i] += other.histogram[i];
    for (std::size_t i = 0; i < hop_attempts.size(); ++i) {
      hop_attempts[i] += other.hop_attempts[i];
      hop_failures[i] += other.hop_failures[i];
    }
    max_attempts = std::max(max_attempts, other.max_attempts);
  }
};

struct PreparedSim {
  HopChannels channels;
  std::vector<int> q;
  int q_sum;
};

PreparedSim prepare(const SimConfig& cfg) {
  if (cfg.trials < 1) throw ConfigError("simulation needs at least one trial");
  if (cfg.q.size() == 0) throw ConfigError("simulation needs an ARQ allocation");
  if (cfg.q.size() > static_cast<std::size_t>(kMaxHops)) {
    throw DomainError("at most " + std::to_string(kMaxHops) + " hops are supported");
  }
  if (cfg.mode == ChannelMode::fading) {
    if (cfg.links.size() != cfg.q.size()) {
      throw DimensionMismatch("fading mode needs one LinkParams per hop");
    }
    return {HopChannels::fading(cfg.links), cfg.q.vector(), cfg.q.q_sum()};
  }
  OutageVector p = cfg.outage.size() ? cfg.outage : outage_vector(cfg.links);
  if (p.size() != cfg.q.size()) {
    throw DimensionMismatch("outage vector has " + std::to_string(p.size()) +
                            " hops but the allocation has " + std::to_string(cfg.q.size()));
  }
  return {HopChannels::bernoulli(p), cfg.q.vector(), cfg.q.q_sum()};
}

SimResult finish(const Tally& t, std::uint64_t trials) {
  SimResult r;
  r.drops = t.drops;
  r.trials = trials;
  r.pdp_hat = static_cast<double>(t.drops) / static_cast<double>(trials);
  r.std_err = std::sqrt(r.pdp_hat * (1.0 - r.pdp_hat) / static_cast<double>(trials));
  r.attempts_histogram = t.histogram;
  r.max_attempts_observed = t.max_attempts;
  r.hop_attempts = t.hop_attempts;
  r.hop_failures = t.hop_failures;
  return r;
}

}  // namespace

std::string_view to_string(Scheme s) {
  return s == Scheme::semi_cumulative ? "semi_cumulative" : "non_cooperative";
}

std::string_view to_string(ChannelMode m) {
  return m == ChannelMode::bernoulli ? "bernoulli" : "fading";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "semi_cumulative") return Scheme::semi_cumulative;
  if (name == "non_cooperative") return Scheme::non_cooperative;
  throw ConfigError("unknown scheme '" + std::string(name) + "'");
}

ChannelMode parse_channel_mode(std::string_view name) {
  if (name == "bernoulli") return ChannelMode::bernoulli;
  if (name == "fading") return ChannelMode::fading;
  throw ConfigError("unknown channel mode '" + std::string(name) + "'");
}

HopChannels HopChannels::bernoulli(const OutageVector& p) {
  HopChannels c;
  c.mode_ = ChannelMode::bernoulli;
  c.outage_.assign(p.begin(), p.end());
  return c;
}

HopChannels HopChannels::fading(std::span<const LinkParams> links) {
  HopChannels c;
  c.mode_ = ChannelMode::fading;
  const OutageVector p = outage_vector(links);
  c.outage_.assign(p.begin(), p.end());
  for (const auto& link : links) {
    c.los_amplitude_.push_back(std::sqrt(link.los / 2.0));
    c.scatter_.push_back(std::sqrt((1.0 - link.los) / 2.0));
    c.threshold_.push_back(outage_threshold(link));
  }
  return c;
}

TrialOutcome simulate_trial(const HopChannels& channels, std::span<const int> q, Scheme scheme,
                            TrialRng& rng, std::span<int> used) {
  TrialOutcome out;
  int residual = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const int budget = q[i] + (scheme == Scheme::semi_cumulative ? residual : 0);
    int attempts = 0;
    bool delivered = false;
    while (attempts < budget) {
      ++attempts;
      if (!channels.attempt_fails(i, rng)) {
        delivered = true;
        break;
      }
    }
    out.total_attempts += attempts;
    if (!used.empty()) used[i] = attempts;
    if (!delivered) {
      out.dropped = true;
      out.drop_hop = static_cast<int>(i);
      return out;
    }
    residual = std::max(0, q[i] - attempts);
  }
  return out;
}

SimResult estimate_pdp_serial(const SimConfig& cfg) {
  const PreparedSim sim = prepare(cfg);
  Tally tally(sim.q.size(), sim.q_sum);
  std::array<int, kMaxHops> used{};
  const std::span<int> used_view(used.data(), sim.q.size());
  for (std::uint64_t t = 0; t < cfg.trials; ++t) {
    TrialRng rng(cfg.seed, t);
    tally.add(simulate_trial(sim.channels, sim.q, cfg.scheme, rng, used_view), used_view);
  }
  return finish(tally, cfg.trials);
}

SimResult estimate_pdp(const SimConfig& cfg) {
  const PreparedSim sim = prepare(cfg);
  Tally total(sim.q.size(), sim.q_sum);
  const auto trials = static_cast<std::int64_t>(cfg.trials);

#pragma omp parallel
  {
    Tally local(sim.q.size(), sim.q_sum);
    std::array<int, kMaxHops> used{};
    const std::span<int> used_view(used.data(), sim.q.size());
#pragma omp for schedule(static)
    for (std::int64_t t = 0; t < trials; ++t) {
      TrialRng rng(cfg.seed, static_cast<std::uint64_t>(t));
      local.add(simulate_trial(sim.channels, sim.q, cfg.scheme, rng, used_view), used_view);
    }
#pragma omp critical(arqshare_sim_merge)
    total.merge(local);
  }
  return finish(total, cfg.trials);
}

}  // namespace arqshare
