// arqshare: ARQ allocation planning for multi-hop decode-and-forward chains.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "arqshare/config.hpp"
#include "arqshare/error.hpp"
#include "arqshare/parallel.hpp"
#include "arqshare/sweep.hpp"

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::string output;
  bool timing = false;
};

struct Overrides {
  std::vector<int> alloc;
  std::string method;
  std::optional<std::uint64_t> trials;
};

void add_common(CLI::App* cmd, Common& c, bool needs_config = true) {
  auto* opt = cmd->add_option("-c,--config", c.config, "experiment config (JSON)");
  if (needs_config) opt->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "random seed (default: config seed, else 0)");
  cmd->add_option("--threads", c.threads, "worker threads (default: all cores)")->check(CLI::PositiveNumber);
  cmd->add_option("-o,--output", c.output, "write CSV here instead of stdout");
  cmd->add_flag("--timing", c.timing, "fill the elapsed_ms column");
}

arqshare::ExperimentConfig load(const Common& c, const Overrides& o) {
  auto cfg = arqshare::load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (!o.alloc.empty()) cfg.allocation = o.alloc;
  if (!o.method.empty()) cfg.methods = {arqshare::parse_method(o.method)};
  if (o.trials) cfg.trials = *o.trials;
  arqshare::validate(cfg);
  return cfg;
}

void emit(const Common& c, const std::vector<arqshare::SweepRow>& rows) {
  if (c.output.empty()) {
    arqshare::write_csv(std::cout, rows);
    return;
  }
  std::ofstream out(c.output, std::ios::binary);
  if (!out) throw arqshare::ConfigError("cannot write '" + c.output + "'");
  arqshare::write_csv(out, rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ARQ budget planning for multi-hop relay chains"};
  app.require_subcommand(1);
  Common common;
  Overrides over;

  auto* pdp = app.add_subcommand("pdp", "analytic PDP of a fixed allocation");
  add_common(pdp, common);
  pdp->add_option("--alloc", over.alloc, "allocation q1,q2,...")->delimiter(',');

  auto* sim = app.add_subcommand("simulate", "Monte Carlo PDP of a fixed allocation");
  add_common(sim, common);
  sim->add_option("--alloc", over.alloc, "allocation q1,q2,...")->delimiter(',');
  sim->add_option("--trials", over.trials, "trials per row");

  auto* opt = app.add_subcommand("optimize", "best allocation per grid point");
  add_common(opt, common);
  opt->add_option("--method", over.method, "exhaustive|onefold|multifold|greedy")
      ->check(CLI::IsMember({"exhaustive", "onefold", "multifold", "greedy"}));

  auto* sweep = app.add_subcommand("sweep", "optimise and simulate the whole grid");
  add_common(sweep, common);
  sweep->add_option("--method", over.method, "restrict to one method")
      ->check(CLI::IsMember({"exhaustive", "onefold", "multifold", "greedy"}));
  sweep->add_option("--trials", over.trials, "trials per row");

  arqshare::LatencyBudget lb;
  auto* bud = app.add_subcommand("budget", "ARQ budget from a latency deadline (seconds)");
  add_common(bud, common, false);
  bud->add_option("--tau-total", lb.tau_total, "end-to-end deadline");
  bud->add_option("--tau-p", lb.tau_p, "per-hop processing time");
  bud->add_option("--tau-d", lb.tau_d, "per-link retransmission delay");

  auto* val = app.add_subcommand("validate", "check a config and print it normalised");
  add_common(val, common);

  CLI11_PARSE(app, argc, argv);
  if (common.threads > 0) arqshare::parallel::set_threads(common.threads);

  try {
    if (*val) {
      std::cout << arqshare::describe(load(common, over)) << '\n';
      return 0;
    }
    if (*bud) {
      if (!common.config.empty()) {
        const auto cfg = arqshare::load_config(common.config);
        if (!cfg.latency) throw arqshare::ConfigError("tau_total: config has no latency triple");
        lb = *cfg.latency;
      }
      std::cout << arqshare::budget(lb) << '\n';
      return 0;
    }
    arqshare::SweepOptions so;
    so.timing = common.timing;
    const auto cfg = load(common, over);
    if (*pdp) {
      so.simulate = false;
      emit(common, arqshare::evaluate_fixed(cfg, so));
    } else if (*sim) {
      if (cfg.trials == 0) throw arqshare::ConfigError("trials: simulate needs trials > 0");
      emit(common, arqshare::evaluate_fixed(cfg, so));
    } else if (*opt) {
      so.simulate = false;
      emit(common, arqshare::run_sweep(cfg, so));
    } else {
      emit(common, arqshare::run_sweep(cfg, so));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
