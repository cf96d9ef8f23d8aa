#include "arqshare/sweep.hpp"

#include <chrono>
#include <cstdio>
#include <exception>
#include <numeric>

#include "arqshare/error.hpp"
#include "arqshare/pdp.hpp"

namespace arqshare {
namespace {

struct Task {
  int q_sum;
  double snr_db;
  Scheme scheme;
  std::optional<Method> method;  // empty: fixed allocation
};

std::string describe_task(const Task& t) {
  return "grid point q_sum=" + std::to_string(t.q_sum) + ", snr_db=" + format_double(t.snr_db) +
         ", scheme=" + std::string(to_string(t.scheme)) +
         ", method=" + (t.method ? std::string(to_string(*t.method)) : std::string("fixed"));
}

double analytic(Scheme scheme, const OutageVector& p, std::span<const int> q) {
  return scheme == Scheme::semi_cumulative ? pdp_semi_cumulative(p, q).total
                                           : pdp_non_cooperative(p, q);
}

SweepRow run_task(const ExperimentConfig& cfg, const SweepOptions& opt, const Task& t,
                  std::size_t index) {
  const auto start = std::chrono::steady_clock::now();
  const auto links = links_at(cfg, t.snr_db);
  const OutageVector p = outage_vector(links);

  SweepRow row;
  row.hops = cfg.hops;
  row.q_sum = t.q_sum;
  row.snr_db = t.snr_db;
  row.scheme = t.scheme;
  if (t.method) {
    const FoldContext ctx{p, t.q_sum};
    const SearchResult r = t.scheme == Scheme::semi_cumulative
                               ? optimize(ctx, *t.method)
                               : exhaustive_search_non_cooperative(ctx);
    if (!r.found) throw InfeasibleAllocation("no feasible allocation");
    row.method = std::string(to_string(*t.method));
    row.allocation = r.allocation;
    row.list_size = r.list_size;
  } else {
    row.method = "fixed";
    row.allocation = cfg.allocation;
  }
  row.pdp_analytic = analytic(t.scheme, p, row.allocation);

  if (opt.simulate && cfg.trials > 0) {
    SimConfig sim{p, links, ArqAllocation(row.allocation), t.scheme, cfg.trials,
                  derive_seed(cfg.seed, index), cfg.channel_mode};
    const SimResult s = estimate_pdp(sim);
    row.pdp_sim = s.pdp_hat;
    row.sim_stderr = s.std_err;
  }
  if (opt.timing) {
    row.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return row;
}

std::vector<SweepRow> run_tasks(const ExperimentConfig& cfg, const SweepOptions& opt,
                                const std::vector<Task>& tasks) {
  std::vector<SweepRow> rows(tasks.size());
  std::vector<std::exception_ptr> failures(tasks.size());
  const auto n = static_cast<std::int64_t>(tasks.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      rows[i] = run_task(cfg, opt, tasks[i], static_cast<std::size_t>(i));
    } catch (...) {
      failures[i] = std::current_exception();
    }
  }
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (!failures[i]) continue;
    try {
      std::rethrow_exception(failures[i]);
    } catch (const std::exception& e) {
      throw SweepError(describe_task(tasks[i]) + ": " + e.what());
    }
  }
  return rows;
}

}  // namespace

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, const SweepOptions& opt) {
  validate(cfg);
  std::vector<Task> tasks;
  for (int q : cfg.q_sum) {
    for (double s : cfg.snr_db) {
      for (Scheme scheme : cfg.schemes) {
        if (scheme == Scheme::non_cooperative) {
          tasks.push_back({q, s, scheme, Method::exhaustive});
          continue;
        }
        for (Method m : cfg.methods) tasks.push_back({q, s, scheme, m});
      }
    }
  }
  return run_tasks(cfg, opt, tasks);
}

std::vector<SweepRow> evaluate_fixed(const ExperimentConfig& cfg, const SweepOptions& opt) {
  validate(cfg);
  if (cfg.allocation.empty()) throw ConfigError("allocation: required for a fixed evaluation");
  const int q_sum = std::accumulate(cfg.allocation.begin(), cfg.allocation.end(), 0);
  std::vector<Task> tasks;
  for (double s : cfg.snr_db) {
    for (Scheme scheme : cfg.schemes) tasks.push_back({q_sum, s, scheme, std::nullopt});
  }
  return run_tasks(cfg, opt, tasks);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_row(const SweepRow& row) {
  std::string s = std::to_string(row.hops) + ',' + std::to_string(row.q_sum) + ',' +
                  format_double(row.snr_db) + ',' + std::string(to_string(row.scheme)) + ',' +
                  row.method + ',' + format_allocation(row.allocation) + ',' +
                  format_double(row.pdp_analytic) + ',';
  if (row.pdp_sim) s += format_double(*row.pdp_sim);
  s += ',';
  if (row.sim_stderr) s += format_double(*row.sim_stderr);
  s += ',';
  if (row.list_size) s += std::to_string(*row.list_size);
  s += ',';
  if (row.elapsed_ms) s += format_double(*row.elapsed_ms);
  return s;
}

void write_csv(std::ostream& out, std::span<const SweepRow> rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) out << format_row(r) << '\n';
}

}  // namespace arqshare
