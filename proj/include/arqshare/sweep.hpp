#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "arqshare/config.hpp"

namespace arqshare {

/// A grid point failed; the message names q_sum, snr_db, scheme and method.
class SweepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kCsvHeader =
    "N,q_sum,snr_db,scheme,method,allocation,pdp_analytic,pdp_sim,sim_stderr,list_size,elapsed_ms";

struct SweepRow {
  int hops = 0;
  int q_sum = 0;
  double snr_db = 0.0;
  Scheme scheme = Scheme::semi_cumulative;
  std::string method;
  std::vector<int> allocation;
  double pdp_analytic = 1.0;
  std::optional<double> pdp_sim;
  std::optional<double> sim_stderr;
  std::optional<std::size_t> list_size;
  std::optional<double> elapsed_ms;
};

struct SweepOptions {
  bool timing = false;    // wall time makes rows irreproducible, so it is opt-in
  bool simulate = true;   // run cfg.trials Monte Carlo trials per row
};

/// One row per (q_sum, snr_db, scheme, method), in that nesting order.
/// The non-cooperative scheme is always optimised exhaustively and yields
/// one row per grid point. Grid points run in parallel; rows come back in
/// grid order and simulation seeds are derived from the row index.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, const SweepOptions& opt = {});

/// Rows for the fixed cfg.allocation, one per (snr_db, scheme), method "fixed".
std::vector<SweepRow> evaluate_fixed(const ExperimentConfig& cfg, const SweepOptions& opt = {});

/// "%.17g"
std::string format_double(double v);
std::string format_row(const SweepRow& row);
void write_csv(std::ostream& out, std::span<const SweepRow> rows);

}  // namespace arqshare
