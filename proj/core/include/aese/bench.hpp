#pragma once

/// \file bench.hpp
/// Experiment driver: declarative specs, replication loops over
/// (sample size, seed), summary tables of KL/L2 scores for the aggregated
/// series estimator and the kernel baseline, and rate-slope diagnostics.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "aese/truncmodel.hpp"

namespace aese {

/// Declarative benchmark configuration, parseable from a flat key = value
/// text file (lists comma-separated, '#' comments).
struct ExperimentSpec {
  std::string model = "beta";            // built-in name, or "custom" with marginals set
  int d = 2;                             // used by built-in "uniform"
  std::vector<MarginalSpec> marginals;   // resolved marginals (filled by resolve())
  std::vector<int> sizes = {200, 500, 1000};
  int replications = 20;
  double ce = 0.8;                       // estimation fraction of the split
  std::vector<int> fixed_degrees = {1, 2, 3, 4};  // candidate degrees m = (v, v)
  int formula_nn = 0;                    // > 0: degree grid from the floor formula with N_n
  uint64_t seed = 20240501;
  int panels = 64, nodes = 10;           // fitting grid
  int score_panels = 64, score_nodes = 10;  // scoring grid (d = 2 triangle)
  bool run_aese = true;
  bool run_kernel = true;
  bool score_candidates = false;         // also score each candidate separately
  int threads = 0;                       // 0 = hardware concurrency

  /// Fills `marginals` from the built-in model name when empty.
  void resolve();

  static ExperimentSpec parse(std::istream& is);
  static ExperimentSpec parse_file(const std::string& path);
};

/// Marginals of the named built-in model: "beta", "gumbel", "normal_mix",
/// "uniform" (d coordinates).
std::vector<MarginalSpec> builtin_model(const std::string& name, int d = 2);

/// One scored estimator on one replication.
struct ReplicationRecord {
  std::string model;
  int n = 0;
  int rep = 0;
  std::string estimator;  // "aese", "kernel", or "aese_m<v>" for candidates
  double kl = 0.0;
  double ise = 0.0;  // integrated squared error
  double fit_ms = 0.0;
  bool converged = true;
  std::vector<double> lambda;  // selected weights (aese rows only)
};

/// Runs the full study: per (n, replication) sample -> split -> candidate
/// fits -> aggregation -> scoring of the aggregate and the kernel baseline
/// against the exact truth. Deterministic given (spec, seed); failed
/// replications are reported on stderr and skipped, never abort the batch.
std::vector<ReplicationRecord> run_experiment(const ExperimentSpec& spec);

struct SummaryRow {
  std::string model;
  int n = 0;
  std::string estimator;
  double kl_mean = 0.0, kl_var = 0.0;
  double ise_mean = 0.0, ise_var = 0.0;
  int count = 0;
};

std::vector<SummaryRow> summarize(const std::vector<ReplicationRecord>& records);

/// Least-squares slope of log(mean KL) against log(n) for one estimator tag;
/// needs at least three distinct sizes.
double rate_diagnostic(const std::vector<ReplicationRecord>& records,
                       const std::string& estimator);

void write_records_csv(const std::vector<ReplicationRecord>& records, std::ostream& os);
void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& os);

/// Text table in the estimator-by-size layout of the study, one line per
/// model row plus a variance line; metric is "kl" or "ise".
std::string format_summary_table(const std::vector<SummaryRow>& rows, const std::string& metric);

/// Re-runs replication 0 at the largest size and tabulates (x, f0, aese,
/// kernel) on a regular plot grid (density values, zero off the simplex).
void write_surface_csv(const ExperimentSpec& spec, std::ostream& os, int grid_points = 101);

}  // namespace aese
