#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stiefel_kn/averaging.hpp"
#include "stiefel_kn/maps.hpp"

namespace stiefel_kn::experiments {

enum class ExperimentKind { DiscrepancyStats, Convergence, RuntimeVsN, RuntimeVsP };

/// "discrepancy", "convergence", "runtime-n", "runtime-p".
std::string kind_name(ExperimentKind kind);
ExperimentKind parse_kind(const std::string& name);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::DiscrepancyStats;
  /// Fixed dimensions. RuntimeVsN sweeps n at this p; RuntimeVsP sweeps p
  /// at this n.
  Eigen::Index p = 20;
  Eigen::Index n = 4;
  /// Swept n or p values (runtime experiments only); strictly increasing.
  std::vector<Eigen::Index> sweep;
  std::size_t sample_count = 1000;
  double sigma = 0.05;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::vector<MapPair> pairs = {MapPair::mixed(), MapPair::ortho_ortho(),
                                MapPair::polar_polar()};
  double epsilon_init = kDefaultInitEpsilon;
  int max_iters = 100;
  double conv_tol = 1e-10;
  /// Worker threads for runtime trials. 1 keeps timings free of contention.
  unsigned threads = 1;

  /// Protocol defaults per experiment. Desk scale shrinks sample counts,
  /// trial counts and sweeps; full_scale restores the full sizes.
  static ExperimentSpec defaults(ExperimentKind kind, bool full_scale = false);

  /// Throws DomainError for an inconsistent spec.
  void validate() const;
  /// One-line key=value rendering, embedded in every CSV header.
  std::string describe() const;
};

struct DiscrepancyRow {
  std::size_t k = 0;
  double delta = 0.0;        // delta(C, X_k)
  double composition = 0.0;  // Delta_C(X_k)
};

struct DiscrepancyStatsResult {
  ExperimentSpec spec;
  std::vector<DiscrepancyRow> rows;
  double median_delta = 0.0;
  double median_composition = 0.0;
  double spearman = 0.0;
};

struct PairOutcome {
  MapPair pair;
  std::optional<AveragingReport> report;
  std::string error;  // set when the run failed
};

struct ConvergenceResult {
  ExperimentSpec spec;
  std::vector<PairOutcome> outcomes;
};

struct TimingRecord {
  MapPair pair = MapPair::mixed();
  Eigen::Index dim = 0;  // swept n or p
  std::size_t trial = 0;
  std::chrono::nanoseconds wall_time{0};
  int iterations = 0;
  bool converged = false;
  bool failed = false;
  std::string error;
};

struct RuntimeSummary {
  MapPair pair;
  Eigen::Index dim = 0;
  double median_seconds = 0.0;
  std::size_t completed = 0;
  std::size_t failed = 0;
};

struct RuntimeResult {
  ExperimentSpec spec;
  std::vector<TimingRecord> records;
  std::vector<RuntimeSummary> summaries;

  /// Median runtime of `pair` at each swept value (NaN when every trial
  /// failed), in sweep order.
  std::vector<double> medians(const MapPair& pair) const;
};

DiscrepancyStatsResult run_discrepancy_stats(const ExperimentSpec& spec);
ConvergenceResult run_convergence(const ExperimentSpec& spec);
RuntimeResult run_runtime_vs_n(const ExperimentSpec& spec);
RuntimeResult run_runtime_vs_p(const ExperimentSpec& spec);

/// <kind>_<seed>.csv
std::string csv_file_name(const ExperimentSpec& spec);

/// CSV writers. Every file starts with '#' metadata lines recording the
/// spec and seed, followed by summary lines, then the column header.
void write_csv(std::ostream& out, const DiscrepancyStatsResult& result);
void write_csv(std::ostream& out, const ConvergenceResult& result);
void write_csv(std::ostream& out, const RuntimeResult& result);

// Statistics helpers.
double median(std::vector<double> values);
/// Spearman rank correlation, ties receiving their average rank.
double spearman(const std::vector<double>& x, const std::vector<double>& y);
/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace stiefel_kn::experiments
