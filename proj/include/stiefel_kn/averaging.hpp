#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "stiefel_kn/maps.hpp"
#include "stiefel_kn/stiefel.hpp"

namespace stiefel_kn {

/// Per-iteration weights: called once per iteration with the iteration
/// index and the current iterate; must return one positive weight per
/// sample.
using WeightFunction = std::function<std::vector<double>(
    std::size_t iteration, const StiefelPoint& iterate, const SampleSet&)>;

struct AveragingConfig {
  MapPair pair = MapPair::mixed();
  int max_iters = 100;
  /// Stop once delta(X^(i+1), X^(i)) < conv_tol.
  double conv_tol = 1e-10;
  /// Rotation size used by callers that build the initial guess with
  /// perturb_initial_guess.
  double epsilon_init = kDefaultInitEpsilon;
  /// Fixed weights for weighted_fixed_point_mean, used as given inside
  /// (1/N) sum_k w_k lift(X, X_k); no renormalization.
  std::optional<std::vector<double>> weights;
  /// Adaptive weights; takes precedence over `weights` when set.
  WeightFunction weight_function;
  /// A lifting at discrepancy >= lifting_guard aborts the run.
  double lifting_guard = kDefaultLiftingGuard;
};

struct AveragingReport {
  /// delta(X^(i), C) for i = 0..iterations_used; empty when C is unknown.
  std::vector<double> iterates_delta_to_center;
  /// step_sizes[i] = delta(X^(i+1), X^(i)).
  std::vector<double> step_sizes;
  /// Elapsed time at the end of each iteration.
  std::vector<std::chrono::nanoseconds> cumulative_time;
  StiefelPoint final_point;
  int iterations_used = 0;
  bool converged = false;
  /// Time spent in the iteration loop.
  std::chrono::nanoseconds wall_time{0};
  /// ||sum_k w_k lift(X*, X_k)||_F / N at the returned point (w_k = 1 for
  /// unweighted runs).
  double residual_field_norm = 0.0;
};

/// Fixed-point iteration X^(i+1) = R_{X^(i)}((1/N) sum_k L_{X^(i)}(X_k)),
/// with R, L the retraction and lifting of config.pair.
///
/// Samples are accumulated in index order. Every iterate is checked
/// against the Stiefel invariant. A lifting or retraction that leaves its
/// domain raises AveragingDomainError carrying the iteration (and sample)
/// index; running out of iterations returns converged = false.
AveragingReport fixed_point_mean(const SampleSet& samples,
                                 const AveragingConfig& config,
                                 const StiefelPoint& initial);

/// As fixed_point_mean, with the lifted samples weighted by
/// config.weight_function (or config.weights). All weights must be
/// positive. With unit weights the trajectory is identical to the
/// unweighted run.
AveragingReport weighted_fixed_point_mean(const SampleSet& samples,
                                          const AveragingConfig& config,
                                          const StiefelPoint& initial);

/// ||sum_k L_X(X_k)||_F / N with the pair's lifting; vanishes at a mean.
double residual_vector_field(const StiefelPoint& x, const SampleSet& samples,
                             const MapPair& pair,
                             double guard = kDefaultLiftingGuard);

/// CSV trace with columns iter,step_size,delta_to_center,cumulative_time_ns.
/// Row 0 describes the initial guess (empty step_size). delta_to_center is
/// empty when the center is unknown.
void write_trace_csv(std::ostream& out, const AveragingReport& report);

}  // namespace stiefel_kn
