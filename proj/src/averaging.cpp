#include "stiefel_kn/averaging.hpp"

#include <ostream>
#include <sstream>

#include "stiefel_kn/errors.hpp"

namespace stiefel_kn {
namespace {

using Clock = std::chrono::steady_clock;

void check_config(const SampleSet& samples, const AveragingConfig& config,
                  const StiefelPoint& initial) {
  if (samples.samples.empty()) {
    throw DomainError("averaging: the sample set is empty");
  }
  if (!(config.conv_tol > 0.0)) {
    throw DomainError("averaging: conv_tol must be positive");
  }
  if (config.max_iters < 1) {
    throw DomainError("averaging: max_iters must be at least 1");
  }
  if (initial.dims() != samples.dims) {
    throw ShapeError("averaging: initial guess and samples differ in shape");
  }
}

void check_weights(const std::vector<double>& weights, std::size_t count,
                   std::size_t iteration) {
  if (weights.size() != count) {
    std::ostringstream os;
    os << "averaging: expected " << count << " weights, got "
       << weights.size();
    throw AveragingDomainError(os.str(), iteration, std::nullopt);
  }
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (!(weights[k] > 0.0)) {
      std::ostringstream os;
      os << "averaging: weight " << k << " is not positive (" << weights[k]
         << ")";
      throw AveragingDomainError(os.str(), iteration, k);
    }
  }
}

// delta(X, Q) < guard. Since ||X^T Q||_F^2 <= n for orthonormal X and Q,
// delta^2 = n - 2 tr(X^T Q) + ||X^T Q||_F^2 <= 2 n - 2 tr(X^T Q); the O(pn)
// trace settles most checks and the O(pn^2) product is formed otherwise.
bool within_guard(const Matrix& x, const Matrix& q, double guard) {
  const double n = static_cast<double>(x.cols());
  const double bound = 2.0 * n - 2.0 * x.cwiseProduct(q).sum() + 1e-8 * n;
  if (bound < guard * guard) return true;
  return discrepancy(x, q) < guard;
}

// (1/N) sum_k w_k L_X(X_k), accumulated in index order. weights == nullptr
// means w = 1.
//
// The orthographic lifting Q -> Q - X sym(X^T Q) is linear in Q, so its
// weighted mean is the lifting of the weighted sample sum; only the domain
// guard is evaluated per sample.
Matrix mean_lift(const Matrix& x, const SampleSet& samples, MapKind lifting,
                 const std::vector<double>* weights, double guard,
                 std::size_t iteration) {
  Matrix sum = Matrix::Zero(x.rows(), x.cols());
  for (std::size_t k = 0; k < samples.samples.size(); ++k) {
    const Matrix& q = samples.samples[k].matrix();
    const double w = weights ? (*weights)[k] : 1.0;
    try {
      if (lifting == MapKind::Orthographic) {
        if (!within_guard(x, q, guard)) {
          std::ostringstream os;
          os << "orthographic_lifting: points too far apart (discrepancy "
             << discrepancy(x, q) << " >= " << guard << ")";
          throw DomainError(os.str());
        }
        sum += w * q;
      } else {
        sum += w * detail::polar_lifting(x, q, guard);
      }
    } catch (const DomainError& e) {
      std::ostringstream os;
      os << "iteration " << iteration << ", sample " << k << ": " << e.what();
      throw AveragingDomainError(os.str(), iteration, k);
    }
  }
  if (lifting == MapKind::Orthographic) {
    sum = detail::orthographic_projection(x, sum);
  }
  return sum / static_cast<double>(samples.samples.size());
}

AveragingReport run(const SampleSet& samples, const AveragingConfig& config,
                    const StiefelPoint& initial, bool weighted) {
  check_config(samples, config, initial);
  const std::size_t count = samples.samples.size();
  if (weighted && !config.weight_function) {
    if (!config.weights) {
      throw DomainError("weighted_fixed_point_mean: no weights configured");
    }
    check_weights(*config.weights, count, 0);
  }

  const MapKind retraction = config.pair.retraction();
  const MapKind lifting = config.pair.lifting();
  const Dims dims = samples.dims;

  AveragingReport report{{}, {}, {}, initial};
  if (samples.center) {
    report.iterates_delta_to_center.push_back(
        discrepancy(initial, *samples.center));
  }

  Matrix x = initial.matrix();
  std::vector<double> adaptive;
  const std::vector<double>* weights = nullptr;
  const auto start = Clock::now();
  for (int it = 0; it < config.max_iters; ++it) {
    const auto iteration = static_cast<std::size_t>(it);
    if (weighted) {
      if (config.weight_function) {
        adaptive = config.weight_function(
            iteration, StiefelPoint::trusted(x), samples);
        check_weights(adaptive, count, iteration);
        weights = &adaptive;
      } else {
        weights = &*config.weights;
      }
    }

    const Matrix v =
        mean_lift(x, samples, lifting, weights, config.lifting_guard, iteration);
    Matrix next;
    try {
      next = detail::retract(retraction, x, v);
    } catch (const DomainError& e) {
      std::ostringstream os;
      os << "iteration " << iteration << ": " << e.what();
      throw AveragingDomainError(os.str(), iteration, std::nullopt);
    }
    const double defect = orthonormality_defect(next);
    if (!(defect < kTolOrth)) {
      std::ostringstream os;
      os << "iteration " << iteration
         << ": iterate left the manifold (orthonormality defect " << defect
         << ")";
      throw AveragingDomainError(os.str(), iteration, std::nullopt);
    }

    const double step = discrepancy(next, x);
    x = std::move(next);
    report.step_sizes.push_back(step);
    report.cumulative_time.push_back(Clock::now() - start);
    report.iterations_used = it + 1;
    if (samples.center) {
      report.iterates_delta_to_center.push_back(
          discrepancy(x, samples.center->matrix()));
    }
    if (step < config.conv_tol) {
      report.converged = true;
      break;
    }
  }
  report.wall_time = Clock::now() - start;

  report.final_point = StiefelPoint::validate(std::move(x), dims);
  const std::size_t last = static_cast<std::size_t>(report.iterations_used);
  if (weighted && config.weight_function) {
    adaptive = config.weight_function(last, report.final_point, samples);
    check_weights(adaptive, count, last);
  }
  report.residual_field_norm =
      mean_lift(report.final_point.matrix(), samples, lifting, weights,
                config.lifting_guard, last)
          .norm();
  return report;
}

}  // namespace

AveragingReport fixed_point_mean(const SampleSet& samples,
                                 const AveragingConfig& config,
                                 const StiefelPoint& initial) {
  return run(samples, config, initial, false);
}

AveragingReport weighted_fixed_point_mean(const SampleSet& samples,
                                          const AveragingConfig& config,
                                          const StiefelPoint& initial) {
  return run(samples, config, initial, true);
}

double residual_vector_field(const StiefelPoint& x, const SampleSet& samples,
                             const MapPair& pair, double guard) {
  if (samples.samples.empty()) {
    throw DomainError("residual_vector_field: the sample set is empty");
  }
  if (x.dims() != samples.dims) {
    throw ShapeError("residual_vector_field: point and samples differ in shape");
  }
  return mean_lift(x.matrix(), samples, pair.lifting(), nullptr, guard, 0)
      .norm();
}

void write_trace_csv(std::ostream& out, const AveragingReport& report) {
  const auto old_precision = out.precision(17);
  const bool has_center = !report.iterates_delta_to_center.empty();
  out << "iter,step_size,delta_to_center,cumulative_time_ns\n";
  out << "0,,";
  if (has_center) out << report.iterates_delta_to_center[0];
  out << ",0\n";
  for (std::size_t i = 0; i < report.step_sizes.size(); ++i) {
    out << i + 1 << ',' << report.step_sizes[i] << ',';
    if (has_center) out << report.iterates_delta_to_center[i + 1];
    out << ',' << report.cumulative_time[i].count() << '\n';
  }
  out.precision(old_precision);
}

}  // namespace stiefel_kn
