#include "stiefel_kn/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "stiefel_kn/errors.hpp"

namespace stiefel_kn::experiments {

std::string kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::DiscrepancyStats: return "discrepancy";
    case ExperimentKind::Convergence: return "convergence";
    case ExperimentKind::RuntimeVsN: return "runtime-n";
    case ExperimentKind::RuntimeVsP: return "runtime-p";
  }
  return "unknown";
}

ExperimentKind parse_kind(const std::string& name) {
  for (auto kind : {ExperimentKind::DiscrepancyStats, ExperimentKind::Convergence,
                    ExperimentKind::RuntimeVsN, ExperimentKind::RuntimeVsP}) {
    if (kind_name(kind) == name) return kind;
  }
  throw Error("unknown experiment kind '" + name +
              "' (expected discrepancy, convergence, runtime-n or runtime-p)");
}

ExperimentSpec ExperimentSpec::defaults(ExperimentKind kind, bool full_scale) {
  ExperimentSpec spec;
  spec.kind = kind;
  switch (kind) {
    case ExperimentKind::DiscrepancyStats:
      spec.p = 20;
      spec.n = 4;
      spec.sigma = 0.05;
      spec.sample_count = full_scale ? 20000 : 1000;
      spec.pairs = {MapPair::mixed()};
      break;
    case ExperimentKind::Convergence:
      spec.p = 20;
      spec.n = 4;
      spec.sigma = 0.2;
      spec.sample_count = 30;
      break;
    case ExperimentKind::RuntimeVsN:
      spec.p = 100;
      spec.n = 0;
      spec.sigma = 0.01;
      spec.sample_count = 50;
      spec.trials = full_scale ? 100 : 20;
      spec.sweep = full_scale ? std::vector<Eigen::Index>{5, 10, 15, 20, 25, 30,
                                                           35, 40}
                               : std::vector<Eigen::Index>{5, 10, 20, 30};
      break;
    case ExperimentKind::RuntimeVsP:
      spec.p = 0;
      spec.n = 10;
      spec.sigma = 0.01;
      spec.sample_count = 50;
      spec.trials = full_scale ? 100 : 20;
      spec.sweep = full_scale
                       ? std::vector<Eigen::Index>{20, 50, 100, 200, 300, 400, 500}
                       : std::vector<Eigen::Index>{20, 50, 100, 200};
      break;
  }
  return spec;
}

void ExperimentSpec::validate() const {
  auto fail = [](const std::string& what) {
    throw DomainError("experiment spec: " + what);
  };
  if (sample_count < 1) fail("sample count must be at least 1");
  if (!(sigma >= 0.0)) fail("sigma must be nonnegative");
  if (trials < 1) fail("trials must be at least 1");
  if (pairs.empty()) fail("at least one map pair is required");
  if (!(epsilon_init > 0.0)) fail("epsilon_init must be positive");
  if (!(conv_tol > 0.0) || max_iters < 1) fail("invalid stopping rule");
  if (threads < 1) fail("threads must be at least 1");
  const bool runtime =
      kind == ExperimentKind::RuntimeVsN || kind == ExperimentKind::RuntimeVsP;
  if (runtime) {
    if (sweep.empty()) fail("sweep list is empty");
    for (std::size_t i = 1; i < sweep.size(); ++i) {
      if (sweep[i] <= sweep[i - 1]) fail("sweep list must be strictly increasing");
    }
    for (auto v : sweep) {
      if (kind == ExperimentKind::RuntimeVsN) {
        if (v < 1 || v > p) fail("swept n outside [1, p]");
      } else if (v < n) {
        fail("swept p below n");
      }
    }
  } else {
    if (n < 1 || n > p) fail("need 1 <= n <= p");
  }
}

std::string ExperimentSpec::describe() const {
  std::ostringstream os;
  os << "kind=" << kind_name(kind) << " p=" << p << " n=" << n << " N="
     << sample_count << " sigma=" << sigma << " trials=" << trials
     << " seed=" << seed << " epsilon_init=" << epsilon_init
     << " max_iters=" << max_iters << " conv_tol=" << conv_tol
     << " threads=" << threads << " pairs=";
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    os << (i ? "," : "") << pairs[i].name();
  }
  if (!sweep.empty()) {
    os << " sweep=";
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      os << (i ? "," : "") << sweep[i];
    }
  }
  return os.str();
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  if (values.size() % 2 == 1) return values[mid];
  const double upper = values[mid];
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw DomainError("spearman: need two equally long samples of size >= 2");
  }
  return pearson(average_ranks(x), average_ranks(y));
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw DomainError("loglog_slope: need two equally long samples of size >= 2");
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  return sxy / sxx;
}

DiscrepancyStatsResult run_discrepancy_stats(const ExperimentSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const StiefelPoint center = generate_center(Dims(spec.p, spec.n), rng);
  const SampleSet set =
      generate_samples(center, spec.sigma, spec.sample_count, rng, spec.seed);

  DiscrepancyStatsResult result{spec, {}, 0.0, 0.0, 0.0};
  result.rows.reserve(set.size());
  std::vector<double> deltas, compositions;
  for (std::size_t k = 0; k < set.size(); ++k) {
    double composition = 0.0;
    try {
      composition =
          composition_discrepancy_direct(center, set.samples[k]).value;
    } catch (const DomainError& e) {
      throw DomainError("sample " + std::to_string(k + 1) + ": " + e.what());
    }
    const double delta = discrepancy(center, set.samples[k]);
    result.rows.push_back({k + 1, delta, composition});
    deltas.push_back(delta);
    compositions.push_back(composition);
  }
  result.median_delta = median(deltas);
  result.median_composition = median(compositions);
  result.spearman = deltas.size() >= 2
                        ? spearman(deltas, compositions)
                        : std::numeric_limits<double>::quiet_NaN();
  return result;
}

namespace {

AveragingConfig config_for(const ExperimentSpec& spec, const MapPair& pair) {
  AveragingConfig config;
  config.pair = pair;
  config.max_iters = spec.max_iters;
  config.conv_tol = spec.conv_tol;
  config.epsilon_init = spec.epsilon_init;
  return config;
}

}  // namespace

ConvergenceResult run_convergence(const ExperimentSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const StiefelPoint center = generate_center(Dims(spec.p, spec.n), rng);
  const SampleSet set =
      generate_samples(center, spec.sigma, spec.sample_count, rng, spec.seed);
  const StiefelPoint initial =
      perturb_initial_guess(set.samples.front(), spec.epsilon_init, rng);

  ConvergenceResult result{spec, {}};
  for (const auto& pair : spec.pairs) {
    PairOutcome outcome{pair, std::nullopt, {}};
    try {
      outcome.report = fixed_point_mean(set, config_for(spec, pair), initial);
    } catch (const Error& e) {
      outcome.error = e.what();
    }
    result.outcomes.push_back(std::move(outcome));
  }
  return result;
}

namespace {

RuntimeResult run_runtime(const ExperimentSpec& spec, bool sweep_n) {
  spec.validate();
  const std::size_t dims_count = spec.sweep.size();
  const std::size_t tasks = dims_count * spec.trials;
  const std::size_t pairs = spec.pairs.size();
  std::vector<TimingRecord> records(tasks * pairs);

  auto run_task = [&](std::size_t task) {
    const std::size_t d = task / spec.trials;
    const std::size_t trial = task % spec.trials;
    const Eigen::Index dim = spec.sweep[d];
    const Dims dims = sweep_n ? Dims(spec.p, dim) : Dims(dim, spec.n);
    for (std::size_t q = 0; q < pairs; ++q) {
      auto& rec = records[task * pairs + q];
      rec.pair = spec.pairs[q];
      rec.dim = dim;
      rec.trial = trial;
    }
    try {
      const std::uint64_t seed = derive_seed(spec.seed, d, trial);
      Rng rng(seed);
      const StiefelPoint center = generate_center(dims, rng);
      const SampleSet set =
          generate_samples(center, spec.sigma, spec.sample_count, rng, seed);
      const StiefelPoint initial =
          perturb_initial_guess(set.samples.front(), spec.epsilon_init, rng);
      for (std::size_t q = 0; q < pairs; ++q) {
        auto& rec = records[task * pairs + q];
        try {
          const AveragingConfig config = config_for(spec, spec.pairs[q]);
          fixed_point_mean(set, config, initial);  // warm-up, untimed
          const AveragingReport report = fixed_point_mean(set, config, initial);
          rec.wall_time = report.wall_time;
          rec.iterations = report.iterations_used;
          rec.converged = report.converged;
        } catch (const Error& e) {
          rec.failed = true;
          rec.error = e.what();
        }
      }
    } catch (const Error& e) {
      for (std::size_t q = 0; q < pairs; ++q) {
        records[task * pairs + q].failed = true;
        records[task * pairs + q].error = e.what();
      }
    }
  };

  if (spec.threads <= 1) {
    for (std::size_t t = 0; t < tasks; ++t) run_task(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < spec.threads; ++w) {
      workers.emplace_back([&] {
        for (std::size_t t = next++; t < tasks; t = next++) run_task(t);
      });
    }
  }

  RuntimeResult result{spec, std::move(records), {}};
  for (const auto& pair : spec.pairs) {
    for (auto dim : spec.sweep) {
      RuntimeSummary summary{pair, dim, 0.0, 0, 0};
      std::vector<double> times;
      for (const auto& rec : result.records) {
        if (rec.pair != pair || rec.dim != dim) continue;
        if (rec.failed) {
          ++summary.failed;
        } else {
          ++summary.completed;
          times.push_back(std::chrono::duration<double>(rec.wall_time).count());
        }
      }
      summary.median_seconds = median(std::move(times));
      result.summaries.push_back(summary);
    }
  }
  return result;
}

}  // namespace

RuntimeResult run_runtime_vs_n(const ExperimentSpec& spec) {
  if (spec.kind != ExperimentKind::RuntimeVsN) {
    throw DomainError("run_runtime_vs_n: spec kind must be runtime-n");
  }
  return run_runtime(spec, true);
}

RuntimeResult run_runtime_vs_p(const ExperimentSpec& spec) {
  if (spec.kind != ExperimentKind::RuntimeVsP) {
    throw DomainError("run_runtime_vs_p: spec kind must be runtime-p");
  }
  return run_runtime(spec, false);
}

std::vector<double> RuntimeResult::medians(const MapPair& pair) const {
  std::vector<double> out;
  for (auto dim : spec.sweep) {
    double value = std::numeric_limits<double>::quiet_NaN();
    for (const auto& s : summaries) {
      if (s.pair == pair && s.dim == dim) value = s.median_seconds;
    }
    out.push_back(value);
  }
  return out;
}

std::string csv_file_name(const ExperimentSpec& spec) {
  std::string kind = kind_name(spec.kind);
  std::replace(kind.begin(), kind.end(), '-', '_');
  return kind + "_" + std::to_string(spec.seed) + ".csv";
}

namespace {

class PrecisionGuard {
 public:
  explicit PrecisionGuard(std::ostream& out) : out_(out), old_(out.precision(17)) {}
  ~PrecisionGuard() { out_.precision(old_); }

 private:
  std::ostream& out_;
  std::streamsize old_;
};

void write_header(std::ostream& out, const ExperimentSpec& spec) {
  out << "# stiefel_kn experiment\n# " << spec.describe() << '\n';
}

}  // namespace

void write_csv(std::ostream& out, const DiscrepancyStatsResult& result) {
  PrecisionGuard guard(out);
  write_header(out, result.spec);
  out << "# median_delta=" << result.median_delta
      << " median_Delta=" << result.median_composition
      << " spearman=" << result.spearman << '\n';
  out << "k,delta_C_Xk,Delta_C_Xk\n";
  for (const auto& row : result.rows) {
    out << row.k << ',' << row.delta << ',' << row.composition << '\n';
  }
}

void write_csv(std::ostream& out, const ConvergenceResult& result) {
  PrecisionGuard guard(out);
  write_header(out, result.spec);
  for (const auto& o : result.outcomes) {
    out << "# pair=" << o.pair.name();
    if (o.report) {
      out << " converged=" << (o.report->converged ? "true" : "false")
          << " iterations=" << o.report->iterations_used
          << " final_delta_to_center=" << o.report->iterates_delta_to_center.back()
          << " residual_field=" << o.report->residual_field_norm;
    } else {
      out << " error=\"" << o.error << '"';
    }
    out << '\n';
  }
  out << "pair,iter,delta_to_center,step_size\n";
  for (const auto& o : result.outcomes) {
    if (!o.report) continue;
    const auto& r = *o.report;
    for (std::size_t i = 0; i < r.iterates_delta_to_center.size(); ++i) {
      out << o.pair.name() << ',' << i << ',' << r.iterates_delta_to_center[i]
          << ',';
      if (i > 0) out << r.step_sizes[i - 1];
      out << '\n';
    }
  }
}

void write_csv(std::ostream& out, const RuntimeResult& result) {
  PrecisionGuard guard(out);
  write_header(out, result.spec);
  const char* dim_name =
      result.spec.kind == ExperimentKind::RuntimeVsN ? "n" : "p";
  for (const auto& s : result.summaries) {
    out << "# median pair=" << s.pair.name() << ' ' << dim_name << '=' << s.dim
        << " median_s=" << s.median_seconds << " completed=" << s.completed
        << " failed=" << s.failed << '\n';
  }
  out << "pair," << dim_name << ",trial,wall_time_ns,iterations,converged,failed\n";
  for (const auto& r : result.records) {
    out << r.pair.name() << ',' << r.dim << ',' << r.trial << ','
        << r.wall_time.count() << ',' << r.iterations << ','
        << (r.converged ? 1 : 0) << ',' << (r.failed ? 1 : 0) << '\n';
  }
}

}  // namespace stiefel_kn::experiments
