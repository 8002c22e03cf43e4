#include "cli_app.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include "stiefel_kn/stiefel_kn.hpp"

namespace stiefel_kn::cli {
namespace {

namespace fs = std::filesystem;

struct GenOptions {
  Eigen::Index p = 0;
  Eigen::Index n = 0;
  std::size_t count = 0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::string out;
  bool no_center = false;
};

struct MeanOptions {
  std::string in;
  std::string pair = "mixed";
  std::string weights;
  std::string init;
  std::optional<std::uint64_t> init_seed;
  int max_iters = 100;
  double conv_tol = 1e-10;
  double epsilon_init = kDefaultInitEpsilon;
  std::string out;
  std::string trace;
};

struct ValidateOptions {
  std::string in;
};

struct ExpOptions {
  std::string kind;
  std::uint64_t seed = 0;
  bool full_scale = false;
  std::optional<std::size_t> count;
  std::optional<double> sigma;
  std::optional<std::size_t> trials;
  std::optional<Eigen::Index> p;
  std::optional<Eigen::Index> n;
  std::vector<Eigen::Index> sweep;
  std::vector<std::string> pairs;
  unsigned threads = 1;
  std::string out_dir = ".";
};

// Input problems that are not numerical: exit code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int cmd_gen(const GenOptions& o, std::ostream& out) {
  Rng rng(o.seed);
  const StiefelPoint center = generate_center(Dims(o.p, o.n), rng);
  SampleSet set = generate_samples(center, o.sigma, o.count, rng, o.seed);
  if (o.no_center) set.center.reset();
  io::write_sample_file(o.out, set);
  out << "wrote " << set.size() << " samples on St(" << o.p << "," << o.n
      << ") to " << o.out << '\n';
  return kExitOk;
}

int cmd_mean(const MeanOptions& o, std::ostream& out) {
  AveragingConfig config;
  config.pair = MapPair::parse(o.pair);
  config.max_iters = o.max_iters;
  config.conv_tol = o.conv_tol;
  config.epsilon_init = o.epsilon_init;

  const SampleSet set = io::read_sample_file(o.in);
  StiefelPoint initial = set.samples.front();
  if (!o.init.empty()) {
    const SampleSet init = io::read_sample_file(o.init);
    initial = init.samples.front();
  } else {
    Rng rng(o.init_seed.value_or(derive_seed(set.seed, 0x1717)));
    initial = perturb_initial_guess(set.samples.front(), o.epsilon_init, rng);
  }

  AveragingReport report = [&] {
    if (o.weights.empty()) return fixed_point_mean(set, config, initial);
    config.weights = io::read_weights_file(o.weights);
    if (config.weights->size() != set.size()) {
      throw UsageError("weights file has " +
                       std::to_string(config.weights->size()) +
                       " entries, sample file has " + std::to_string(set.size()));
    }
    return weighted_fixed_point_mean(set, config, initial);
  }();

  out.precision(17);
  out << "pair: " << config.pair.name() << '\n'
      << "converged: " << (report.converged ? "true" : "false") << '\n'
      << "iterations: " << report.iterations_used << '\n'
      << "final_step: " << report.step_sizes.back() << '\n'
      << "residual_field: " << report.residual_field_norm << '\n';
  if (set.center) {
    out << "delta_to_center: " << report.iterates_delta_to_center.back() << '\n';
  }
  out << "wall_time_ns: " << report.wall_time.count() << '\n';
  if (!o.out.empty()) {
    io::write_point_file(o.out, report.final_point, set.sigma, set.seed);
  }
  if (!o.trace.empty()) {
    std::ofstream trace(o.trace);
    if (!trace) throw UsageError("cannot open '" + o.trace + "' for writing");
    write_trace_csv(trace, report);
  }
  return kExitOk;
}

int cmd_validate(const ValidateOptions& o, std::ostream& out) {
  const io::RawSampleFile raw = io::read_raw_sample_file(o.in);
  bool all_ok = true;
  out.precision(6);
  auto check = [&](const std::string& label, const Matrix& m) {
    const double defect = orthonormality_defect(m);
    const bool ok = defect < kTolOrth;
    all_ok = all_ok && ok;
    out << label << ": defect " << std::scientific << defect
        << std::defaultfloat << (ok ? " ok" : " FAIL") << '\n';
  };
  if (raw.center) check("center", *raw.center);
  for (std::size_t k = 0; k < raw.samples.size(); ++k) {
    check("sample " + std::to_string(k + 1), raw.samples[k]);
  }
  return all_ok ? kExitOk : kExitDomain;
}

int cmd_exp(const ExpOptions& o, std::ostream& out) {
  using namespace experiments;
  const ExperimentKind kind = parse_kind(o.kind);
  ExperimentSpec spec = ExperimentSpec::defaults(kind, o.full_scale);
  spec.seed = o.seed;
  if (o.count) spec.sample_count = *o.count;
  if (o.sigma) spec.sigma = *o.sigma;
  if (o.trials) spec.trials = *o.trials;
  if (o.p) spec.p = *o.p;
  if (o.n) spec.n = *o.n;
  if (!o.sweep.empty()) spec.sweep = o.sweep;
  if (!o.pairs.empty()) {
    spec.pairs.clear();
    for (const auto& name : o.pairs) spec.pairs.push_back(MapPair::parse(name));
  }
  spec.threads = o.threads;
  spec.validate();

  fs::create_directories(o.out_dir);
  const fs::path path = fs::path(o.out_dir) / csv_file_name(spec);
  std::ofstream csv(path);
  if (!csv) throw UsageError("cannot open '" + path.string() + "' for writing");

  out.precision(6);
  switch (kind) {
    case ExperimentKind::DiscrepancyStats: {
      const auto r = run_discrepancy_stats(spec);
      write_csv(csv, r);
      out << "median delta(C,X_k): " << r.median_delta << '\n'
          << "median Delta_C(X_k): " << r.median_composition << '\n'
          << "spearman(delta, Delta): " << r.spearman << '\n';
      break;
    }
    case ExperimentKind::Convergence: {
      const auto r = run_convergence(spec);
      write_csv(csv, r);
      for (const auto& o2 : r.outcomes) {
        out << o2.pair.name() << ": ";
        if (o2.report) {
          out << (o2.report->converged ? "converged" : "not converged")
              << " in " << o2.report->iterations_used
              << " iterations, delta(X*,C) = "
              << o2.report->iterates_delta_to_center.back() << '\n';
        } else {
          out << "failed: " << o2.error << '\n';
        }
      }
      break;
    }
    case ExperimentKind::RuntimeVsN:
    case ExperimentKind::RuntimeVsP: {
      const auto r = kind == ExperimentKind::RuntimeVsN ? run_runtime_vs_n(spec)
                                                         : run_runtime_vs_p(spec);
      write_csv(csv, r);
      const char* dim = kind == ExperimentKind::RuntimeVsN ? "n" : "p";
      for (const auto& s : r.summaries) {
        out << s.pair.name() << " " << dim << "=" << s.dim
            << " median " << s.median_seconds * 1e3 << " ms ("
            << s.completed << " ok, " << s.failed << " failed)\n";
      }
      break;
    }
  }
  out << "wrote " << path.string() << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Fixed-point empirical means on the compact Stiefel manifold",
               "stiefel-kn"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a seeded sample set");
  gen_cmd->add_option("--p", gen.p, "Rows of St(p,n)")->required();
  gen_cmd->add_option("--n", gen.n, "Columns of St(p,n)")->required();
  gen_cmd->add_option("--N", gen.count, "Number of samples")->required();
  gen_cmd->add_option("--sigma", gen.sigma, "Spread of the samples")->required();
  gen_cmd->add_option("--seed", gen.seed, "Random seed")->required();
  gen_cmd->add_option("--out", gen.out, "Output sample file")->required();
  gen_cmd->add_flag("--no-center", gen.no_center,
                    "Do not store the center in the file");

  MeanOptions mean;
  auto* mean_cmd = app.add_subcommand("mean", "Average a sample file");
  mean_cmd->add_option("--in", mean.in, "Input sample file")->required();
  mean_cmd->add_option("--pair", mean.pair, "polar, ortho or mixed")
      ->capture_default_str();
  mean_cmd->add_option("--weights", mean.weights,
                       "One positive weight per line (weighted mean)");
  mean_cmd->add_option("--init", mean.init,
                       "Initial guess file (first block is used)");
  mean_cmd->add_option("--init-seed", mean.init_seed,
                       "Seed of the initial-guess rotation");
  mean_cmd->add_option("--max-iters", mean.max_iters)->capture_default_str();
  mean_cmd->add_option("--conv-tol", mean.conv_tol)->capture_default_str();
  mean_cmd->add_option("--epsilon-init", mean.epsilon_init)
      ->capture_default_str();
  mean_cmd->add_option("--out", mean.out, "Write the mean as a point file");
  mean_cmd->add_option("--trace", mean.trace, "Write the iteration trace CSV");

  ValidateOptions validate;
  auto* validate_cmd =
      app.add_subcommand("validate", "Check every matrix of a sample file");
  validate_cmd->add_option("--in", validate.in, "Sample or point file")
      ->required();

  ExpOptions exp;
  auto* exp_cmd = app.add_subcommand("exp", "Run an experiment protocol");
  exp_cmd->add_option("--kind", exp.kind,
                      "discrepancy, convergence, runtime-n or runtime-p")
      ->required();
  exp_cmd->add_option("--seed", exp.seed, "Base seed")->required();
  exp_cmd->add_flag("--full-scale", exp.full_scale,
                    "Use full sample counts, trials and sweeps");
  exp_cmd->add_option("--N", exp.count, "Number of samples");
  exp_cmd->add_option("--sigma", exp.sigma, "Spread of the samples");
  exp_cmd->add_option("--trials", exp.trials, "Repetitions per sweep point");
  exp_cmd->add_option("--p", exp.p, "Rows (fixed dimension)");
  exp_cmd->add_option("--n", exp.n, "Columns (fixed dimension)");
  exp_cmd->add_option("--sweep", exp.sweep, "Swept n or p values");
  exp_cmd->add_option("--pairs", exp.pairs, "Map pairs to compare");
  exp_cmd->add_option("--threads", exp.threads, "Worker threads for trials")
      ->capture_default_str();
  exp_cmd->add_option("--out-dir", exp.out_dir, "Directory for the CSV")
      ->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen, out);
    if (*mean_cmd) return cmd_mean(mean, out);
    if (*validate_cmd) return cmd_validate(validate, out);
    return cmd_exp(exp, out);
  } catch (const DomainError& e) {
    err << "numerical domain error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const UnsupportedPairError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace stiefel_kn::cli
