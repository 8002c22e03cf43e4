#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stiefel_kn/stiefel_kn.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace stiefel_kn;

namespace {

StiefelPoint point(const Matrix& x) { return StiefelPoint::validate(x); }

TangentVector tangent(const Matrix& x, const Matrix& v) {
  return TangentVector::validate(point(x), v);
}

SampleSet sample_set(const std::vector<Matrix>& samples,
                     const std::optional<Matrix>& center) {
  if (samples.empty()) throw DomainError("need at least one sample");
  const Dims dims(samples.front().rows(), samples.front().cols());
  SampleSet set{dims, std::nullopt, 0.0, 0, {}};
  if (center) set.center = StiefelPoint::validate(*center, dims);
  for (const auto& s : samples) set.samples.push_back(StiefelPoint::validate(s, dims));
  return set;
}

py::dict report_dict(const AveragingReport& r) {
  std::vector<double> times;
  for (auto t : r.cumulative_time) times.push_back(static_cast<double>(t.count()) * 1e-9);
  return py::dict("final_point"_a = r.final_point.matrix(),
                  "iterations_used"_a = r.iterations_used,
                  "converged"_a = r.converged,
                  "step_sizes"_a = r.step_sizes,
                  "delta_to_center"_a = r.iterates_delta_to_center,
                  "cumulative_time"_a = times,
                  "wall_time"_a = static_cast<double>(r.wall_time.count()) * 1e-9,
                  "residual_field_norm"_a = r.residual_field_norm);
}

}  // namespace

PYBIND11_MODULE(_stiefel_kn, m) {
  m.doc() = "Fixed-point means on the Stiefel manifold St(p, n)";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ShapeError>(m, "ShapeError", error.ptr());
  auto domain = py::register_exception<DomainError>(m, "DomainError", error.ptr());
  py::register_exception<RankDeficientError>(m, "RankDeficientError", domain.ptr());
  py::register_exception<NotOnManifoldError>(m, "NotOnManifoldError", domain.ptr());
  py::register_exception<AveragingDomainError>(m, "AveragingDomainError", domain.ptr());
  py::register_exception<UnsupportedPairError>(m, "UnsupportedPairError", error.ptr());
  py::register_exception<FormatError>(m, "FormatError", error.ptr());

  m.def("discrepancy",
        [](const Matrix& x, const Matrix& y) { return discrepancy(x, y); },
        "x"_a, "y"_a, "||I_n - X^T Y||_F");
  m.def("orthonormality_defect", &orthonormality_defect, "x"_a);
  m.def("tangency_defect", &tangency_defect, "x"_a, "v"_a);
  m.def("project_to_tangent",
        [](const Matrix& x, const Matrix& a) {
          return project_to_tangent(point(x), a).matrix();
        },
        "x"_a, "a"_a);

  m.def("polar_retraction",
        [](const Matrix& x, const Matrix& v) {
          return polar_retraction(tangent(x, v)).matrix();
        },
        "x"_a, "v"_a);
  m.def("orthographic_retraction",
        [](const Matrix& x, const Matrix& v) {
          return orthographic_retraction(tangent(x, v)).matrix();
        },
        "x"_a, "v"_a);
  m.def("polar_lifting",
        [](const Matrix& x, const Matrix& q, double guard) {
          return polar_lifting(point(x), point(q), guard).matrix();
        },
        "x"_a, "q"_a, "guard"_a = kDefaultLiftingGuard);
  m.def("orthographic_lifting",
        [](const Matrix& x, const Matrix& q, double guard) {
          return orthographic_lifting(point(x), point(q), guard).matrix();
        },
        "x"_a, "q"_a, "guard"_a = kDefaultLiftingGuard);
  m.def("composition_discrepancy",
        [](const Matrix& x, const Matrix& q) {
          return composition_discrepancy_closed_form(point(x), point(q)).value;
        },
        "x"_a, "q"_a,
        "Distance from Q of the polar retraction of its orthographic lifting at X");

  m.def("random_point",
        [](Eigen::Index p, Eigen::Index n, std::uint64_t seed) {
          Rng rng(seed);
          return generate_center(Dims(p, n), rng).matrix();
        },
        "p"_a, "n"_a, "seed"_a);
  m.def("generate_samples",
        [](const Matrix& center, double sigma, std::size_t count, std::uint64_t seed) {
          Rng rng(seed);
          std::vector<Matrix> out;
          for (const auto& s : generate_samples(point(center), sigma, count, rng).samples) {
            out.push_back(s.matrix());
          }
          return out;
        },
        "center"_a, "sigma"_a, "count"_a, "seed"_a);

  m.def("fixed_point_mean",
        [](const std::vector<Matrix>& samples, const Matrix& initial,
           const std::string& pair, std::optional<std::vector<double>> weights,
           int max_iters, double conv_tol, std::optional<Matrix> center,
           double guard) {
          const SampleSet set = sample_set(samples, center);
          AveragingConfig config;
          config.pair = MapPair::parse(pair);
          config.max_iters = max_iters;
          config.conv_tol = conv_tol;
          config.lifting_guard = guard;
          const StiefelPoint init = StiefelPoint::validate(initial, set.dims);
          if (weights) {
            config.weights = std::move(weights);
            return report_dict(weighted_fixed_point_mean(set, config, init));
          }
          return report_dict(fixed_point_mean(set, config, init));
        },
        "samples"_a, "initial"_a, "pair"_a = "mixed", "weights"_a = py::none(),
        "max_iters"_a = 100, "conv_tol"_a = 1e-10, "center"_a = py::none(),
        "guard"_a = kDefaultLiftingGuard);
  m.def("residual_vector_field",
        [](const Matrix& x, const std::vector<Matrix>& samples, const std::string& pair) {
          return residual_vector_field(point(x), sample_set(samples, std::nullopt),
                                       MapPair::parse(pair));
        },
        "x"_a, "samples"_a, "pair"_a = "mixed");

  m.def("skew_expm", &kernels::skew_expm, "omega"_a, "scale"_a = 1.0);
  m.def("spd_inv_sqrt", &kernels::spd_inv_sqrt, "s"_a);
  m.def("solve_lyapunov_sym", &kernels::solve_lyapunov_sym, "m"_a, "b"_a);
}
