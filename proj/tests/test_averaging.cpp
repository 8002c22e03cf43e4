#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace stiefel_kn;
using stiefel_kn::testing::circle_point;

namespace {

const MapPair kAllPairs[] = {MapPair::mixed(), MapPair::ortho_ortho(),
                             MapPair::polar_polar()};

SampleSet circle_set(const std::vector<double>& angles) {
  SampleSet set{Dims(2, 1), circle_point(0.0), 0.0, 0, {}};
  for (double a : angles) set.samples.push_back(circle_point(a));
  return set;
}

struct Instance {
  SampleSet set;
  StiefelPoint initial;
};

Instance seeded_instance(const Dims& dims, std::size_t count, double sigma,
                         std::uint64_t seed) {
  Rng rng(seed);
  const StiefelPoint c = generate_center(dims, rng);
  SampleSet set = generate_samples(c, sigma, count, rng, seed);
  StiefelPoint init = perturb_initial_guess(set.samples.front(), 0.01, rng);
  return {std::move(set), std::move(init)};
}

AveragingConfig config_for(const MapPair& pair) {
  AveragingConfig config;
  config.pair = pair;
  return config;
}

}  // namespace

TEST_CASE("singleton sample set") {
  Rng rng(31);
  const StiefelPoint c = generate_center(Dims(10, 3), rng);
  const SampleSet set = generate_samples(c, 0.1, 1, rng);
  const StiefelPoint init = perturb_initial_guess(set.samples[0], 0.01, rng);
  for (const auto& pair : kAllPairs) {
    CAPTURE(pair.name());
    const auto report = fixed_point_mean(set, config_for(pair), init);
    CHECK(report.converged);
    CHECK(discrepancy(report.final_point, set.samples[0]) < 1e-10);
    if (pair != MapPair::mixed()) {
      CHECK(report.iterations_used <= 2);
    } else {
      CHECK(report.iterations_used <= 4);
    }
    CHECK(residual_vector_field(set.samples[0], set, pair) < 1e-15);
  }
}

TEST_CASE("samples all equal to the center") {
  Rng rng(32);
  const StiefelPoint c = generate_center(Dims(12, 4), rng);
  const SampleSet set = generate_samples(c, 0.0, 8, rng);
  const StiefelPoint init = perturb_initial_guess(c, 0.01, rng);
  for (const auto& pair : kAllPairs) {
    CAPTURE(pair.name());
    const auto report = fixed_point_mean(set, config_for(pair), init);
    CHECK(report.converged);
    CHECK(discrepancy(report.final_point, c) < 1e-10);
    CHECK(report.iterations_used <= 3);
  }
}

TEST_CASE("symmetric samples on the circle") {
  const SampleSet set = circle_set({0.4, -0.4});
  for (const auto& pair : kAllPairs) {
    CAPTURE(pair.name());
    const auto report = fixed_point_mean(set, config_for(pair), circle_point(0.05));
    CHECK(report.converged);
    CHECK(discrepancy(report.final_point, circle_point(0.0)) < 1e-9);
  }
  CHECK(residual_vector_field(circle_point(0.0), set, MapPair::mixed()) < 1e-16);
  CHECK(residual_vector_field(circle_point(0.0), set, MapPair::polar_polar()) <
        1e-16);
}

TEST_CASE("polar pair is unstable on a wide symmetric circle pair") {
  // Scalar map phi -> phi + atan(mean tan(a_k - phi)) has slope
  // 1 - sec^2(theta) at 0, repelling once theta > pi/4.
  const SampleSet set = circle_set({1.0, -1.0});
  CHECK_THROWS_AS(
      fixed_point_mean(set, config_for(MapPair::polar_polar()), circle_point(0.05)),
      AveragingDomainError);
  const auto report =
      fixed_point_mean(set, config_for(MapPair::mixed()), circle_point(0.05));
  CHECK(report.converged);
  CHECK(discrepancy(report.final_point, circle_point(0.0)) < 1e-9);
}

TEST_CASE("St(20,4), N=30, sigma=0.2: the three pairs agree") {
  const Instance inst = seeded_instance(Dims(20, 4), 30, 0.2, 2024);
  std::vector<double> finals;
  for (const auto& pair : kAllPairs) {
    CAPTURE(pair.name());
    const auto report = fixed_point_mean(inst.set, config_for(pair), inst.initial);
    REQUIRE(report.converged);
    CHECK(report.step_sizes.back() < 1e-10);
    CHECK(report.iterations_used == static_cast<int>(report.step_sizes.size()));
    CHECK(report.iterates_delta_to_center.size() ==
          report.step_sizes.size() + 1);
    CHECK(report.residual_field_norm < 10 * 1e-10);
    CHECK(residual_vector_field(report.final_point, inst.set, pair) ==
          doctest::Approx(report.residual_field_norm).epsilon(1e-6));
    finals.push_back(report.iterates_delta_to_center.back());
  }
  const auto [lo, hi] = std::minmax_element(finals.begin(), finals.end());
  CHECK(*hi <= 2.0 * *lo);
}

TEST_CASE("mixed and orthographic pairs share their fixed point") {
  const Instance inst = seeded_instance(Dims(15, 3), 20, 0.1, 77);
  const auto mixed = fixed_point_mean(inst.set, config_for(MapPair::mixed()),
                                      inst.initial);
  const auto ortho = fixed_point_mean(
      inst.set, config_for(MapPair::ortho_ortho()), inst.initial);
  CHECK(discrepancy(mixed.final_point, ortho.final_point) < 1e-9);
}

TEST_CASE("orthographic lifting aggregated by linearity matches per-sample lifting") {
  const Instance inst = seeded_instance(Dims(20, 4), 25, 0.1, 78);
  const Matrix& x = inst.initial.matrix();
  Matrix per_sample = Matrix::Zero(20, 4);
  for (const auto& s : inst.set.samples) {
    per_sample += orthographic_lifting(inst.initial, s).matrix();
  }
  per_sample /= 25.0;
  const double field = residual_vector_field(inst.initial, inst.set,
                                             MapPair::ortho_ortho());
  CHECK(field == doctest::Approx(per_sample.norm()).epsilon(1e-12));
  // One explicit iteration of the mixed rule.
  AveragingConfig config = config_for(MapPair::mixed());
  config.max_iters = 1;
  const auto report = fixed_point_mean(inst.set, config, inst.initial);
  const Matrix expected = detail::polar_retraction(x, per_sample);
  CHECK((report.final_point.matrix() - expected).norm() < 1e-13);
}

TEST_CASE("weighted mean") {
  SUBCASE("unit weights reproduce the unweighted trace exactly") {
    const Instance inst = seeded_instance(Dims(20, 4), 15, 0.1, 5);
    for (const auto& pair : kAllPairs) {
      AveragingConfig config = config_for(pair);
      const auto plain = fixed_point_mean(inst.set, config, inst.initial);
      config.weights = std::vector<double>(15, 1.0);
      const auto weighted =
          weighted_fixed_point_mean(inst.set, config, inst.initial);
      CHECK(plain.step_sizes == weighted.step_sizes);
      CHECK(plain.iterates_delta_to_center == weighted.iterates_delta_to_center);
      CHECK(plain.final_point.matrix() == weighted.final_point.matrix());
    }
  }

  SUBCASE("circle with weights (2,1) follows the scalar angle iteration") {
    const double theta = 0.3;
    const SampleSet set = circle_set({theta, -theta});
    AveragingConfig config = config_for(MapPair::mixed());
    config.weights = std::vector<double>{2.0, 1.0};
    const auto report =
        weighted_fixed_point_mean(set, config, circle_point(0.01));
    REQUIRE(report.converged);
    const double phi = oracle::circle_fixed_point(
        {theta, -theta}, {2.0, 1.0}, 0.01, oracle::circle_mixed());
    // Same number of scalar iterations lands on the same angle.
    const double phi_same = oracle::circle_fixed_point(
        {theta, -theta}, {2.0, 1.0}, 0.01, oracle::circle_mixed(),
        report.iterations_used);
    const Matrix& m = report.final_point.matrix();
    CHECK(std::abs(std::atan2(m(1, 0), m(0, 0)) - phi_same) < 1e-12);
    CHECK(discrepancy(report.final_point, circle_point(phi)) < 1e-9);
    CHECK(phi > 0.0);  // tilts toward the heavier sample
    // Fixed point of 2 sin(theta - phi) = sin(theta + phi).
    CHECK(2.0 * std::sin(theta - phi) ==
          doctest::Approx(std::sin(theta + phi)).epsilon(1e-9));
  }

  SUBCASE("one dominant weight pulls the mean onto its sample") {
    const Instance inst = seeded_instance(Dims(20, 4), 10, 0.05, 6);
    std::vector<double> w(10, 1.0);
    w[0] = 1e6;
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& v : w) v *= 10.0 / total;
    AveragingConfig config = config_for(MapPair::mixed());
    config.weights = w;
    const auto report =
        weighted_fixed_point_mean(inst.set, config, inst.initial);
    REQUIRE(report.converged);
    CHECK(discrepancy(report.final_point, inst.set.samples[0]) < 1e-3);
  }

  SUBCASE("adaptive weights are queried every iteration") {
    const Instance inst = seeded_instance(Dims(10, 2), 6, 0.05, 8);
    AveragingConfig config = config_for(MapPair::mixed());
    std::size_t calls = 0;
    config.weight_function = [&](std::size_t, const StiefelPoint& x,
                                 const SampleSet& s) {
      ++calls;
      std::vector<double> w;
      for (const auto& q : s.samples) w.push_back(1.0 / (1.0 + discrepancy(x, q)));
      return w;
    };
    const auto report = weighted_fixed_point_mean(inst.set, config, inst.initial);
    CHECK(report.converged);
    CHECK(calls == static_cast<std::size_t>(report.iterations_used) + 1);
  }

  SUBCASE("invalid weights") {
    const Instance inst = seeded_instance(Dims(10, 2), 3, 0.05, 9);
    AveragingConfig config = config_for(MapPair::mixed());
    CHECK_THROWS_AS(weighted_fixed_point_mean(inst.set, config, inst.initial),
                    DomainError);
    config.weights = std::vector<double>{1.0, 0.0, 1.0};
    try {
      weighted_fixed_point_mean(inst.set, config, inst.initial);
      FAIL("expected AveragingDomainError");
    } catch (const AveragingDomainError& e) {
      REQUIRE(e.sample().has_value());
      CHECK(*e.sample() == 1);
    }
    config.weights = std::vector<double>{1.0, 1.0};
    CHECK_THROWS_AS(weighted_fixed_point_mean(inst.set, config, inst.initial),
                    AveragingDomainError);
  }
}

TEST_CASE("domain violations report iteration and sample") {
  SampleSet set = circle_set({0.1, 0.2, std::numbers::pi});
  for (const auto& pair : kAllPairs) {
    try {
      fixed_point_mean(set, config_for(pair), circle_point(0.0));
      FAIL("expected AveragingDomainError");
    } catch (const AveragingDomainError& e) {
      CHECK(e.iteration() == 0);
      REQUIRE(e.sample().has_value());
      CHECK(*e.sample() == 2);
    }
  }
}

TEST_CASE("non-convergence returns the trace") {
  const Instance inst = seeded_instance(Dims(20, 4), 30, 0.2, 10);
  AveragingConfig config = config_for(MapPair::mixed());
  config.max_iters = 3;
  const auto report = fixed_point_mean(inst.set, config, inst.initial);
  CHECK_FALSE(report.converged);
  CHECK(report.iterations_used == 3);
  CHECK(report.step_sizes.size() == 3);
  CHECK(report.cumulative_time.size() == 3);

  config.conv_tol = 0.0;
  CHECK_THROWS_AS(fixed_point_mean(inst.set, config, inst.initial), DomainError);
}

TEST_CASE("sample order does not change the mean") {
  const Instance inst = seeded_instance(Dims(20, 4), 20, 0.1, 11);
  SampleSet shuffled = inst.set;
  std::reverse(shuffled.samples.begin(), shuffled.samples.end());
  std::rotate(shuffled.samples.begin(), shuffled.samples.begin() + 7,
              shuffled.samples.end());
  for (const auto& pair : kAllPairs) {
    const auto a = fixed_point_mean(inst.set, config_for(pair), inst.initial);
    const auto b = fixed_point_mean(shuffled, config_for(pair), inst.initial);
    CHECK(discrepancy(a.final_point, b.final_point) < 1e-9);
  }
}

TEST_CASE("left-rotation equivariance") {
  const Instance inst = seeded_instance(Dims(12, 3), 15, 0.1, 12);
  Rng rng(99);
  const Matrix u = kernels::skew_expm(kernels::skew_part(rng.gaussian_matrix(12, 12)), 1.0);
  SampleSet rotated = inst.set;
  rotated.center = inst.set.center->rotated(u);
  for (auto& s : rotated.samples) s = s.rotated(u);
  for (const auto& pair : kAllPairs) {
    const auto a = fixed_point_mean(inst.set, config_for(pair), inst.initial);
    const auto b =
        fixed_point_mean(rotated, config_for(pair), inst.initial.rotated(u));
    CHECK((u * a.final_point.matrix() - b.final_point.matrix()).norm() < 1e-9);
  }
}

TEST_CASE("step sizes shrink monotonically at small spread") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const Instance inst = seeded_instance(Dims(20, 4), 30, 0.05, seed);
    for (const auto& pair : kAllPairs) {
      const auto report = fixed_point_mean(inst.set, config_for(pair), inst.initial);
      REQUIRE(report.converged);
      for (std::size_t i = 2; i < report.step_sizes.size(); ++i) {
        CHECK(report.step_sizes[i] < report.step_sizes[i - 1]);
      }
    }
  }
}

TEST_CASE("trace CSV") {
  const SampleSet set = circle_set({0.2, -0.2});
  const auto report =
      fixed_point_mean(set, config_for(MapPair::mixed()), circle_point(0.1));
  std::ostringstream os;
  write_trace_csv(os, report);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "iter,step_size,delta_to_center,cumulative_time_ns");
  std::getline(in, line);
  CHECK(line.rfind("0,,", 0) == 0);
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == report.step_sizes.size());

  SampleSet no_center = set;
  no_center.center.reset();
  const auto r2 =
      fixed_point_mean(no_center, config_for(MapPair::mixed()), circle_point(0.1));
  CHECK(r2.iterates_delta_to_center.empty());
  std::ostringstream os2;
  write_trace_csv(os2, r2);
  CHECK(os2.str().find("\n1,") != std::string::npos);
  CHECK(os2.str().find(",,") != std::string::npos);
}
