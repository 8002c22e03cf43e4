#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_helpers.hpp"

using namespace stiefel_kn;

namespace {

io::RawSampleFile parse(const std::string& text) {
  std::istringstream in(text);
  return io::parse_sample_file(in);
}

void check_format_error(const std::string& text, std::size_t line,
                        std::size_t column) {
  try {
    parse(text);
    FAIL("expected FormatError for:\n" << text);
  } catch (const FormatError& e) {
    CHECK(e.line() == line);
    CHECK(e.column() == column);
  }
}

}  // namespace

TEST_CASE("sample files round-trip bit-exactly") {
  Rng rng(41);
  const StiefelPoint c = generate_center(Dims(7, 3), rng);
  const SampleSet set = generate_samples(c, 0.15, 4, rng, 41);
  std::ostringstream os;
  io::write_sample_file(os, set);
  const std::string text = os.str();
  CHECK(text.rfind("7 3 4 0.14999999999999999 41 C\n", 0) == 0);

  std::istringstream in(text);
  const SampleSet back = io::to_sample_set(io::parse_sample_file(in));
  CHECK(back.dims == set.dims);
  CHECK(back.sigma == set.sigma);
  CHECK(back.seed == 41);
  REQUIRE(back.center.has_value());
  CHECK(back.center->matrix() == c.matrix());
  REQUIRE(back.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(back.samples[k].matrix() == set.samples[k].matrix());
  }
}

TEST_CASE("parsing without a center and with loose blank lines") {
  const auto raw = parse("2 1 2 0 5\n\n1 \n0\n\n\n0\n1\n\n");
  CHECK_FALSE(raw.center.has_value());
  REQUIRE(raw.samples.size() == 2);
  CHECK(raw.samples[1](1, 0) == 1.0);
  CHECK_NOTHROW(io::to_sample_set(raw));
}

TEST_CASE("format errors carry line and column") {
  check_format_error("", 1, 1);
  check_format_error("2 1 1 0\n", 1, 1);
  check_format_error("2 x 1 0 0\n1\n0\n", 1, 3);
  check_format_error("1 2 1 0 0\n", 1, 1);
  check_format_error("2 1 1 0 0 D\n1\n0\n", 1, 11);
  check_format_error("2 1 1 0 0\n1\n", 3, 1);
  check_format_error("2 1 1 0 0\n1 2\n0\n", 2, 3);
  check_format_error("2 2 1 0 0\n1 0\n0\n", 3, 2);
  check_format_error("2 1 1 0 0\n1\nabc\n", 3, 1);
  check_format_error("2 1 1 0 0\n1\n0\n7\n", 4, 1);
  check_format_error("2 1 1 0 0\n1\ninf\n", 3, 1);
}

TEST_CASE("blocks off the manifold are rejected after parsing") {
  const auto raw = parse("2 1 1 0 0\n2\n0\n");
  CHECK_THROWS_AS(io::to_sample_set(raw), NotOnManifoldError);
}

TEST_CASE("weights files") {
  const auto dir = std::filesystem::temp_directory_path() / "stiefel_kn_io_test";
  std::filesystem::create_directories(dir);
  const auto good = dir / "w.txt";
  std::ofstream(good) << "1\n2.5\n\n0.25\n";
  CHECK(io::read_weights_file(good) == std::vector<double>{1.0, 2.5, 0.25});
  const auto bad = dir / "bad.txt";
  std::ofstream(bad) << "1\n-2\n";
  CHECK_THROWS_AS(io::read_weights_file(bad), FormatError);
  CHECK_THROWS_AS(io::read_weights_file(dir / "missing.txt"), Error);
  std::filesystem::remove_all(dir);
}
