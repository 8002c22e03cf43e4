#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "stiefel_kn/stiefel.hpp"

namespace stiefel_kn::io {

/// Contents of a sample file before any manifold validation.
///
/// Text layout (UTF-8):
///   p n N sigma seed [C]
///   <p lines of n values>      center, present only when the header ends in C
///   <blank line>
///   <p lines of n values>      sample 1
///   <blank line>
///   ...                        sample N
/// Values are written with 17 significant digits.
struct RawSampleFile {
  Eigen::Index p = 0;
  Eigen::Index n = 0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::optional<Matrix> center;
  std::vector<Matrix> samples;
};

/// Throws FormatError with the 1-based line and column of the problem.
RawSampleFile parse_sample_file(std::istream& in);
RawSampleFile read_raw_sample_file(const std::filesystem::path& path);

/// Validates every block as a Stiefel point (NotOnManifoldError otherwise).
SampleSet to_sample_set(const RawSampleFile& raw);
SampleSet read_sample_file(const std::filesystem::path& path);

void write_sample_file(std::ostream& out, const SampleSet& set);
void write_sample_file(const std::filesystem::path& path, const SampleSet& set);

/// Single point, stored as a set of one sample (no center).
void write_point_file(const std::filesystem::path& path,
                      const StiefelPoint& point, double sigma = 0.0,
                      std::uint64_t seed = 0);

/// One positive real per line; blank lines ignored.
std::vector<double> read_weights_file(const std::filesystem::path& path);

}  // namespace stiefel_kn::io
