#pragma once

#include <cstdint>
#include <random>

#include "stiefel_kn/matrix_kernels.hpp"

namespace stiefel_kn {

/// Seedable generator of standard-normal variates.
///
/// Uniforms come from std::mt19937_64 (its output sequence is fixed by the
/// C++ standard); each uniform takes the top 53 bits of one draw. Gaussians
/// use the basic Box-Muller transform, emitting both variates of a pair.
/// Unlike std::normal_distribution, the resulting stream is identical on
/// every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  /// rows x cols matrix of i.i.d. standard normals, filled column by column.
  Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Mixes a base seed with stream indices (splitmix64 finalizer), giving
/// independent seeds for trials and sweep points.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream_a,
                          std::uint64_t stream_b = 0);

}  // namespace stiefel_kn
