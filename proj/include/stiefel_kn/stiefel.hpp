#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "stiefel_kn/matrix_kernels.hpp"
#include "stiefel_kn/random.hpp"

namespace stiefel_kn {

/// Orthonormality tolerance ||X^T X - I||_F for Stiefel points.
inline constexpr double kTolOrth = 1e-9;
/// Tangency tolerance ||X^T V + V^T X||_F for tangent vectors.
inline constexpr double kTolTan = 1e-9;
/// Default size of the random rotation applied to build an initial guess.
inline constexpr double kDefaultInitEpsilon = 0.01;

/// Shape (p, n) of St(p, n); requires 1 <= n <= p.
class Dims {
 public:
  Dims(Eigen::Index p, Eigen::Index n);

  Eigen::Index p() const noexcept { return p_; }
  Eigen::Index n() const noexcept { return n_; }

  friend bool operator==(const Dims&, const Dims&) = default;

 private:
  Eigen::Index p_;
  Eigen::Index n_;
};

/// A p x n matrix with orthonormal columns.
class StiefelPoint {
 public:
  /// Checks ||X^T X - I_n||_F < kTolOrth; throws NotOnManifoldError with
  /// the defect otherwise.
  static StiefelPoint validate(Matrix x, const Dims& dims);
  static StiefelPoint validate(Matrix x);

  /// Wraps x without the orthonormality check. For results that are
  /// orthonormal by construction.
  static StiefelPoint trusted(Matrix x);

  const Matrix& matrix() const noexcept { return x_; }
  Dims dims() const { return Dims(x_.rows(), x_.cols()); }

  /// Left multiplication by a p x p orthogonal matrix.
  StiefelPoint rotated(const Matrix& u) const;

 private:
  explicit StiefelPoint(Matrix x) : x_(std::move(x)) {}
  Matrix x_;
};

/// A p x n matrix V in the tangent space at its anchor X:
/// X^T V + V^T X = 0.
class TangentVector {
 public:
  /// Checks ||X^T V + V^T X||_F < kTolTan; throws DomainError otherwise.
  static TangentVector validate(StiefelPoint anchor, Matrix v);
  static TangentVector trusted(StiefelPoint anchor, Matrix v);

  const StiefelPoint& anchor() const noexcept { return anchor_; }
  const Matrix& matrix() const noexcept { return v_; }

 private:
  TangentVector(StiefelPoint anchor, Matrix v)
      : anchor_(std::move(anchor)), v_(std::move(v)) {}
  StiefelPoint anchor_;
  Matrix v_;
};

/// Samples drawn around a center. center is empty when the set was read
/// from a file without one.
struct SampleSet {
  Dims dims;
  std::optional<StiefelPoint> center;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::vector<StiefelPoint> samples;

  std::size_t size() const noexcept { return samples.size(); }
};

/// ||X^T X - I_n||_F.
double orthonormality_defect(const Matrix& x);
/// ||X^T V + V^T X||_F.
double tangency_defect(const Matrix& x, const Matrix& v);

StiefelPoint validate_point(const Matrix& x, const Dims& dims);

/// pi_X(A) = (I - X X^T) A - X sk(X^T A). Idempotent; annihilates X S for
/// symmetric S.
TangentVector project_to_tangent(const StiefelPoint& x, const Matrix& a);

/// delta(X, Y) = ||I_n - X^T Y||_F. Symmetric in its arguments.
double discrepancy(const StiefelPoint& x, const StiefelPoint& y);
double discrepancy(const Matrix& x, const Matrix& y);

/// Q factor of a p x n standard-normal matrix. Retries once on the
/// (probability zero) rank-deficient draw.
StiefelPoint generate_center(const Dims& dims, Rng& rng);

/// X_k = exp(sigma sk(A_k)) C with A_k i.i.d. standard-normal p x p, drawn
/// in index order from rng.
SampleSet generate_samples(const StiefelPoint& center, double sigma,
                           std::size_t count, Rng& rng,
                           std::uint64_t seed_label = 0);

/// exp(epsilon sk(A)) X1 for a fresh standard-normal A.
StiefelPoint perturb_initial_guess(const StiefelPoint& x1, double epsilon,
                                   Rng& rng);

}  // namespace stiefel_kn
