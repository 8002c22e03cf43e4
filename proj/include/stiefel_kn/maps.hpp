#pragma once

#include <string>
#include <string_view>

#include "stiefel_kn/stiefel.hpp"

namespace stiefel_kn {

/// Liftings refuse pairs whose discrepancy reaches this value.
inline constexpr double kDefaultLiftingGuard = 2.0;

enum class MapKind { Polar, Orthographic };

/// Retraction/lifting combination driving the averaging iteration.
///
/// Supported: polar/polar, orthographic/orthographic and the mixed
/// polar-retraction/orthographic-lifting pair. Orthographic retraction
/// with polar lifting is rejected.
class MapPair {
 public:
  static MapPair polar_polar() { return {MapKind::Polar, MapKind::Polar}; }
  static MapPair ortho_ortho() {
    return {MapKind::Orthographic, MapKind::Orthographic};
  }
  static MapPair mixed() { return {MapKind::Polar, MapKind::Orthographic}; }

  /// Throws UnsupportedPairError for orthographic retraction + polar lifting.
  static MapPair make(MapKind retraction, MapKind lifting);

  /// Accepts "polar", "ortho", "mixed" (and the explicit spellings
  /// "polar-polar", "ortho-ortho", "polar-ortho", where the retraction
  /// comes first). "ortho-polar" is recognised and rejected.
  static MapPair parse(std::string_view name);

  MapKind retraction() const noexcept { return retraction_; }
  MapKind lifting() const noexcept { return lifting_; }
  /// "polar", "ortho" or "mixed".
  std::string name() const;

  friend bool operator==(const MapPair&, const MapPair&) = default;

 private:
  MapPair(MapKind retraction, MapKind lifting)
      : retraction_(retraction), lifting_(lifting) {}
  MapKind retraction_;
  MapKind lifting_;
};

struct CompositionDiscrepancy {
  double value = 0.0;  // Delta
  Matrix m;            // Q^T X
};

/// P_X(V) = (X + V)(I + V^T V)^{-1/2}.
StiefelPoint polar_retraction(const TangentVector& v);

/// Inverse of the polar retraction: V = Q S - X, where the symmetric
/// positive definite S solves (X^T Q) S + S (Q^T X) = 2 I (the tangency
/// condition on Q S - X). Throws DomainError when the points are too far
/// apart for the lifting to exist.
TangentVector polar_lifting(const StiefelPoint& x, const StiefelPoint& q,
                            double guard = kDefaultLiftingGuard);

/// (I - X X^T) Q + X (X^T Q - Q^T X) / 2, the tangent projection of Q - X.
TangentVector orthographic_lifting(const StiefelPoint& x,
                                   const StiefelPoint& q,
                                   double guard = kDefaultLiftingGuard);

/// Inverse of the orthographic lifting: Q = X + V + X S with S symmetric,
/// i.e. the point of the manifold reached from X + V along the normal
/// space {X S}. Throws DomainError when V is too large.
StiefelPoint orthographic_retraction(const TangentVector& v);

StiefelPoint retract(MapKind kind, const TangentVector& v);
TangentVector lift(MapKind kind, const StiefelPoint& x, const StiefelPoint& q,
                   double guard = kDefaultLiftingGuard);

/// Delta_X(Q) = delta(P_X(orthographic_lifting(X, Q)), Q), evaluated by
/// running both maps.
CompositionDiscrepancy composition_discrepancy_direct(const StiefelPoint& x,
                                                      const StiefelPoint& q);

/// Delta_X(Q) from M = Q^T X alone:
///   || I - [I + M - M (M + M^T) / 2] [2 I - (M - M^T)^2 / 4 - M M^T]^{-1/2} ||_F
CompositionDiscrepancy composition_discrepancy_closed_form(
    const StiefelPoint& x, const StiefelPoint& q);

/// Matrix-level forms of the maps, without wrapping or validation of the
/// outputs. Used by the averaging loop.
namespace detail {

Matrix polar_retraction(const Matrix& x, const Matrix& v);
Matrix orthographic_retraction(const Matrix& x, const Matrix& v);
/// Both liftings throw DomainError if delta(X, Q) >= guard.
Matrix polar_lifting(const Matrix& x, const Matrix& q, double guard);
Matrix orthographic_lifting(const Matrix& x, const Matrix& q, double guard);

/// A - X sym(X^T A): the orthographic lifting without its guard, extended
/// linearly to any p x n matrix A (the image of X itself is zero).
Matrix orthographic_projection(const Matrix& x, const Matrix& a);

Matrix retract(MapKind kind, const Matrix& x, const Matrix& v);
Matrix lift(MapKind kind, const Matrix& x, const Matrix& q, double guard);

}  // namespace detail
}  // namespace stiefel_kn
