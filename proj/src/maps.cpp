#include "stiefel_kn/maps.hpp"

#include <sstream>

#include "stiefel_kn/errors.hpp"

namespace stiefel_kn {

MapPair MapPair::make(MapKind retraction, MapKind lifting) {
  if (retraction == MapKind::Orthographic && lifting == MapKind::Polar) {
    throw UnsupportedPairError(
        "orthographic retraction with polar lifting is not a supported pair");
  }
  return {retraction, lifting};
}

MapPair MapPair::parse(std::string_view name) {
  if (name == "polar" || name == "polar-polar") return polar_polar();
  if (name == "ortho" || name == "ortho-ortho") return ortho_ortho();
  if (name == "mixed" || name == "polar-ortho") return mixed();
  if (name == "ortho-polar") return make(MapKind::Orthographic, MapKind::Polar);
  throw UnsupportedPairError("unknown map pair '" + std::string(name) +
                             "' (expected polar, ortho or mixed)");
}

std::string MapPair::name() const {
  if (retraction_ == lifting_) {
    return retraction_ == MapKind::Polar ? "polar" : "ortho";
  }
  return "mixed";
}

namespace detail {
namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream os;
    os << op << ": shape mismatch " << a.rows() << "x" << a.cols() << " vs "
       << b.rows() << "x" << b.cols();
    throw ShapeError(os.str());
  }
}

// X^T Q, after checking delta(X, Q) = ||I - X^T Q||_F < guard.
Matrix guarded_inner(const Matrix& x, const Matrix& q, double guard,
                     const char* op) {
  require_same_shape(x, q, op);
  Matrix xtq = x.transpose() * q;
  const double delta = (Matrix::Identity(x.cols(), x.cols()) - xtq).norm();
  if (!(delta < guard)) {
    std::ostringstream os;
    os << op << ": points too far apart (discrepancy " << delta
       << " >= " << guard << ")";
    throw DomainError(os.str());
  }
  return xtq;
}

}  // namespace

Matrix polar_retraction(const Matrix& x, const Matrix& v) {
  require_same_shape(x, v, "polar_retraction");
  const Eigen::Index n = x.cols();
  const Matrix gram = Matrix::Identity(n, n) + v.transpose() * v;
  return (x + v) * kernels::spd_inv_sqrt(gram);
}

Matrix orthographic_retraction(const Matrix& x, const Matrix& v) {
  require_same_shape(x, v, "orthographic_retraction");
  const Matrix xtv = x.transpose() * v;
  const Matrix omega = 0.5 * (xtv - xtv.transpose());
  const Matrix g = v.transpose() * v;
  const Matrix s = kernels::solve_ortho_retraction_eq(omega, g);
  return x + v + x * s;
}

Matrix polar_lifting(const Matrix& x, const Matrix& q, double guard) {
  const Matrix m = guarded_inner(x, q, guard, "polar_lifting");
  const Eigen::Index n = x.cols();
  const Matrix s =
      kernels::solve_lyapunov_sym(m, 2.0 * Matrix::Identity(n, n));
  if (Eigen::LLT<Matrix>(s).info() != Eigen::Success) {
    throw DomainError(
        "polar_lifting: lifting coefficient is not positive definite "
        "(points too far apart)");
  }
  return q * s - x;
}

Matrix orthographic_lifting(const Matrix& x, const Matrix& q, double guard) {
  const Matrix m = guarded_inner(x, q, guard, "orthographic_lifting");
  // (I - X X^T) Q + X (M - M^T) / 2 = Q - X (M + M^T) / 2, with M = X^T Q.
  return q - x * (0.5 * (m + m.transpose()));
}

Matrix orthographic_projection(const Matrix& x, const Matrix& a) {
  require_same_shape(x, a, "orthographic_projection");
  const Matrix m = x.transpose() * a;
  return a - x * (0.5 * (m + m.transpose()));
}

Matrix retract(MapKind kind, const Matrix& x, const Matrix& v) {
  return kind == MapKind::Polar ? polar_retraction(x, v)
                                : orthographic_retraction(x, v);
}

Matrix lift(MapKind kind, const Matrix& x, const Matrix& q, double guard) {
  return kind == MapKind::Polar ? polar_lifting(x, q, guard)
                                : orthographic_lifting(x, q, guard);
}

}  // namespace detail

StiefelPoint polar_retraction(const TangentVector& v) {
  const StiefelPoint& x = v.anchor();
  return StiefelPoint::validate(detail::polar_retraction(x.matrix(), v.matrix()),
                                x.dims());
}

StiefelPoint orthographic_retraction(const TangentVector& v) {
  const StiefelPoint& x = v.anchor();
  return StiefelPoint::validate(
      detail::orthographic_retraction(x.matrix(), v.matrix()), x.dims());
}

TangentVector polar_lifting(const StiefelPoint& x, const StiefelPoint& q,
                            double guard) {
  return TangentVector::trusted(
      x, detail::polar_lifting(x.matrix(), q.matrix(), guard));
}

TangentVector orthographic_lifting(const StiefelPoint& x,
                                   const StiefelPoint& q, double guard) {
  return TangentVector::trusted(
      x, detail::orthographic_lifting(x.matrix(), q.matrix(), guard));
}

StiefelPoint retract(MapKind kind, const TangentVector& v) {
  return kind == MapKind::Polar ? polar_retraction(v)
                                : orthographic_retraction(v);
}

TangentVector lift(MapKind kind, const StiefelPoint& x, const StiefelPoint& q,
                   double guard) {
  return kind == MapKind::Polar ? polar_lifting(x, q, guard)
                                : orthographic_lifting(x, q, guard);
}

CompositionDiscrepancy composition_discrepancy_direct(const StiefelPoint& x,
                                                      const StiefelPoint& q) {
  const Matrix composed = detail::polar_retraction(
      x.matrix(),
      detail::orthographic_lifting(x.matrix(), q.matrix(), kDefaultLiftingGuard));
  return {discrepancy(composed, q.matrix()),
          q.matrix().transpose() * x.matrix()};
}

CompositionDiscrepancy composition_discrepancy_closed_form(
    const StiefelPoint& x, const StiefelPoint& q) {
  if (x.dims() != q.dims()) {
    throw ShapeError("composition_discrepancy_closed_form: dimension mismatch");
  }
  const Matrix m = q.matrix().transpose() * x.matrix();
  const Eigen::Index n = m.rows();
  const Matrix ident = Matrix::Identity(n, n);
  const Matrix skew = m - m.transpose();
  const Matrix bracket = 2.0 * ident - 0.25 * skew * skew - m * m.transpose();
  const Matrix lead = ident + m - 0.5 * m * (m + m.transpose());
  Matrix inv_sqrt;
  try {
    inv_sqrt = kernels::spd_inv_sqrt(bracket);
  } catch (const DomainError& e) {
    throw DomainError(
        std::string("composition_discrepancy_closed_form: points too far "
                    "apart: ") +
        e.what());
  }
  return {(ident - lead * inv_sqrt).norm(), m};
}

}  // namespace stiefel_kn
