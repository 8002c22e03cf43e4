#include "stiefel_kn/stiefel.hpp"

#include <sstream>

#include "stiefel_kn/errors.hpp"

namespace stiefel_kn {

Dims::Dims(Eigen::Index p, Eigen::Index n) : p_(p), n_(n) {
  if (n < 1 || n > p) {
    std::ostringstream os;
    os << "invalid Stiefel dimensions p=" << p << ", n=" << n
       << " (need 1 <= n <= p)";
    throw ShapeError(os.str());
  }
}

double orthonormality_defect(const Matrix& x) {
  return (x.transpose() * x - Matrix::Identity(x.cols(), x.cols())).norm();
}

double tangency_defect(const Matrix& x, const Matrix& v) {
  const Matrix xtv = x.transpose() * v;
  return (xtv + xtv.transpose()).norm();
}

StiefelPoint StiefelPoint::validate(Matrix x, const Dims& dims) {
  if (x.rows() != dims.p() || x.cols() != dims.n()) {
    std::ostringstream os;
    os << "expected a " << dims.p() << "x" << dims.n() << " matrix, got "
       << x.rows() << "x" << x.cols();
    throw ShapeError(os.str());
  }
  const double defect = orthonormality_defect(x);
  if (!(defect < kTolOrth)) {
    std::ostringstream os;
    os << "matrix is not on St(" << dims.p() << "," << dims.n()
       << "): orthonormality defect " << defect;
    throw NotOnManifoldError(os.str(), defect);
  }
  return StiefelPoint(std::move(x));
}

StiefelPoint StiefelPoint::validate(Matrix x) {
  const Dims dims(x.rows(), x.cols());
  return validate(std::move(x), dims);
}

StiefelPoint StiefelPoint::trusted(Matrix x) { return StiefelPoint(std::move(x)); }

StiefelPoint StiefelPoint::rotated(const Matrix& u) const {
  if (u.rows() != x_.rows() || u.cols() != x_.rows()) {
    throw ShapeError("rotated: rotation must be p x p");
  }
  return validate(u * x_);
}

TangentVector TangentVector::validate(StiefelPoint anchor, Matrix v) {
  const Matrix& x = anchor.matrix();
  if (v.rows() != x.rows() || v.cols() != x.cols()) {
    throw ShapeError("tangent vector shape differs from its anchor");
  }
  const double defect = tangency_defect(x, v);
  if (!(defect < kTolTan)) {
    std::ostringstream os;
    os << "matrix is not tangent at its anchor: tangency defect " << defect;
    throw DomainError(os.str());
  }
  return TangentVector(std::move(anchor), std::move(v));
}

TangentVector TangentVector::trusted(StiefelPoint anchor, Matrix v) {
  return TangentVector(std::move(anchor), std::move(v));
}

StiefelPoint validate_point(const Matrix& x, const Dims& dims) {
  return StiefelPoint::validate(x, dims);
}

TangentVector project_to_tangent(const StiefelPoint& x, const Matrix& a) {
  const Matrix& xm = x.matrix();
  if (a.rows() != xm.rows() || a.cols() != xm.cols()) {
    throw ShapeError("project_to_tangent: A must have the shape of X");
  }
  const Matrix xta = xm.transpose() * a;
  // (I - X X^T) A - X sk(X^T A) = A - X (X^T A + sk(X^T A))
  Matrix v = a - xm * (xta + kernels::skew_part(xta));
  return TangentVector::trusted(x, std::move(v));
}

double discrepancy(const Matrix& x, const Matrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw ShapeError("discrepancy: points have different dimensions");
  }
  return (Matrix::Identity(x.cols(), x.cols()) - x.transpose() * y).norm();
}

double discrepancy(const StiefelPoint& x, const StiefelPoint& y) {
  return discrepancy(x.matrix(), y.matrix());
}

StiefelPoint generate_center(const Dims& dims, Rng& rng) {
  for (int attempt = 0;; ++attempt) {
    try {
      return StiefelPoint::validate(
          kernels::thin_qr_q_factor(rng.gaussian_matrix(dims.p(), dims.n())),
          dims);
    } catch (const RankDeficientError&) {
      if (attempt > 0) throw;
    }
  }
}

SampleSet generate_samples(const StiefelPoint& center, double sigma,
                           std::size_t count, Rng& rng,
                           std::uint64_t seed_label) {
  if (!(sigma >= 0.0)) {
    throw DomainError("generate_samples: sigma must be nonnegative");
  }
  const Dims dims = center.dims();
  SampleSet set{dims, center, sigma, seed_label, {}};
  set.samples.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const Matrix omega =
        kernels::skew_part(rng.gaussian_matrix(dims.p(), dims.p()));
    set.samples.push_back(StiefelPoint::validate(
        kernels::skew_expm(omega, sigma) * center.matrix(), dims));
  }
  return set;
}

StiefelPoint perturb_initial_guess(const StiefelPoint& x1, double epsilon,
                                   Rng& rng) {
  if (!(epsilon > 0.0)) {
    throw DomainError("perturb_initial_guess: epsilon must be positive");
  }
  const Eigen::Index p = x1.matrix().rows();
  const Matrix omega = kernels::skew_part(rng.gaussian_matrix(p, p));
  return StiefelPoint::validate(kernels::skew_expm(omega, epsilon) * x1.matrix(),
                                x1.dims());
}

}  // namespace stiefel_kn
