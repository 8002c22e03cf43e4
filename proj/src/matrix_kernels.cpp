#include "stiefel_kn/matrix_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "stiefel_kn/errors.hpp"

namespace stiefel_kn::kernels {
namespace {

void require_square(const Matrix& a, const char* op) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    std::ostringstream os;
    os << op << ": expected a non-empty square matrix, got " << a.rows() << "x"
       << a.cols();
    throw ShapeError(os.str());
  }
}

double structure_scale(const Matrix& a) {
  return kStructureTol * std::max(1.0, a.norm());
}

void require_symmetric(const Matrix& a, const char* op) {
  const double defect = (a - a.transpose()).norm();
  if (defect > structure_scale(a)) {
    std::ostringstream os;
    os << op << ": matrix is not symmetric (||A - A^T||_F = " << defect << ")";
    throw DomainError(os.str());
  }
}

void require_skew(const Matrix& a, const char* op) {
  const double defect = (a + a.transpose()).norm();
  if (defect > structure_scale(a)) {
    std::ostringstream os;
    os << op << ": matrix is not skew-symmetric (||A + A^T||_F = " << defect
       << ")";
    throw DomainError(os.str());
  }
}

}  // namespace

double frobenius_norm(const Matrix& a) { return a.norm(); }

Matrix skew_part(const Matrix& a) {
  require_square(a, "skew_part");
  return 0.5 * (a.transpose() - a);
}

Matrix sym_part(const Matrix& a) {
  require_square(a, "sym_part");
  return 0.5 * (a + a.transpose());
}

Matrix thin_qr_q_factor(const Matrix& a) {
  const auto p = a.rows();
  const auto n = a.cols();
  if (n == 0 || p < n) {
    std::ostringstream os;
    os << "thin_qr_q_factor: need p >= n >= 1, got " << p << "x" << n;
    throw ShapeError(os.str());
  }
  Eigen::HouseholderQR<Matrix> qr(a);
  const Matrix& packed = qr.matrixQR();
  double scale = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) scale = std::max(scale, a.col(j).norm());
  const double tol = 1e-12 * std::max(scale, 1e-300);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!(std::abs(packed(j, j)) > tol)) {
      std::ostringstream os;
      os << "thin_qr_q_factor: rank-deficient input, column " << j
         << " has |R_jj| = " << std::abs(packed(j, j));
      throw RankDeficientError(os.str(), static_cast<std::size_t>(j));
    }
  }
  Matrix q = qr.householderQ() * Matrix::Identity(p, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (packed(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

Matrix spd_inv_sqrt(const Matrix& s) {
  require_square(s, "spd_inv_sqrt");
  require_symmetric(s, "spd_inv_sqrt");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym_part(s));
  if (eig.info() != Eigen::Success) {
    throw DomainError("spd_inv_sqrt: eigendecomposition failed");
  }
  const auto& lambda = eig.eigenvalues();
  if (!(lambda.minCoeff() > kEpsSpd)) {
    std::ostringstream os;
    os << "spd_inv_sqrt: matrix is not positive definite (smallest eigenvalue "
       << lambda.minCoeff() << ")";
    throw DomainError(os.str());
  }
  const Matrix& u = eig.eigenvectors();
  Matrix r = u * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * u.transpose();
  return 0.5 * (r + r.transpose());
}

Matrix skew_expm(const Matrix& omega, double scale) {
  require_square(omega, "skew_expm");
  require_skew(omega, "skew_expm");
  const auto p = omega.rows();
  const Matrix a0 = scale * omega;
  const double norm = a0.norm();
  if (norm == 0.0) return Matrix::Identity(p, p);

  const int squarings =
      std::max(0, static_cast<int>(std::ceil(std::log2(norm))));
  const Matrix a = std::ldexp(1.0, -squarings) * a0;

  // Diagonal Pade coefficients, degree 6.
  constexpr int kDegree = 6;
  double c[kDegree + 1];
  c[0] = 1.0;
  for (int k = 0; k < kDegree; ++k) {
    c[k + 1] = c[k] * (kDegree - k) / ((k + 1.0) * (2.0 * kDegree - k));
  }
  const Matrix ident = Matrix::Identity(p, p);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix even = c[0] * ident + c[2] * a2 + c[4] * a4 + c[6] * a6;
  const Matrix odd = a * (c[1] * ident + c[3] * a2 + c[5] * a4);
  Matrix result = (even - odd).partialPivLu().solve(even + odd);
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

Matrix solve_lyapunov_sym(const Matrix& m, const Matrix& b) {
  require_square(m, "solve_lyapunov_sym");
  require_square(b, "solve_lyapunov_sym");
  if (m.rows() != b.rows()) {
    throw ShapeError("solve_lyapunov_sym: M and B differ in size");
  }
  require_symmetric(b, "solve_lyapunov_sym");
  const Eigen::Index n = m.rows();

  Eigen::LLT<Matrix> llt(m + m.transpose());
  if (llt.info() != Eigen::Success) {
    throw DomainError(
        "solve_lyapunov_sym: M + M^T is not positive definite "
        "(arguments too far apart)");
  }

  // Unknown (k, l), k <= l, lives at column-packed upper-triangle index.
  auto index = [n](Eigen::Index k, Eigen::Index l) {
    if (k > l) std::swap(k, l);
    return l * (l + 1) / 2 + k;
  };
  const Eigen::Index unknowns = n * (n + 1) / 2;
  Matrix system = Matrix::Zero(unknowns, unknowns);
  Eigen::VectorXd rhs(unknowns);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const Eigen::Index row = index(i, j);
      rhs(row) = b(i, j);
      // (M S)_ij + (S M^T)_ij = sum_k M_ik S_kj + S_ik M_jk
      for (Eigen::Index k = 0; k < n; ++k) {
        system(row, index(k, j)) += m(i, k);
        system(row, index(i, k)) += m(j, k);
      }
    }
  }
  Eigen::PartialPivLU<Matrix> lu(system);
  if (!(lu.rcond() > 1e-14)) {
    throw DomainError(
        "solve_lyapunov_sym: system is numerically singular "
        "(eigenvalue pairing lambda_i + lambda_j ~ 0; arguments too far apart)");
  }
  const Eigen::VectorXd packed = lu.solve(rhs);
  Matrix s(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      s(i, j) = s(j, i) = packed(index(i, j));
    }
  }
  return s;
}

Matrix ortho_retraction_residual(const Matrix& omega, const Matrix& g,
                                 const Matrix& s) {
  return 2.0 * s + s * s + g + s * omega - omega * s;
}

Matrix solve_ortho_retraction_eq(const Matrix& omega, const Matrix& g,
                                 const OrthoSolveOptions& options) {
  require_square(omega, "solve_ortho_retraction_eq");
  require_square(g, "solve_ortho_retraction_eq");
  if (omega.rows() != g.rows()) {
    throw ShapeError("solve_ortho_retraction_eq: Omega and G differ in size");
  }
  const Eigen::Index n = g.rows();
  Matrix s = Matrix::Zero(n, n);
  for (int it = 0; it < options.max_iters; ++it) {
    // The residual equals 2 (S - S_next), so it is available for free.
    Matrix next = -0.5 * (s * s + g + s * omega - omega * s);
    next = (0.5 * (next + next.transpose())).eval();
    const double residual = 2.0 * (s - next).norm();
    s = std::move(next);
    if (!std::isfinite(residual)) break;
    if (residual < options.tol) return s;
  }
  const double final_residual =
      ortho_retraction_residual(omega, g, s).norm();
  if (final_residual < options.tol) return s;
  std::ostringstream os;
  os << "solve_ortho_retraction_eq: no convergence after " << options.max_iters
     << " iterations (residual " << final_residual
     << "); tangent vector outside the orthographic retraction's domain";
  throw DomainError(os.str());
}

}  // namespace stiefel_kn::kernels
