#pragma once

#include <Eigen/Dense>

namespace stiefel_kn {

/// Dense double-precision matrix used for every shape in the library.
/// Storage is Eigen's default column-major order.
using Matrix = Eigen::MatrixXd;

namespace kernels {

/// Eigenvalue floor below which a symmetric matrix is treated as indefinite.
inline constexpr double kEpsSpd = 1e-14;
/// Relative symmetry / skewness tolerance for inputs of the kernels.
inline constexpr double kStructureTol = 1e-10;

struct OrthoSolveOptions {
  int max_iters = 100;
  double tol = 1e-12;
};

double frobenius_norm(const Matrix& a);

/// sk(A) = (A^T - A) / 2. Note the sign: transpose minus original.
Matrix skew_part(const Matrix& a);

/// (A + A^T) / 2.
Matrix sym_part(const Matrix& a);

/// Q factor of the thin QR decomposition of a p x n matrix (p >= n), with
/// the sign of each column chosen so that diag(R) >= 0.
/// Throws RankDeficientError naming the first dependent column.
Matrix thin_qr_q_factor(const Matrix& a);

/// S^{-1/2} for symmetric positive definite S, via symmetric
/// eigendecomposition. Throws DomainError for non-symmetric or
/// indefinite input (smallest eigenvalue <= kEpsSpd).
Matrix spd_inv_sqrt(const Matrix& s);

/// exp(scale * omega) for skew-symmetric omega.
///
/// Scaling and squaring around a diagonal (6,6) Pade approximant; the
/// squaring count is max(0, ceil(log2 ||scale*omega||_F)). The Pade
/// approximant of a skew matrix is orthogonal, so the result stays
/// orthogonal up to rounding.
Matrix skew_expm(const Matrix& omega, double scale);

/// Symmetric solution S of M S + S M^T = B, for B symmetric and M + M^T
/// positive definite.
///
/// The symmetric unknowns are stacked (upper triangle, n(n+1)/2 entries)
/// and the resulting dense system is solved by LU. The cost is O(n^6);
/// this is the price of the polar lifting and shows up in its runtimes.
/// Throws DomainError when M + M^T is not positive definite or the system
/// is numerically singular.
Matrix solve_lyapunov_sym(const Matrix& m, const Matrix& b);

/// Symmetric solution S, nearest zero, of
///     2 S + S^2 + G + S Omega - Omega S = 0
/// for skew Omega and symmetric G, by the fixed-point iteration
///     S <- -(S^2 + G + S Omega - Omega S) / 2,  S_0 = 0.
/// Stops when the residual drops below options.tol. Throws DomainError if
/// the iteration has not converged after options.max_iters steps.
Matrix solve_ortho_retraction_eq(const Matrix& omega, const Matrix& g,
                                 const OrthoSolveOptions& options = {});

/// Residual 2 S + S^2 + G + S Omega - Omega S.
Matrix ortho_retraction_residual(const Matrix& omega, const Matrix& g,
                                 const Matrix& s);

}  // namespace kernels
}  // namespace stiefel_kn
