#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace mbmp {

using Index = std::ptrdiff_t;
using IndexList = std::vector<Index>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kDefaultRankTolerance = 1e-10;
inline constexpr double kZeroMatrixFloor = 1e-14;

/// Orthonormal basis U (m x r) of a column space; U^H U = I_r.
struct OrthonormalBasis {
  ComplexMatrix matrix;
  Index rank = 0;
};

namespace numlin {

/// Throws InvalidArgument if M is empty or has a non-finite entry.
void require_valid(const ComplexMatrix& M, const char* what);

double max_abs(const ComplexMatrix& M);

/// Numerical rank: number of singular values above rtol * sigma_max.
Index numerical_rank(const ComplexMatrix& M, double rtol = kDefaultRankTolerance);

/// Columns of A listed in S, in the given order.
ComplexMatrix columns(const ComplexMatrix& A, std::span<const Index> S);

/// Orthonormal basis of range(M) from the thin SVD. Throws ZeroMatrix when every
/// entry of M is below 1e-14 in magnitude.
OrthonormalBasis orthonormal_basis(const ComplexMatrix& M, double rtol = kDefaultRankTolerance);

/// Pi_perp(A_S) * M. Computed from a QR of A_S; the m x m projector is never formed.
/// Throws RankDeficientSupport when A_S is numerically rank deficient.
ComplexMatrix project_out(const ComplexMatrix& A, std::span<const Index> S, const ComplexMatrix& M,
                          double rtol = kDefaultRankTolerance);

/// argmin_X ||Y - A_S X||_F for full-column-rank A_S.
ComplexMatrix least_squares(const ComplexMatrix& A_S, const ComplexMatrix& Y,
                            double rtol = kDefaultRankTolerance);

/// Returns an m x m matrix L with L L^H = Y Y^H (the Cholesky factor of Y Y^H,
/// obtained from a QR of Y^H). Used to shrink Y when it has more columns than rows.
ComplexMatrix gram_square_root(const ComplexMatrix& Y);

/// Entry-wise l1 norm sum_i |v_i|.
double l1_norm(const ComplexVector& v);

}  // namespace numlin
}  // namespace mbmp
