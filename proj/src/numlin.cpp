#include "mbmp/numlin.hpp"

#include "mbmp/error.hpp"

#include <cmath>
#include <string>

namespace mbmp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ZeroMatrix: return "ZeroMatrix";
    case ErrorCode::RankDeficientSupport: return "RankDeficientSupport";
    case ErrorCode::NonIntegerAperture: return "NonIntegerAperture";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::NotEnoughCandidates: return "NotEnoughCandidates";
    case ErrorCode::InfiniteMargin: return "InfiniteMargin";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::OIRTooLarge: return "OIRTooLarge";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::CardinalityMismatch: return "CardinalityMismatch";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

namespace numlin {

void require_valid(const ComplexMatrix& M, const char* what) {
  if (M.rows() < 1 || M.cols() < 1) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " is empty");
  }
  if (!M.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " has a non-finite entry");
  }
}

double max_abs(const ComplexMatrix& M) {
  return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff();
}

Index numerical_rank(const ComplexMatrix& M, double rtol) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<ComplexMatrix> svd(M);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > rtol * sv(0)) ++r;
  }
  return r;
}

ComplexMatrix columns(const ComplexMatrix& A, std::span<const Index> S) {
  ComplexMatrix out(A.rows(), static_cast<Index>(S.size()));
  for (std::size_t k = 0; k < S.size(); ++k) {
    if (S[k] < 0 || S[k] >= A.cols()) {
      throw Error(ErrorCode::InvalidArgument, "column index " + std::to_string(S[k]) + " out of range");
    }
    out.col(static_cast<Index>(k)) = A.col(S[k]);
  }
  return out;
}

OrthonormalBasis orthonormal_basis(const ComplexMatrix& M, double rtol) {
  require_valid(M, "orthonormal_basis input");
  if (!(rtol > 0.0)) throw Error(ErrorCode::InvalidArgument, "rtol must be positive");
  if (max_abs(M) < kZeroMatrixFloor) throw Error(ErrorCode::ZeroMatrix, "all entries below 1e-14");

  Eigen::JacobiSVD<ComplexMatrix> svd(M, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > rtol * sv(0)) ++r;
  }
  return {svd.matrixU().leftCols(r), r};
}

namespace {

// Thin Q factor of A_S after confirming full column rank.
ComplexMatrix thin_q(const ComplexMatrix& A_S, double rtol) {
  if (numerical_rank(A_S, rtol) < A_S.cols()) {
    throw Error(ErrorCode::RankDeficientSupport,
                "support of size " + std::to_string(A_S.cols()) + " is numerically rank deficient");
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(A_S);
  return qr.householderQ() * ComplexMatrix::Identity(A_S.rows(), A_S.cols());
}

}  // namespace

ComplexMatrix project_out(const ComplexMatrix& A, std::span<const Index> S, const ComplexMatrix& M,
                          double rtol) {
  if (M.rows() != A.rows()) throw Error(ErrorCode::InvalidArgument, "project_out: row mismatch");
  if (S.empty()) return M;
  if (static_cast<Index>(S.size()) > A.rows()) {
    throw Error(ErrorCode::RankDeficientSupport, "support larger than the number of rows");
  }
  const ComplexMatrix Q = thin_q(columns(A, S), rtol);
  return M - Q * (Q.adjoint() * M);
}

ComplexMatrix least_squares(const ComplexMatrix& A_S, const ComplexMatrix& Y, double rtol) {
  if (A_S.rows() != Y.rows()) throw Error(ErrorCode::InvalidArgument, "least_squares: row mismatch");
  if (A_S.cols() > A_S.rows() || numerical_rank(A_S, rtol) < A_S.cols()) {
    throw Error(ErrorCode::RankDeficientSupport, "least_squares: A_S is rank deficient");
  }
  return Eigen::HouseholderQR<ComplexMatrix>(A_S).solve(Y);
}

ComplexMatrix gram_square_root(const ComplexMatrix& Y) {
  const Index m = Y.rows();
  if (Y.cols() <= m) return Y;
  Eigen::HouseholderQR<ComplexMatrix> qr(Y.adjoint());
  const ComplexMatrix R = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
  return R.adjoint();
}

double l1_norm(const ComplexVector& v) { return v.cwiseAbs().sum(); }

}  // namespace numlin
}  // namespace mbmp
