#pragma once

#include "mbmp/numlin.hpp"
#include "mbmp/random.hpp"

#include <cstdint>
#include <variant>
#include <vector>

namespace mbmp {

/// Linear MIMO array: transmitter i sits at Z*tx[i]/2, receiver j at Z*rx[j]/2,
/// positions normalized to [-0.5, 0.5] and Z in wavelengths.
struct ArrayGeometry {
  std::vector<double> tx_positions;
  std::vector<double> rx_positions;
  double aperture = 0.0;

  Index transmitters() const { return static_cast<Index>(tx_positions.size()); }
  Index receivers() const { return static_cast<Index>(rx_positions.size()); }
  void validate() const;
};

struct MimoRadarOrigin {
  ArrayGeometry geometry;
  std::vector<double> grid;
};
struct GaussianOrigin {
  Seed seed = 0;
};
struct UserSupplied {};

using Provenance = std::variant<MimoRadarOrigin, GaussianOrigin, UserSupplied>;

struct Dictionary {
  ComplexMatrix matrix;
  Provenance provenance = UserSupplied{};
  bool normalized = false;

  Index rows() const { return matrix.rows(); }
  Index atoms() const { return matrix.cols(); }
};

/// Wraps a user matrix; when normalize is set every column is scaled to unit norm
/// (a zero column is rejected).
Dictionary make_dictionary(ComplexMatrix M, bool normalize = true);

/// In-place unit-norm column scaling. Throws InvalidArgument on a zero column.
void normalize_columns(ComplexMatrix& M);

/// Uniform DOA grid phi_g = -1 + 2g/Z, g = 0..Z (both endpoints included, n = Z + 1).
std::vector<double> doa_grid(double aperture);

/// a(theta) = c(theta) kron b(theta), unnormalized (norm sqrt(MN)).
ComplexVector steering_vector(const ArrayGeometry& geom, double theta);

/// Unnormalized MN x (Z+1) steering matrix over doa_grid(Z).
ComplexMatrix steering_matrix(const ArrayGeometry& geom);

/// Column-normalized MIMO radar dictionary. Throws NonIntegerAperture unless Z is a positive integer.
Dictionary mimo_radar_dictionary(const ArrayGeometry& geom);

/// Element positions i.i.d. uniform over [-0.5, 0.5].
ArrayGeometry random_geometry(Index transmitters, Index receivers, double aperture, Seed seed);

/// i.i.d. CN(0,1) entries, then unit-norm columns.
Dictionary gaussian_dictionary(Index m, Index n, Seed seed);

/// |A^H A| entry-wise; the Gram matrix every coherence-type metric is read from.
Eigen::MatrixXd abs_gram(const ComplexMatrix& A);

/// mu(A) = max_{i != j} |a_i^H a_j|.
double coherence(const Dictionary& A);
double coherence_from_gram(const Eigen::MatrixXd& Q);

/// Babel function mu1(K, A): the largest sum of K off-diagonal |a_i^H a_g| over any column g.
/// K = 0 gives 0.
double babel(const Dictionary& A, Index K);
double babel_from_gram(const Eigen::MatrixXd& Q, Index K);

/// True iff every set of s columns is linearly independent (spark(A) > s).
/// Throws TooLarge when C(n, s) exceeds the subset budget.
bool spark_exceeds(const Dictionary& A, Index s, std::uint64_t budget = 1'000'000,
                   double rtol = kDefaultRankTolerance);

/// C(n, k) saturating at UINT64_MAX.
std::uint64_t binomial(Index n, Index k);

}  // namespace mbmp
