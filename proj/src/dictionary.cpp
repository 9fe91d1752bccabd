#include "mbmp/dictionary.hpp"

#include "mbmp/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

namespace mbmp {

void ArrayGeometry::validate() const {
  if (tx_positions.empty() || rx_positions.empty()) {
    throw Error(ErrorCode::InvalidArgument, "geometry needs at least one transmitter and one receiver");
  }
  if (!(aperture > 0.0) || !std::isfinite(aperture)) {
    throw Error(ErrorCode::InvalidArgument, "aperture must be positive");
  }
  auto inside = [](double p) { return p >= -0.5 && p <= 0.5; };
  if (!std::all_of(tx_positions.begin(), tx_positions.end(), inside) ||
      !std::all_of(rx_positions.begin(), rx_positions.end(), inside)) {
    throw Error(ErrorCode::InvalidArgument, "element positions must lie in [-0.5, 0.5]");
  }
}

void normalize_columns(ComplexMatrix& M) {
  for (Index g = 0; g < M.cols(); ++g) {
    const double norm = M.col(g).norm();
    if (!(norm > 0.0)) throw Error(ErrorCode::InvalidArgument, "column " + std::to_string(g) + " is zero");
    M.col(g) /= norm;
  }
}

Dictionary make_dictionary(ComplexMatrix M, bool normalize) {
  numlin::require_valid(M, "dictionary");
  if (normalize) normalize_columns(M);
  return {std::move(M), UserSupplied{}, normalize};
}

std::vector<double> doa_grid(double aperture) {
  if (!(aperture >= 1.0) || std::floor(aperture) != aperture) {
    throw Error(ErrorCode::NonIntegerAperture, "aperture Z = " + std::to_string(aperture) + " is not a positive integer");
  }
  const auto Z = static_cast<Index>(aperture);
  std::vector<double> grid(static_cast<std::size_t>(Z + 1));
  for (Index g = 0; g <= Z; ++g) grid[static_cast<std::size_t>(g)] = -1.0 + 2.0 * static_cast<double>(g) / aperture;
  return grid;
}

ComplexVector steering_vector(const ArrayGeometry& geom, double theta) {
  const Index M = geom.transmitters();
  const Index N = geom.receivers();
  const double k = 2.0 * std::numbers::pi * geom.aperture * theta;
  ComplexVector a(M * N);
  for (Index i = 0; i < M; ++i) {
    for (Index j = 0; j < N; ++j) {
      a(i * N + j) = std::polar(1.0, k * (geom.tx_positions[static_cast<std::size_t>(i)] +
                                          geom.rx_positions[static_cast<std::size_t>(j)]));
    }
  }
  return a;
}

ComplexMatrix steering_matrix(const ArrayGeometry& geom) {
  geom.validate();
  const auto grid = doa_grid(geom.aperture);
  ComplexMatrix A(geom.transmitters() * geom.receivers(), static_cast<Index>(grid.size()));
  for (std::size_t g = 0; g < grid.size(); ++g) A.col(static_cast<Index>(g)) = steering_vector(geom, grid[g]);
  return A;
}

Dictionary mimo_radar_dictionary(const ArrayGeometry& geom) {
  ComplexMatrix A = steering_matrix(geom);
  normalize_columns(A);
  return {std::move(A), MimoRadarOrigin{geom, doa_grid(geom.aperture)}, true};
}

ArrayGeometry random_geometry(Index transmitters, Index receivers, double aperture, Seed seed) {
  if (transmitters < 1 || receivers < 1) {
    throw Error(ErrorCode::InvalidArgument, "need at least one transmitter and one receiver");
  }
  Rng rng(seed);
  std::uniform_real_distribution<double> uniform(-0.5, 0.5);
  ArrayGeometry geom;
  geom.aperture = aperture;
  geom.tx_positions.resize(static_cast<std::size_t>(transmitters));
  geom.rx_positions.resize(static_cast<std::size_t>(receivers));
  for (auto& p : geom.tx_positions) p = uniform(rng);
  for (auto& p : geom.rx_positions) p = uniform(rng);
  return geom;
}

Dictionary gaussian_dictionary(Index m, Index n, Seed seed) {
  if (m < 1 || n < 1) throw Error(ErrorCode::InvalidArgument, "gaussian_dictionary needs m, n >= 1");
  Rng rng(seed);
  ComplexMatrix A(m, n);
  for (Index g = 0; g < n; ++g) {
    for (Index i = 0; i < m; ++i) A(i, g) = complex_gaussian(rng);
  }
  normalize_columns(A);
  return {std::move(A), GaussianOrigin{seed}, true};
}

Eigen::MatrixXd abs_gram(const ComplexMatrix& A) {
  return (A.adjoint() * A).cwiseAbs();
}

double coherence_from_gram(const Eigen::MatrixXd& Q) {
  double mu = 0.0;
  for (Index j = 0; j < Q.cols(); ++j) {
    for (Index i = 0; i < Q.rows(); ++i) {
      if (i != j) mu = std::max(mu, Q(i, j));
    }
  }
  return mu;
}

double coherence(const Dictionary& A) { return coherence_from_gram(abs_gram(A.matrix)); }

double babel_from_gram(const Eigen::MatrixXd& Q, Index K) {
  const Index n = Q.cols();
  if (K < 0 || K >= n) throw Error(ErrorCode::InvalidArgument, "babel requires 0 <= K < n");
  if (K == 0) return 0.0;
  double best = 0.0;
  std::vector<double> column;
  column.reserve(static_cast<std::size_t>(n));
  for (Index g = 0; g < n; ++g) {
    column.clear();
    for (Index i = 0; i < n; ++i) {
      if (i != g) column.push_back(Q(i, g));
    }
    std::partial_sort(column.begin(), column.begin() + K, column.end(), std::greater<>());
    double sum = 0.0;
    for (Index i = 0; i < K; ++i) sum += column[static_cast<std::size_t>(i)];
    best = std::max(best, sum);
  }
  return best;
}

double babel(const Dictionary& A, Index K) { return babel_from_gram(abs_gram(A.matrix), K); }

std::uint64_t binomial(Index n, Index k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 acc = 1;
  for (Index i = 1; i <= k; ++i) {
    acc = acc * static_cast<unsigned __int128>(n - k + i) / static_cast<unsigned __int128>(i);
    if (acc > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(acc);
}

bool spark_exceeds(const Dictionary& A, Index s, std::uint64_t budget, double rtol) {
  const Index n = A.atoms();
  if (s < 0 || s > n) throw Error(ErrorCode::InvalidArgument, "spark_exceeds requires 0 <= s <= n");
  if (s == 0) return true;
  if (s > A.rows()) return false;
  if (binomial(n, s) > budget) {
    throw Error(ErrorCode::TooLarge, "C(" + std::to_string(n) + "," + std::to_string(s) + ") subsets exceed budget");
  }
  IndexList subset(static_cast<std::size_t>(s));
  for (Index i = 0; i < s; ++i) subset[static_cast<std::size_t>(i)] = i;
  while (true) {
    if (numlin::numerical_rank(numlin::columns(A.matrix, subset), rtol) < s) return false;
    // next combination in lexicographic order
    Index i = s - 1;
    while (i >= 0 && subset[static_cast<std::size_t>(i)] == n - s + i) --i;
    if (i < 0) return true;
    ++subset[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < s; ++j) subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
  }
}

}  // namespace mbmp
