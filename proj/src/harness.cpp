#include "mbmp/harness.hpp"

#include "mbmp/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace mbmp {

TargetScene generate_scene(Index n, Index K, Index l, Seed seed) {
  if (K < 1 || K > n || l < 1) throw Error(ErrorCode::InvalidArgument, "generate_scene requires 1 <= K <= n, l >= 1");
  Rng rng(seed);
  IndexList pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Index{0});
  // partial Fisher-Yates
  for (Index i = 0; i < K; ++i) {
    std::uniform_int_distribution<Index> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  TargetScene scene;
  scene.support.assign(pool.begin(), pool.begin() + K);
  std::sort(scene.support.begin(), scene.support.end());

  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  scene.gains.resize(K, l);
  for (Index p = 0; p < l; ++p) {
    for (Index k = 0; k < K; ++k) scene.gains(k, p) = std::polar(1.0, -phase(rng));
  }
  return scene;
}

ComplexMatrix scene_signal(const TargetScene& scene, Index n) {
  ComplexMatrix X = ComplexMatrix::Zero(n, scene.snapshots());
  for (std::size_t k = 0; k < scene.support.size(); ++k) X.row(scene.support[k]) = scene.gains.row(static_cast<Index>(k));
  return X;
}

ComplexMatrix noiseless_observations(const Dictionary& A, const TargetScene& scene) {
  return numlin::columns(A.matrix, scene.support) * scene.gains;
}

double noise_variance(double snr_db) {
  if (std::isinf(snr_db) && snr_db > 0) return 0.0;
  return std::pow(10.0, -snr_db / 10.0);
}

ObservationSet add_noise(const ComplexMatrix& Y0, double snr_db, Seed seed) {
  const double variance = noise_variance(snr_db);
  ObservationSet obs;
  obs.Y = Y0;
  if (variance > 0.0) {
    Rng rng(seed);
    for (Index p = 0; p < Y0.cols(); ++p) {
      for (Index i = 0; i < Y0.rows(); ++i) obs.Y(i, p) += complex_gaussian(rng, variance);
    }
  }
  return obs;
}

namespace {

IndexList top_k(const Eigen::VectorXd& score, Index K) {
  if (K < 1 || K > score.size()) throw Error(ErrorCode::InvalidArgument, "top_k requires 1 <= K <= n");
  IndexList order(static_cast<std::size_t>(score.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::partial_sort(order.begin(), order.begin() + K, order.end(),
                    [&](Index a, Index b) { return score(a) > score(b) || (score(a) == score(b) && a < b); });
  order.resize(static_cast<std::size_t>(K));
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace

IndexList music_discrete(const ComplexMatrix& Y, const Dictionary& A, Index K) {
  if (Y.cols() < 2) throw Error(ErrorCode::InvalidArgument, "MUSIC needs more than one snapshot");
  if (Y.rows() != A.rows()) throw Error(ErrorCode::InvalidArgument, "rows(Y) != rows(A)");
  const ComplexMatrix U = numlin::orthonormal_basis(Y).matrix;
  return top_k((U.adjoint() * A.matrix).colwise().norm().transpose(), K);
}

IndexList beamform_smv(const ComplexMatrix& y, const Dictionary& A, Index K) {
  if (y.cols() != 1) throw Error(ErrorCode::InvalidArgument, "beamforming takes a single snapshot");
  if (y.rows() != A.rows()) throw Error(ErrorCode::InvalidArgument, "rows(y) != rows(A)");
  return top_k((A.matrix.adjoint() * y).cwiseAbs(), K);
}

bool support_error(std::span<const Index> estimated, std::span<const Index> truth) {
  if (estimated.size() != truth.size()) {
    throw Error(ErrorCode::CardinalityMismatch, "supports of size " + std::to_string(estimated.size()) + " and " +
                                                    std::to_string(truth.size()));
  }
  IndexList a(estimated.begin(), estimated.end());
  IndexList b(truth.begin(), truth.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a != b;
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0 || successes > trials) throw Error(ErrorCode::InvalidArgument, "bad binomial counts");
  const double nt = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / nt;
  const double z2 = z * z;
  const double center = (p + z2 / (2 * nt)) / (1 + z2 / nt);
  const double half = z / (1 + z2 / nt) * std::sqrt(p * (1 - p) / nt + z2 / (4 * nt * nt));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace mbmp
