#pragma once

#include "mbmp/dictionary.hpp"
#include "mbmp/pursuit.hpp"
#include "mbmp/random.hpp"

#include <cstdint>

namespace mbmp {

/// K targets on grid indices `support` with unit-modulus gains exp(-j phi), phi ~ U[0, 2pi).
struct TargetScene {
  IndexList support;    // sorted ascending
  ComplexMatrix gains;  // K x l

  Index snapshots() const { return gains.cols(); }
};

/// Support drawn uniformly without replacement from 0..n-1; deterministic per seed.
TargetScene generate_scene(Index n, Index K, Index l, Seed seed);

/// Sparse n x l signal X with rows `support` equal to the gains.
ComplexMatrix scene_signal(const TargetScene& scene, Index n);

/// A_S * gains.
ComplexMatrix noiseless_observations(const Dictionary& A, const TargetScene& scene);

/// sigma^2 = 10^(-snr_db / 10); zero for an infinite SNR.
double noise_variance(double snr_db);

/// Y = Y0 + E with E i.i.d. CN(0, sigma^2).
ObservationSet add_noise(const ComplexMatrix& Y0, double snr_db, Seed seed);

/// Discrete MUSIC: the K atoms with the largest ||a_g^H orth(Y)||_2 (ties to the smaller index).
IndexList music_discrete(const ComplexMatrix& Y, const Dictionary& A, Index K);

/// Discrete beamforming for one snapshot: the K atoms with the largest |a_g^H y|.
IndexList beamform_smv(const ComplexMatrix& y, const Dictionary& A, Index K);

/// True iff the two supports differ as sets. Throws CardinalityMismatch on different sizes.
bool support_error(std::span<const Index> estimated, std::span<const Index> truth);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval for a binomial proportion; z defaults to the 95% quantile.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.959963984540054);

}  // namespace mbmp
