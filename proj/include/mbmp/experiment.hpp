#pragma once

#include "mbmp/harness.hpp"
#include "mbmp/pursuit.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace mbmp {

enum class ExperimentKind { Condition, Recovery };
enum class DictionaryKind { MimoRadar, Gaussian, Identity };

/// Measurement configuration of one sweep point: M x N array elements for MIMO radar,
/// M rows (N = 1) for Gaussian and identity dictionaries.
struct ArrayShape {
  Index M = 0;
  Index N = 1;

  Index rows() const { return M * N; }
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Recovery;
  DictionaryKind dictionary = DictionaryKind::MimoRadar;
  double aperture = 0.0;  // Z, MIMO radar only
  Index atoms = 0;        // n, Gaussian and identity only
  Index K = 1;
  Index snapshots = 1;
  std::vector<double> snr_db{std::numeric_limits<double>::infinity()};
  std::vector<ArrayShape> shapes;
  std::vector<BranchVector> branch_vectors;
  std::vector<Index> d1_values{1, 2, 3, 4};
  bool music = false;
  bool beamform = false;
  std::uint64_t trials = 1;
  Seed seed = 0;
  std::string out;
  PursuitConfig pursuit;

  Index atom_count() const;
  void validate() const;
};

/// Flat key=value text, one entry per line, '#' starts a comment. Keys: kind, dictionary,
/// Z, M, N, m, n, K, l, snr_db, mn, branch_vectors, baselines, d1, trials, seed, out.
ExperimentConfig parse_experiment_config(std::istream& in);
ExperimentConfig parse_experiment_config(const std::filesystem::path& path);

struct ConditionRow {
  Index measurements = 0;
  std::string condition;  // "coherence", "cumulative-coherence" or the d1 value
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;
  Interval ci95;

  double probability() const { return static_cast<double>(hits) / static_cast<double>(trials); }
};

struct RecoveryRow {
  std::string method;
  double param = 0.0;
  std::uint64_t errors = 0;
  std::uint64_t trials = 0;
  Interval ci95;
  double mean_ms = 0.0;
  double mean_nodes = 0.0;

  double error_probability() const { return static_cast<double>(errors) / static_cast<double>(trials); }
};

/// Dictionary of one trial; pure function of (config, shape, seed).
Dictionary draw_dictionary(const ExperimentConfig& cfg, const ArrayShape& shape, Seed seed);

/// Probability that coherence, cumulative coherence and MB-coherence(empty set, d1) hold
/// (noiseless) over fresh dictionary draws at each sweep point.
std::vector<ConditionRow> run_condition_sweep(const ExperimentConfig& cfg);

/// Support-recovery error probability per method and sweep point. The swept parameter is
/// the SNR when several snr_db values are given, otherwise the number of measurements.
std::vector<RecoveryRow> run_recovery_sweep(const ExperimentConfig& cfg);

/// Header `MN;d1;prob;ci95;trials`.
std::string to_csv(const std::vector<ConditionRow>& rows);
/// Header `method;param;error_prob;ci95;mean_ms;mean_nodes`.
std::string to_csv(const std::vector<RecoveryRow>& rows);

/// Runs whichever sweep the config names and returns its CSV.
std::string run_experiment(const ExperimentConfig& cfg);

}  // namespace mbmp
