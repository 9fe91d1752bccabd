#pragma once

#include "mbmp/dictionary.hpp"
#include "mbmp/numlin.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mbmp {

/// Per-level branch counts d = [d_1, ..., d_K] of the pursuit tree. The last entry
/// is forced to 1: extra branches below level K cannot lower the objective.
class BranchVector {
 public:
  explicit BranchVector(std::vector<Index> counts);
  static BranchVector chain(Index K) { return BranchVector(std::vector<Index>(K, 1)); }
  /// Parses "2,2,2,2,1".
  static BranchVector parse(const std::string& text);

  Index sparsity() const { return static_cast<Index>(counts_.size()); }
  Index operator[](Index level) const { return counts_[level]; }
  const std::vector<Index>& counts() const { return counts_; }
  std::string to_string() const;

  bool operator==(const BranchVector&) const = default;

 private:
  std::vector<Index> counts_;
};

struct PursuitConfig {
  bool dictionary_refinement = true;
  bool subspace_refinement = true;
  double rank_tolerance = kDefaultRankTolerance;
  double zero_atom_floor = 1e-10;
  /// Record every leaf (support, objective) in visit order; diagnostics only.
  bool collect_leaves = false;

  void validate() const;
};

struct ObservationSet {
  ComplexMatrix Y;
  /// Planted support and signal, when known (experiments only).
  std::optional<IndexList> true_support;
  std::optional<ComplexMatrix> true_signal;
};

struct LeafRecord {
  IndexList support;  // in selection order
  double objective = 0.0;
};

struct RecoveryResult {
  IndexList support;             // sorted ascending
  ComplexMatrix coefficients;    // |S| x l, rows follow `support`
  double residual_norm = 0.0;    // ||Pi_perp(A_S) Y||_F
  std::uint64_t nodes_expanded = 0;
  IndexList winning_path;        // provisional support of the winning leaf, in selection order
  std::vector<LeafRecord> leaves;  // filled when PursuitConfig::collect_leaves
};

struct RankedEntry {
  Index index = -1;
  double value = 0.0;
};

/// d-th largest entry (d >= 1) among indices not in `excluded`; ties go to the smaller index.
/// Throws NotEnoughCandidates when fewer than d entries remain.
RankedEntry d_max(std::span<const double> values, std::span<const Index> excluded, Index d);

/// Refined atom: a_g projected away from span(A_C) and rescaled to unit norm, or the
/// zero vector when the projection falls to zero_atom_floor or below.
ComplexVector refine_atom(const ComplexMatrix& A, std::span<const Index> C, Index g,
                          const PursuitConfig& cfg = {});

/// Multi-branch matching pursuit over the tree described by d. With d = [1,...,1]
/// and both refinements this is RA-ORMP (ORMP for a single snapshot).
RecoveryResult mbmp(const ComplexMatrix& Y, const Dictionary& A, const BranchVector& d,
                    const PursuitConfig& cfg = {});
inline RecoveryResult mbmp(const ObservationSet& obs, const Dictionary& A, const BranchVector& d,
                           const PursuitConfig& cfg = {}) {
  return mbmp(obs.Y, A, d, cfg);
}

/// Global minimizer of ||Pi_perp(A_S) Y||_F over all |S| = K (lexicographic tie-break).
/// Rank-deficient supports are skipped. Throws TooLarge when C(n, K) exceeds the budget.
RecoveryResult exhaustive_l0(const ComplexMatrix& Y, const Dictionary& A, Index K,
                             std::uint64_t budget = 1'000'000);

/// Nodes in the first K tree levels: 1 + sum_{i=2..K} prod_{j<i} d_j.
std::uint64_t node_count(const BranchVector& d);

/// Leaves at level K + 1: prod_j d_j.
std::uint64_t leaf_count(const BranchVector& d);

/// d_i-th largest out-of-support score over the largest in-support score, scores being
/// ||U^H abar_g^C||_2. A value below 1 means one of the node's d_i children picks an
/// index of S_star \ C. Throws InfiniteMargin when the denominator is <= 1e-14.
double selection_margin(const Dictionary& A, std::span<const Index> S_star, std::span<const Index> C,
                        const ComplexMatrix& U, Index d_i, const PursuitConfig& cfg = {});

}  // namespace mbmp
