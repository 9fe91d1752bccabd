#pragma once

#include "mbmp/dictionary.hpp"
#include "mbmp/pursuit.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace mbmp {

enum class CertificateKind { Coherence, CumulativeCoherence, NeumanERC, MBERC, MBCoherence };
std::string_view to_string(CertificateKind kind);

struct CertificateContext {
  IndexList provisional_support;
  Index branches = 1;
  Index sparsity = 0;
  double oir = 0.0;
};

/// One evaluated recovery condition. `holds` is exactly lhs < threshold; no slack.
struct CertificateReport {
  CertificateKind kind = CertificateKind::Coherence;
  double lhs = 0.0;
  double threshold = 0.0;
  bool holds = false;
  CertificateContext context;
};

/// Out-support / in-support energy ratio of the residual subspace.
struct OirValue {
  enum class Mode { Oracle, Assumed };
  double value = 0.0;
  Mode mode = Mode::Assumed;

  static OirValue assumed(double value);
};

inline constexpr std::uint64_t kDefaultSupportBudget = 1'000'000;
inline constexpr std::uint64_t kDefaultNodeBudget = 50'000'000;

/// Refined atoms abar_g^C for every g outside C; column t is atom indices[t].
struct RefinedDictionary {
  ComplexMatrix atoms;
  IndexList indices;
};
RefinedDictionary refined_dictionary(const Dictionary& A, std::span<const Index> C, const PursuitConfig& cfg = {});

/// Oracle OIR for a known support. The numerator projects each refined out-of-support
/// atom away from the span of the refined in-support atoms {abar_s^C : s in S_star \ C},
/// so the ratio vanishes for noiseless data at every correct provisional support.
/// U = Y for a single snapshot, orth(Pi_perp(A_C) Y) otherwise.
OirValue oir(const Dictionary& A, const ComplexMatrix& Y, std::span<const Index> S_star,
             std::span<const Index> C, const PursuitConfig& cfg = {});

/// d-th largest ||(Abar_S)^+ abar_g||_1 over g outside S_star, against 1 - OIR.
CertificateReport mb_erc(const Dictionary& A, std::span<const Index> S_star, std::span<const Index> C,
                         Index d, OirValue oir, const PursuitConfig& cfg = {});

/// mu(A) against 1 / (2K - 1).
CertificateReport coherence_condition(const Dictionary& A, Index K);

/// mu1(K-1, A) + mu1(K, A) against 1.
CertificateReport cumulative_coherence_condition(const Dictionary& A, Index K);

/// Neuman (weak) ERC: max over |S| = K of the largest in-support plus largest
/// out-of-support l1 Gram mass, against 2(1 - nsr). Exhaustive over supports.
CertificateReport neuman_erc(const Dictionary& A, Index K, double nsr = 0.0,
                             std::uint64_t budget = kDefaultSupportBudget);

/// MB-coherence(C, d) on the refined dictionary, threshold 2. The d-th largest
/// out-of-support mass is taken over g outside S.
CertificateReport mb_coherence(const Dictionary& A, std::span<const Index> C, Index K, Index d, OirValue oir,
                               std::uint64_t budget = kDefaultSupportBudget, const PursuitConfig& cfg = {});

/// Same condition for several branch counts in one pass over the supports.
std::vector<CertificateReport> mb_coherence(const Dictionary& A, std::span<const Index> C, Index K,
                                            std::span<const Index> branch_counts, OirValue oir,
                                            std::uint64_t budget = kDefaultSupportBudget,
                                            const PursuitConfig& cfg = {});

/// Gram-level core of mb_coherence: for each d in branch_counts, the largest
/// in-support mass plus gamma times the d-th largest out-of-support mass, maximized
/// over all k-subsets of the columns of Q.
std::vector<double> mb_coherence_lhs(const Eigen::MatrixXd& Q, Index k, std::span<const Index> branch_counts,
                                     double gamma, std::uint64_t budget = kDefaultSupportBudget);

/// Least d with MB-coherence(C, d), found by scanning d = 1, 2, ...; nullopt when no
/// d <= (n - |C|) - k works.
std::optional<Index> smallest_d_bruteforce(const Dictionary& A, std::span<const Index> C, Index K, OirValue oir,
                                           std::uint64_t budget = kDefaultSupportBudget,
                                           const PursuitConfig& cfg = {});

/// Least d with MB-coherence(C, d), from the optimum of the branch-count binary program.
std::optional<Index> smallest_d_mip(const Dictionary& A, std::span<const Index> C, Index K, OirValue oir,
                                    std::uint64_t node_budget = kDefaultNodeBudget, const PursuitConfig& cfg = {});

enum class DesignStrategy { Level1Uniform, PerNode };
enum class DesignMethod { BruteForce, Mip };

/// Noiseless branch-vector design. Level1Uniform returns [d1, ..., d1, 1] with d1 the
/// smallest feasible count at the root. PerNode sets d_i to the largest smallest-feasible
/// count over every provisional support of size i - 1. Throws Infeasible when some level
/// has no feasible count.
BranchVector design_branch_vector(const Dictionary& A, Index K, DesignStrategy strategy,
                                  DesignMethod method = DesignMethod::Mip,
                                  std::uint64_t budget = kDefaultSupportBudget);

}  // namespace mbmp
