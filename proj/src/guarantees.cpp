#include "mbmp/guarantees.hpp"

#include "mbmp/branch_program.hpp"
#include "mbmp/error.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace mbmp {

std::string_view to_string(CertificateKind kind) {
  switch (kind) {
    case CertificateKind::Coherence: return "Coherence";
    case CertificateKind::CumulativeCoherence: return "CumulativeCoherence";
    case CertificateKind::NeumanERC: return "NeumanERC";
    case CertificateKind::MBERC: return "MBERC";
    case CertificateKind::MBCoherence: return "MBCoherence";
  }
  return "Unknown";
}

OirValue OirValue::assumed(double value) {
  if (!(value >= 0.0)) throw Error(ErrorCode::InvalidArgument, "OIR must be non-negative");
  return {value, Mode::Assumed};
}

namespace {

CertificateReport report(CertificateKind kind, double lhs, double threshold, CertificateContext context) {
  return {kind, lhs, threshold, lhs < threshold, std::move(context)};
}

void require_distinct_indices(std::span<const Index> set, Index n, const char* what) {
  IndexList sorted(set.begin(), set.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " has repeated indices");
  }
  if (!sorted.empty() && (sorted.front() < 0 || sorted.back() >= n)) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " has an index out of range");
  }
}

bool contains(std::span<const Index> set, Index g) { return std::find(set.begin(), set.end(), g) != set.end(); }

// S_star \ C, after checking C is a proper subset of S_star.
IndexList remaining_support(std::span<const Index> S_star, std::span<const Index> C, Index n) {
  require_distinct_indices(S_star, n, "S_star");
  require_distinct_indices(C, n, "provisional support");
  for (Index c : C) {
    if (!contains(S_star, c)) throw Error(ErrorCode::InvalidArgument, "provisional support is not inside S_star");
  }
  IndexList S;
  for (Index s : S_star) {
    if (!contains(C, s)) S.push_back(s);
  }
  if (S.empty()) throw Error(ErrorCode::InvalidArgument, "S_star \\ C is empty");
  return S;
}

Index column_of(const RefinedDictionary& refined, Index g) {
  const auto it = std::find(refined.indices.begin(), refined.indices.end(), g);
  return static_cast<Index>(it - refined.indices.begin());
}

double gamma_of(const OirValue& oir) {
  if (!(oir.value >= 0.0)) throw Error(ErrorCode::InvalidArgument, "OIR must be non-negative");
  if (oir.value >= 1.0) throw Error(ErrorCode::OIRTooLarge, "OIR = " + std::to_string(oir.value) + " is not below 1");
  return 1.0 / (1.0 - oir.value);
}

}  // namespace

RefinedDictionary refined_dictionary(const Dictionary& A, std::span<const Index> C, const PursuitConfig& cfg) {
  require_distinct_indices(C, A.atoms(), "provisional support");
  RefinedDictionary out;
  for (Index g = 0; g < A.atoms(); ++g) {
    if (!contains(C, g)) out.indices.push_back(g);
  }
  out.atoms = numlin::project_out(A.matrix, C, numlin::columns(A.matrix, out.indices), cfg.rank_tolerance);
  for (Index t = 0; t < out.atoms.cols(); ++t) {
    const double norm = out.atoms.col(t).norm();
    if (norm <= cfg.zero_atom_floor) {
      out.atoms.col(t).setZero();
    } else {
      out.atoms.col(t) /= norm;
    }
  }
  return out;
}

OirValue oir(const Dictionary& A, const ComplexMatrix& Y, std::span<const Index> S_star, std::span<const Index> C,
             const PursuitConfig& cfg) {
  if (Y.rows() != A.rows()) throw Error(ErrorCode::InvalidArgument, "rows(Y) != rows(A)");
  const IndexList S = remaining_support(S_star, C, A.atoms());
  const ComplexMatrix U =
      Y.cols() == 1 ? Y : numlin::orthonormal_basis(numlin::project_out(A.matrix, C, Y, cfg.rank_tolerance),
                                                    cfg.rank_tolerance).matrix;

  const RefinedDictionary refined = refined_dictionary(A, C, cfg);
  ComplexMatrix in_atoms(A.rows(), static_cast<Index>(S.size()));
  for (std::size_t t = 0; t < S.size(); ++t) in_atoms.col(static_cast<Index>(t)) = refined.atoms.col(column_of(refined, S[t]));
  IndexList out_columns;
  for (Index t = 0; t < static_cast<Index>(refined.indices.size()); ++t) {
    if (!contains(S, refined.indices[t])) out_columns.push_back(t);
  }

  const double denominator = (U.adjoint() * in_atoms).colwise().norm().maxCoeff();
  if (denominator <= 1e-14) throw Error(ErrorCode::DegenerateDenominator, "in-support scores vanish");

  double numerator = 0.0;
  if (!out_columns.empty()) {
    IndexList all(S.size());
    std::iota(all.begin(), all.end(), Index{0});
    const ComplexMatrix residual_atoms =
        numlin::project_out(in_atoms, all, numlin::columns(refined.atoms, out_columns), cfg.rank_tolerance);
    numerator = (U.adjoint() * residual_atoms).colwise().norm().maxCoeff();
  }
  return {numerator / denominator, OirValue::Mode::Oracle};
}

CertificateReport mb_erc(const Dictionary& A, std::span<const Index> S_star, std::span<const Index> C, Index d,
                         OirValue oir_value, const PursuitConfig& cfg) {
  gamma_of(oir_value);
  const IndexList S = remaining_support(S_star, C, A.atoms());
  const RefinedDictionary refined = refined_dictionary(A, C, cfg);

  IndexList in_columns, out_columns;
  for (Index t = 0; t < static_cast<Index>(refined.indices.size()); ++t) {
    (contains(S, refined.indices[t]) ? in_columns : out_columns).push_back(t);
  }
  const ComplexMatrix in_atoms = numlin::columns(refined.atoms, in_columns);
  const ComplexMatrix coefficients =
      numlin::least_squares(in_atoms, numlin::columns(refined.atoms, out_columns), cfg.rank_tolerance);

  std::vector<double> mass(static_cast<std::size_t>(coefficients.cols()));
  for (Index t = 0; t < coefficients.cols(); ++t) mass[t] = numlin::l1_norm(coefficients.col(t));
  const double lhs = d_max(mass, {}, d).value;

  return report(CertificateKind::MBERC, lhs, 1.0 - oir_value.value,
                {IndexList(C.begin(), C.end()), d, static_cast<Index>(S_star.size()), oir_value.value});
}

CertificateReport coherence_condition(const Dictionary& A, Index K) {
  if (K < 1) throw Error(ErrorCode::InvalidArgument, "K must be at least 1");
  return report(CertificateKind::Coherence, coherence(A), 1.0 / static_cast<double>(2 * K - 1), {{}, 1, K, 0.0});
}

CertificateReport cumulative_coherence_condition(const Dictionary& A, Index K) {
  if (K < 1) throw Error(ErrorCode::InvalidArgument, "K must be at least 1");
  const Eigen::MatrixXd Q = abs_gram(A.matrix);
  return report(CertificateKind::CumulativeCoherence, babel_from_gram(Q, K - 1) + babel_from_gram(Q, K), 1.0,
                {{}, 1, K, 0.0});
}

CertificateReport neuman_erc(const Dictionary& A, Index K, double nsr, std::uint64_t budget) {
  const Index n = A.atoms();
  if (K < 1 || K >= n) throw Error(ErrorCode::InvalidArgument, "neuman_erc requires 1 <= K < n");
  if (!(nsr >= 0.0)) throw Error(ErrorCode::InvalidArgument, "nsr must be non-negative");
  if (binomial(n, K) > budget) {
    throw Error(ErrorCode::TooLarge, "C(" + std::to_string(n) + "," + std::to_string(K) + ") supports exceed budget");
  }
  const Eigen::MatrixXd Q = abs_gram(A.matrix);

  double lhs = 0.0;
  IndexList S(static_cast<std::size_t>(K));
  std::iota(S.begin(), S.end(), Index{0});
  std::vector<char> in_S(static_cast<std::size_t>(n), 0);
  while (true) {
    for (Index s : S) in_S[s] = 1;
    double in_max = 0.0, out_max = 0.0;
    for (Index g = 0; g < n; ++g) {
      double mass = 0.0;
      for (Index s : S) mass += Q(s, g);
      if (in_S[g]) {
        in_max = std::max(in_max, mass);
      } else {
        out_max = std::max(out_max, mass);
      }
    }
    lhs = std::max(lhs, in_max + out_max);
    for (Index s : S) in_S[s] = 0;

    Index i = K - 1;
    while (i >= 0 && S[i] == n - K + i) --i;
    if (i < 0) break;
    ++S[i];
    for (Index j = i + 1; j < K; ++j) S[j] = S[j - 1] + 1;
  }
  return report(CertificateKind::NeumanERC, lhs, 2.0 * (1.0 - nsr), {{}, 1, K, nsr});
}

std::vector<double> mb_coherence_lhs(const Eigen::MatrixXd& Q, Index k, std::span<const Index> branch_counts,
                                     double gamma, std::uint64_t budget) {
  const Index n = Q.cols();
  if (k < 1 || k > n) throw Error(ErrorCode::InvalidArgument, "mb_coherence requires 1 <= k <= n");
  if (branch_counts.empty()) return {};
  const Index widest = *std::max_element(branch_counts.begin(), branch_counts.end());
  if (*std::min_element(branch_counts.begin(), branch_counts.end()) < 1) {
    throw Error(ErrorCode::InvalidArgument, "branch counts must be positive");
  }
  if (n - k < widest) {
    throw Error(ErrorCode::NotEnoughCandidates,
                std::to_string(n - k) + " out-of-support atoms for d = " + std::to_string(widest));
  }
  if (binomial(n, k) > budget) {
    throw Error(ErrorCode::TooLarge, "C(" + std::to_string(n) + "," + std::to_string(k) + ") supports exceed budget");
  }

  std::vector<double> lhs(branch_counts.size(), 0.0);
  IndexList S(static_cast<std::size_t>(k));
  std::iota(S.begin(), S.end(), Index{0});
  // partial[t] = sum of Q columns S[0..t]; Q is symmetric so entry g is the l1 mass of A_S^H a_g.
  std::vector<Eigen::VectorXd> partial(static_cast<std::size_t>(k), Eigen::VectorXd(n));
  std::vector<double> top(static_cast<std::size_t>(widest));
  Index dirty = 0;
  double floor_lhs = -1.0;
  // next support in lexicographic order; false after the last one
  auto advance = [&] {
    Index i = k - 1;
    while (i >= 0 && S[i] == n - k + i) --i;
    if (i < 0) return false;
    ++S[i];
    for (Index j = i + 1; j < k; ++j) S[j] = S[j - 1] + 1;
    dirty = i;
    return true;
  };
  while (true) {
    for (Index t = dirty; t < k; ++t) {
      if (t == 0) {
        partial[0] = Q.col(S[0]);
      } else {
        partial[t].noalias() = partial[t - 1] + Q.col(S[t]);
      }
    }
    const Eigen::VectorXd& mass = partial[k - 1];

    double in_max = 0.0;
    for (Index s : S) in_max = std::max(in_max, mass(s));
    // Skip the ranking when even the largest out-of-support mass cannot raise any lhs.
    // The last partial sum is rebuilt on every step, so masking it here is harmless.
    for (Index s : S) partial[k - 1](s) = -1.0;
    const double out_max = partial[k - 1].maxCoeff();
    if (in_max + gamma * out_max <= floor_lhs) {
      if (!advance()) break;
      continue;
    }
    std::fill(top.begin(), top.end(), -1.0);
    std::size_t next_in = 0;
    for (Index g = 0; g < n; ++g) {
      if (next_in < S.size() && S[next_in] == g) {
        ++next_in;
        continue;
      }
      double v = mass(g);
      if (v <= top.back()) continue;
      std::size_t pos = top.size() - 1;
      while (pos > 0 && top[pos - 1] < v) {
        top[pos] = top[pos - 1];
        --pos;
      }
      top[pos] = v;
    }
    for (std::size_t t = 0; t < branch_counts.size(); ++t) {
      lhs[t] = std::max(lhs[t], in_max + gamma * top[branch_counts[t] - 1]);
    }
    floor_lhs = *std::min_element(lhs.begin(), lhs.end());
    if (!advance()) break;
  }
  return lhs;
}

std::vector<CertificateReport> mb_coherence(const Dictionary& A, std::span<const Index> C, Index K,
                                            std::span<const Index> branch_counts, OirValue oir_value,
                                            std::uint64_t budget, const PursuitConfig& cfg) {
  const double gamma = gamma_of(oir_value);
  const Index k = K - static_cast<Index>(C.size());
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "mb_coherence requires K - |C| >= 1");
  const RefinedDictionary refined = refined_dictionary(A, C, cfg);
  const std::vector<double> lhs = mb_coherence_lhs(abs_gram(refined.atoms), k, branch_counts, gamma, budget);

  std::vector<CertificateReport> reports;
  for (std::size_t t = 0; t < lhs.size(); ++t) {
    reports.push_back(report(CertificateKind::MBCoherence, lhs[t], 2.0,
                             {IndexList(C.begin(), C.end()), branch_counts[t], K, oir_value.value}));
  }
  return reports;
}

CertificateReport mb_coherence(const Dictionary& A, std::span<const Index> C, Index K, Index d, OirValue oir_value,
                               std::uint64_t budget, const PursuitConfig& cfg) {
  const Index counts[] = {d};
  return mb_coherence(A, C, K, counts, oir_value, budget, cfg).front();
}

std::optional<Index> smallest_d_bruteforce(const Dictionary& A, std::span<const Index> C, Index K, OirValue oir_value,
                                           std::uint64_t budget, const PursuitConfig& cfg) {
  const Index candidates = A.atoms() - static_cast<Index>(C.size()) - (K - static_cast<Index>(C.size()));
  for (Index d = 1; d <= candidates; ++d) {
    if (mb_coherence(A, C, K, d, oir_value, budget, cfg).holds) return d;
  }
  return std::nullopt;
}

std::optional<Index> smallest_d_mip(const Dictionary& A, std::span<const Index> C, Index K, OirValue oir_value,
                                    std::uint64_t node_budget, const PursuitConfig& cfg) {
  const double gamma = gamma_of(oir_value);
  const Index k = K - static_cast<Index>(C.size());
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "smallest_d_mip requires K - |C| >= 1");
  const RefinedDictionary refined = refined_dictionary(A, C, cfg);
  const BranchCountProgram program{abs_gram(refined.atoms), gamma, k};
  if (program.size() <= k) throw Error(ErrorCode::NotEnoughCandidates, "no out-of-support atoms");
  const BranchCountSolution best = solve(program, node_budget);
  if (best.objective > program.size() - k) return std::nullopt;
  return best.objective;
}

namespace {

Index smallest_feasible(const Dictionary& A, std::span<const Index> C, Index K, DesignMethod method,
                        std::uint64_t budget) {
  const OirValue noiseless{};
  const std::optional<Index> d = method == DesignMethod::Mip ? smallest_d_mip(A, C, K, noiseless)
                                                              : smallest_d_bruteforce(A, C, K, noiseless, budget);
  if (!d) {
    throw Error(ErrorCode::Infeasible,
                "no branch count meets MB-coherence at a node with |C| = " + std::to_string(C.size()));
  }
  return *d;
}

}  // namespace

BranchVector design_branch_vector(const Dictionary& A, Index K, DesignStrategy strategy, DesignMethod method,
                                  std::uint64_t budget) {
  if (K < 1 || K >= A.atoms()) throw Error(ErrorCode::InvalidArgument, "design requires 1 <= K < n");
  std::vector<Index> counts(static_cast<std::size_t>(K), 1);
  if (K == 1) return BranchVector(counts);

  if (strategy == DesignStrategy::Level1Uniform) {
    const Index d1 = smallest_feasible(A, {}, K, method, budget);
    std::fill(counts.begin(), counts.end() - 1, d1);
    return BranchVector(counts);
  }

  // Every (i-1)-subset may be the correct provisional support of some level-i node.
  const Index n = A.atoms();
  for (Index level = 1; level < K; ++level) {
    const Index size = level - 1;
    if (binomial(n, size) > budget) {
      throw Error(ErrorCode::TooLarge, "too many provisional supports at level " + std::to_string(level));
    }
    IndexList C(static_cast<std::size_t>(size));
    std::iota(C.begin(), C.end(), Index{0});
    Index widest = 1;
    while (true) {
      widest = std::max(widest, smallest_feasible(A, C, K, method, budget));
      Index i = size - 1;
      while (i >= 0 && C[i] == n - size + i) --i;
      if (i < 0) break;
      ++C[i];
      for (Index j = i + 1; j < size; ++j) C[j] = C[j - 1] + 1;
    }
    counts[level - 1] = widest;
  }
  return BranchVector(counts);
}

}  // namespace mbmp
