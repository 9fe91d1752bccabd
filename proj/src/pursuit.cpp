#include "mbmp/pursuit.hpp"

#include "mbmp/error.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <sstream>

namespace mbmp {

BranchVector::BranchVector(std::vector<Index> counts) : counts_(std::move(counts)) {
  if (counts_.empty()) throw Error(ErrorCode::InvalidArgument, "branch vector must have at least one level");
  for (Index c : counts_) {
    if (c < 1) throw Error(ErrorCode::InvalidArgument, "branch counts must be positive");
  }
  counts_.back() = 1;
}

BranchVector BranchVector::parse(const std::string& text) {
  std::vector<Index> counts;
  std::string cleaned;
  for (char ch : text) {
    if (ch == '[' || ch == ']' || std::isspace(static_cast<unsigned char>(ch))) continue;
    cleaned.push_back(ch);
  }
  std::istringstream in(cleaned);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw Error(ErrorCode::ParseError, "bad branch vector '" + text + "'");
    }
    counts.push_back(static_cast<Index>(v));
  }
  return BranchVector(std::move(counts));
}

std::string BranchVector::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(counts_[i]);
  }
  return out;
}

void PursuitConfig::validate() const {
  if (!(rank_tolerance > 0.0) || !(zero_atom_floor > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "pursuit tolerances must be positive");
  }
}

RankedEntry d_max(std::span<const double> values, std::span<const Index> excluded, Index d) {
  const auto n = static_cast<Index>(values.size());
  if (d < 1) throw Error(ErrorCode::InvalidArgument, "d_max requires d >= 1");
  std::vector<char> skip(values.size(), 0);
  for (Index e : excluded) {
    if (e < 0 || e >= n) throw Error(ErrorCode::InvalidArgument, "excluded index out of range");
    skip[e] = 1;
  }
  std::vector<Index> candidates;
  for (Index g = 0; g < n; ++g) {
    if (!skip[g]) candidates.push_back(g);
  }
  if (static_cast<Index>(candidates.size()) < d) {
    throw Error(ErrorCode::NotEnoughCandidates,
                std::to_string(candidates.size()) + " candidates for d = " + std::to_string(d));
  }
  auto before = [&](Index a, Index b) {
    return values[a] > values[b] || (values[a] == values[b] && a < b);
  };
  std::nth_element(candidates.begin(), candidates.begin() + (d - 1), candidates.end(), before);
  const Index g = candidates[d - 1];
  return {g, values[g]};
}

ComplexVector refine_atom(const ComplexMatrix& A, std::span<const Index> C, Index g, const PursuitConfig& cfg) {
  if (g < 0 || g >= A.cols()) throw Error(ErrorCode::InvalidArgument, "atom index out of range");
  if (std::find(C.begin(), C.end(), g) != C.end()) {
    throw Error(ErrorCode::InvalidArgument, "refine_atom: g is in the provisional support");
  }
  ComplexVector v = numlin::project_out(A, C, A.col(g), cfg.rank_tolerance);
  const double norm = v.norm();
  if (norm <= cfg.zero_atom_floor) return ComplexVector::Zero(A.rows());
  return v / norm;
}

namespace {

// Per-depth state of the node currently being expanded at that depth. The search is
// depth-first, so one slot per level suffices; siblings overwrite the slot in turn.
struct LevelState {
  ComplexMatrix atoms;     // a_g projected away from span(A_C), unnormalized
  Eigen::VectorXd norms;   // column norms of `atoms`
  ComplexMatrix residual;  // Pi_perp(A_C) Y
};

// out = M - q (q^H M) for a unit vector q, without forming a temporary outer product.
void subtract_projection(const ComplexMatrix& M, const ComplexVector& q, ComplexMatrix& out) {
  const Eigen::RowVectorXcd w = q.adjoint() * M;
  out = M;
  out.noalias() -= q * w;
}

class TreeSearch {
 public:
  TreeSearch(const ComplexMatrix& Y, const ComplexMatrix& A, const BranchVector& d, const PursuitConfig& cfg)
      : d_(d), cfg_(cfg), K_(d.sparsity()), levels_(static_cast<std::size_t>(K_)),
        basis_(A.rows(), K_), excluded_(static_cast<std::size_t>(A.cols()), 0) {
    levels_[0].atoms = A;
    levels_[0].norms = A.colwise().norm().transpose();
    levels_[0].residual = Y;
  }

  void run() {
    nodes_ = 1;
    expand(0);
  }

  const IndexList& best_path() const { return best_path_; }
  double best_objective() const { return best_objective_; }
  std::uint64_t nodes() const { return nodes_; }
  std::vector<LeafRecord>& leaves() { return leaves_; }

 private:
  // Children of the node whose provisional support is path_ (|C| = depth), best first.
  std::vector<Index> select_children(const LevelState& node, Index branches) const {
    ComplexMatrix U;
    if (node.residual.cols() > 1 && cfg_.subspace_refinement) {
      try {
        U = numlin::orthonormal_basis(node.residual, cfg_.rank_tolerance).matrix;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ZeroMatrix) throw;
        U = node.residual;
      }
    } else {
      U = node.residual;
    }
    const Eigen::VectorXd correlation = (U.adjoint() * node.atoms).colwise().norm().transpose();

    std::vector<Index> candidates;
    std::vector<double> score(static_cast<std::size_t>(node.atoms.cols()), 0.0);
    for (Index g = 0; g < node.atoms.cols(); ++g) {
      if (excluded_[g] || node.norms(g) <= cfg_.zero_atom_floor) continue;
      score[g] = cfg_.dictionary_refinement ? correlation(g) / node.norms(g) : correlation(g);
      candidates.push_back(g);
    }
    if (static_cast<Index>(candidates.size()) < branches) {
      throw Error(ErrorCode::NotEnoughCandidates,
                  "node at level " + std::to_string(path_.size() + 1) + " has " +
                      std::to_string(candidates.size()) + " candidates for " + std::to_string(branches) +
                      " branches");
    }
    auto before = [&](Index a, Index b) { return score[a] > score[b] || (score[a] == score[b] && a < b); };
    std::partial_sort(candidates.begin(), candidates.begin() + branches, candidates.end(), before);
    candidates.resize(static_cast<std::size_t>(branches));
    return candidates;
  }

  // Unit vector extending the orthonormal basis of span(A_C) by atom g.
  ComplexVector next_basis_vector(const LevelState& node, Index g, Index depth) const {
    ComplexVector q = node.atoms.col(g) / node.norms(g);
    if (depth > 0) {
      const auto B = basis_.leftCols(depth);
      q -= B * (B.adjoint() * q);
      q.normalize();
    }
    return q;
  }

  void expand(Index depth) {
    const LevelState& node = levels_[depth];
    const std::vector<Index> picks = select_children(node, d_[depth]);

    for (Index g : picks) {
      excluded_[g] = 1;
      path_.push_back(g);
      const ComplexVector q = next_basis_vector(node, g, depth);
      ++nodes_;
      if (depth + 1 == K_) {
        const ComplexMatrix residual = node.residual - q * (q.adjoint() * node.residual);
        visit_leaf(residual.norm());
      } else {
        basis_.col(depth) = q;
        LevelState& child = levels_[depth + 1];
        subtract_projection(node.atoms, q, child.atoms);
        child.norms = child.atoms.colwise().norm().transpose();
        subtract_projection(node.residual, q, child.residual);
        expand(depth + 1);
      }
      path_.pop_back();
    }
    for (Index g : picks) excluded_[g] = 0;
  }

  void visit_leaf(double objective) {
    if (cfg_.collect_leaves) leaves_.push_back({path_, objective});
    if (objective < best_objective_) {
      best_objective_ = objective;
      best_path_ = path_;
    }
  }

  const BranchVector& d_;
  const PursuitConfig& cfg_;
  Index K_;
  std::vector<LevelState> levels_;
  ComplexMatrix basis_;
  std::vector<char> excluded_;  // exclusion set of the node being expanded
  IndexList path_;
  IndexList best_path_;
  double best_objective_ = std::numeric_limits<double>::infinity();
  std::uint64_t nodes_ = 0;
  std::vector<LeafRecord> leaves_;
};

}  // namespace

RecoveryResult mbmp(const ComplexMatrix& Y, const Dictionary& A, const BranchVector& d, const PursuitConfig& cfg) {
  cfg.validate();
  numlin::require_valid(Y, "observations");
  numlin::require_valid(A.matrix, "dictionary");
  if (Y.rows() != A.rows()) throw Error(ErrorCode::InvalidArgument, "rows(Y) != rows(A)");
  if (d.sparsity() > A.rows()) throw Error(ErrorCode::InvalidArgument, "sparsity K exceeds rows(A)");

  TreeSearch search(numlin::gram_square_root(Y), A.matrix, d, cfg);
  search.run();

  RecoveryResult result;
  result.winning_path = search.best_path();
  result.support = result.winning_path;
  std::sort(result.support.begin(), result.support.end());
  result.residual_norm = search.best_objective();
  result.nodes_expanded = search.nodes();
  result.coefficients = numlin::least_squares(numlin::columns(A.matrix, result.support), Y, cfg.rank_tolerance);
  result.leaves = std::move(search.leaves());
  return result;
}

RecoveryResult exhaustive_l0(const ComplexMatrix& Y, const Dictionary& A, Index K, std::uint64_t budget) {
  numlin::require_valid(Y, "observations");
  if (Y.rows() != A.rows()) throw Error(ErrorCode::InvalidArgument, "rows(Y) != rows(A)");
  const Index n = A.atoms();
  if (K < 1 || K > n) throw Error(ErrorCode::InvalidArgument, "exhaustive_l0 requires 1 <= K <= n");
  if (binomial(n, K) > budget) {
    throw Error(ErrorCode::TooLarge, "C(" + std::to_string(n) + "," + std::to_string(K) + ") supports exceed budget");
  }

  RecoveryResult best;
  best.residual_norm = std::numeric_limits<double>::infinity();
  IndexList S(static_cast<std::size_t>(K));
  for (Index i = 0; i < K; ++i) S[i] = i;
  while (true) {
    ++best.nodes_expanded;
    try {
      const double objective = numlin::project_out(A.matrix, S, Y).norm();
      if (objective < best.residual_norm) {
        best.residual_norm = objective;
        best.support = S;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::RankDeficientSupport) throw;
    }
    Index i = K - 1;
    while (i >= 0 && S[i] == n - K + i) --i;
    if (i < 0) break;
    ++S[i];
    for (Index j = i + 1; j < K; ++j) S[j] = S[j - 1] + 1;
  }
  if (best.support.empty()) throw Error(ErrorCode::RankDeficientSupport, "every support is rank deficient");
  best.winning_path = best.support;
  best.coefficients = numlin::least_squares(numlin::columns(A.matrix, best.support), Y);
  return best;
}

std::uint64_t node_count(const BranchVector& d) {
  std::uint64_t total = 1;
  std::uint64_t width = 1;
  for (Index i = 1; i < d.sparsity(); ++i) {
    width *= static_cast<std::uint64_t>(d[i - 1]);
    total += width;
  }
  return total;
}

std::uint64_t leaf_count(const BranchVector& d) {
  std::uint64_t width = 1;
  for (Index c : d.counts()) width *= static_cast<std::uint64_t>(c);
  return width;
}

double selection_margin(const Dictionary& A, std::span<const Index> S_star, std::span<const Index> C,
                        const ComplexMatrix& U, Index d_i, const PursuitConfig& cfg) {
  if (U.rows() != A.rows()) throw Error(ErrorCode::InvalidArgument, "rows(U) != rows(A)");
  for (Index c : C) {
    if (std::find(S_star.begin(), S_star.end(), c) == S_star.end()) {
      throw Error(ErrorCode::InvalidArgument, "provisional support is not inside S_star");
    }
  }
  IndexList remaining;
  for (Index s : S_star) {
    if (std::find(C.begin(), C.end(), s) == C.end()) remaining.push_back(s);
  }
  if (remaining.empty()) throw Error(ErrorCode::InvalidArgument, "S_star \\ C is empty");

  const Index n = A.atoms();
  std::vector<double> score(static_cast<std::size_t>(n), 0.0);
  for (Index g = 0; g < n; ++g) {
    if (std::find(C.begin(), C.end(), g) != C.end()) continue;
    score[g] = (U.adjoint() * refine_atom(A.matrix, C, g, cfg)).norm();
  }
  double in_support = 0.0;
  for (Index s : remaining) in_support = std::max(in_support, score[s]);

  IndexList excluded(C.begin(), C.end());
  excluded.insert(excluded.end(), remaining.begin(), remaining.end());
  const double out_support = d_max(score, excluded, d_i).value;
  if (in_support <= 1e-14) throw Error(ErrorCode::InfiniteMargin, "in-support scores vanish");
  return out_support / in_support;
}

}  // namespace mbmp
