#include "mbmp/branch_program.hpp"

#include "mbmp/error.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace mbmp {

bool is_feasible(const BranchCountProgram& program, const BranchCountSolution& solution) {
  const Index n = program.size();
  const auto sized = [n](const std::vector<char>& v) { return static_cast<Index>(v.size()) == n; };
  if (!sized(solution.s) || !sized(solution.y) || !sized(solution.z)) return false;

  Index s_count = 0, y_count = 0;
  for (Index l = 0; l < n; ++l) {
    if (solution.y[l] + solution.s[l] + solution.z[l] > 1) return false;
    s_count += solution.s[l];
    y_count += solution.y[l];
  }
  if (s_count != program.k - 1 || y_count != 1) return false;

  Eigen::VectorXd members(n);
  for (Index l = 0; l < n; ++l) members(l) = solution.s[l] + solution.y[l];
  const Eigen::VectorXd mass = program.Q.transpose() * members;  // mass(c) = q_c^T (s + y)
  for (Index j = 0; j < n; ++j) {
    for (Index g = 0; g < n; ++g) {
      if (g == j) continue;
      const double lhs = mass(j) + program.gamma * mass(g);
      if (lhs < 2.0 * (solution.y[j] + solution.z[g] - 1)) return false;
    }
  }
  return true;
}

namespace {

class BranchAndBound {
 public:
  BranchAndBound(const BranchCountProgram& program, std::uint64_t node_budget)
      : p_(program), n_(program.size()), budget_(node_budget), ranked_(static_cast<std::size_t>(n_)),
        mass_(static_cast<std::size_t>(program.k)) {
    // For each column, the other rows ordered by decreasing Q entry; used by the bound.
    for (Index c = 0; c < n_; ++c) {
      auto& order = ranked_[c];
      for (Index r = 0; r < n_; ++r) {
        if (r != c) order.push_back(r);
      }
      std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return p_.Q(a, c) > p_.Q(b, c); });
    }
    cap_ = n_ - p_.k;
  }

  BranchCountSolution run() {
    // z = 0 with any support is feasible.
    best_.s.assign(static_cast<std::size_t>(n_), 0);
    best_.y.assign(static_cast<std::size_t>(n_), 0);
    best_.z.assign(static_cast<std::size_t>(n_), 0);
    best_.y[0] = 1;
    for (Index l = 1; l < p_.k; ++l) best_.s[l] = 1;
    best_.objective = 1;

    in_support_.assign(static_cast<std::size_t>(n_), 0);
    for (Index j = 0; j < n_ && best_.objective < cap_ + 1; ++j) {
      anchor_ = j;
      members_ = {j};
      in_support_[j] = 1;
      mass_[0] = p_.Q.col(j);
      branch(0, 0);
      in_support_[j] = 0;
    }
    best_.nodes = nodes_;
    return best_;
  }

 private:
  // Sum of the `count` largest Q(r, column) over rows r >= start, r != anchor, r != skip.
  double optimistic_mass(Index column, Index start, Index count, Index skip) const {
    double sum = 0.0;
    for (Index r : ranked_[column]) {
      if (count == 0) break;
      if (r < start || r == anchor_ || r == skip) continue;
      sum += p_.Q(r, column);
      --count;
    }
    return sum;
  }

  void branch(Index depth, Index start) {
    if (++nodes_ > budget_) {
      throw Error(ErrorCode::TooLarge, "branch and bound exceeded " + std::to_string(budget_) + " nodes");
    }
    const Eigen::VectorXd& mass = mass_[depth];
    const Index remaining = p_.k - 1 - depth;

    if (remaining == 0) {
      const double in_mass = mass(anchor_);
      Index count = 0;
      for (Index g = 0; g < n_; ++g) {
        if (!in_support_[g] && in_mass + p_.gamma * mass(g) >= 2.0) ++count;
      }
      if (1 + count > best_.objective) record(mass, in_mass);
      return;
    }

    const double in_bound = mass(anchor_) + optimistic_mass(anchor_, start, remaining, -1);
    Index bound = 0;
    for (Index g = 0; g < n_ && bound < cap_; ++g) {
      if (in_support_[g]) continue;
      if (in_bound + p_.gamma * (mass(g) + optimistic_mass(g, start, remaining, g)) >= 2.0) ++bound;
    }
    if (1 + std::min(bound, cap_) <= best_.objective) return;

    for (Index next = start; next < n_ && best_.objective < cap_ + 1; ++next) {
      if (next == anchor_) continue;
      members_.push_back(next);
      in_support_[next] = 1;
      mass_[depth + 1] = mass + p_.Q.col(next);
      branch(depth + 1, next + 1);
      in_support_[next] = 0;
      members_.pop_back();
    }
  }

  void record(const Eigen::VectorXd& mass, double in_mass) {
    std::fill(best_.s.begin(), best_.s.end(), 0);
    std::fill(best_.y.begin(), best_.y.end(), 0);
    std::fill(best_.z.begin(), best_.z.end(), 0);
    best_.y[anchor_] = 1;
    for (Index m : members_) {
      if (m != anchor_) best_.s[m] = 1;
    }
    Index count = 0;
    for (Index g = 0; g < n_; ++g) {
      if (!in_support_[g] && in_mass + p_.gamma * mass(g) >= 2.0) {
        best_.z[g] = 1;
        ++count;
      }
    }
    best_.objective = 1 + count;
  }

  const BranchCountProgram& p_;
  Index n_;
  std::uint64_t budget_;
  Index cap_ = 0;
  std::vector<IndexList> ranked_;
  std::vector<Eigen::VectorXd> mass_;  // mass_[t](c) = q_c^T (s + y) with t + 1 members chosen
  std::vector<char> in_support_;
  IndexList members_;
  Index anchor_ = 0;
  std::uint64_t nodes_ = 0;
  BranchCountSolution best_;
};

}  // namespace

BranchCountSolution solve(const BranchCountProgram& program, std::uint64_t node_budget) {
  const Index n = program.size();
  if (program.Q.rows() != n) throw Error(ErrorCode::InvalidArgument, "Q must be square");
  if (program.k < 1 || program.k > n) throw Error(ErrorCode::InvalidArgument, "program needs 1 <= k <= n");
  if (!(program.gamma >= 1.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be at least 1");
  return BranchAndBound(program, node_budget).run();
}

}  // namespace mbmp
