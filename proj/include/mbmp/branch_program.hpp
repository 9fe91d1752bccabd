#pragma once

#include "mbmp/numlin.hpp"

#include <cstdint>
#include <vector>

namespace mbmp {

// Binary program for the smallest branch count meeting MB-coherence at one node.
// Q = |Abar^H Abar| of the refined dictionary, gamma = 1 / (1 - OIR), k = K - |C|.
//
//   maximize   1 + sum_l z_l
//   subject to (q_j + gamma q_g)^T (s + y) >= 2 (y_j + z_g - 1)   for all g != j
//              sum_l s_l = k - 1,  sum_l y_l = 1
//              y_l + s_l + z_l <= 1,  s, y, z binary
//
// y marks the in-support index attaining the largest in-support mass, s the rest of
// the support and z the out-of-support atoms whose combined mass reaches 2.
struct BranchCountProgram {
  Eigen::MatrixXd Q;
  double gamma = 1.0;
  Index k = 1;

  Index size() const { return Q.cols(); }
};

struct BranchCountSolution {
  std::vector<char> s;
  std::vector<char> y;
  std::vector<char> z;
  Index objective = 0;
  std::uint64_t nodes = 0;
};

/// Checks every constraint of the program for a candidate assignment.
bool is_feasible(const BranchCountProgram& program, const BranchCountSolution& solution);

/// Exact depth-first branch and bound: branch on y, then on s in index order, prune
/// with an optimistic completion bound on sum z, keep the best incumbent.
/// Throws TooLarge past node_budget.
BranchCountSolution solve(const BranchCountProgram& program, std::uint64_t node_budget);

}  // namespace mbmp
