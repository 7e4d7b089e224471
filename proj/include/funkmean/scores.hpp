#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace funkmean {

/// n_j x p matrix of basis scores of one group; row i is the score vector of curve i.
using ScoreMatrix = Eigen::MatrixXd;

/// Score matrices of the k groups, in group order. All share the same p.
struct GroupedScores {
  std::vector<ScoreMatrix> groups;
  std::vector<std::string> warnings;

  std::size_t k() const noexcept { return groups.size(); }
  Eigen::Index p() const noexcept { return groups.empty() ? 0 : groups.front().cols(); }
  std::vector<Eigen::Index> sizes() const;

  /// Scores restricted to the first `p` columns.
  GroupedScores leading(Eigen::Index p) const;
  /// Scores restricted to the given 0-based columns, in the given order.
  GroupedScores select(const std::vector<Eigen::Index>& columns) const;
};

/// Throws InvalidDataset (k < 2, empty group) or DimensionMismatch (p differs).
void validate_scores(const GroupedScores& scores);

}  // namespace funkmean
