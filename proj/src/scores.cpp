#include "funkmean/scores.hpp"

#include "funkmean/error.hpp"

namespace funkmean {

std::vector<Eigen::Index> GroupedScores::sizes() const {
  std::vector<Eigen::Index> out;
  out.reserve(groups.size());
  for (const auto& g : groups) out.push_back(g.rows());
  return out;
}

GroupedScores GroupedScores::leading(Eigen::Index p) const {
  GroupedScores out;
  out.groups.reserve(groups.size());
  for (const auto& g : groups) out.groups.emplace_back(g.leftCols(p));
  return out;
}

GroupedScores GroupedScores::select(const std::vector<Eigen::Index>& columns) const {
  GroupedScores out;
  out.groups.reserve(groups.size());
  for (const auto& g : groups) {
    ScoreMatrix picked(g.rows(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t c = 0; c < columns.size(); ++c) picked.col(static_cast<Eigen::Index>(c)) = g.col(columns[c]);
    out.groups.push_back(std::move(picked));
  }
  return out;
}

void validate_scores(const GroupedScores& scores) {
  if (scores.k() < 2) throw Error(ErrorCode::InvalidDataset, "need at least 2 groups");
  const Eigen::Index p = scores.p();
  if (p < 1) throw Error(ErrorCode::DimensionMismatch, "score dimension must be >= 1");
  for (std::size_t j = 0; j < scores.k(); ++j) {
    if (scores.groups[j].rows() < 1) {
      throw Error(ErrorCode::InvalidDataset, "group " + std::to_string(j) + " is empty");
    }
    if (scores.groups[j].cols() != p) {
      throw Error(ErrorCode::DimensionMismatch, "group " + std::to_string(j) + " has a different score dimension");
    }
  }
}

}  // namespace funkmean
