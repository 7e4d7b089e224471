#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "funkmean/basis.hpp"
#include "funkmean/scores.hpp"

namespace funkmean {

/// One observed curve: strictly increasing times and finite values.
struct DiscretizedCurve {
  std::vector<double> times;
  std::vector<double> values;
};

/// Curves grouped by population. `labels` names the groups (optional).
struct FunctionalDataset {
  std::vector<std::vector<DiscretizedCurve>> groups;
  std::vector<std::string> labels;
  bool shared_grid = false;

  std::size_t k() const noexcept { return groups.size(); }
  std::vector<std::size_t> sizes() const;
  /// True when every curve carries exactly the same grid.
  bool grids_identical() const;
};

/// Throws GridTooCoarse, NonMonotoneTimes, InvalidCurve (NaN/Inf or length mismatch).
void validate_curve(const DiscretizedCurve& curve);

/// Throws InvalidDataset when k < 2 or a group is empty; validates every curve.
void validate_dataset(const FunctionalDataset& data);

/// Affine map of the curve's times onto [0,1] (min -> 0, max -> 1).
DiscretizedCurve rescale_domain(const DiscretizedCurve& curve);

/// Maps all times with one affine map taken from the global min and max.
/// Datasets already inside [0,1] are returned unchanged.
FunctionalDataset rescale_dataset(const FunctionalDataset& data);

/// Trapezium approximation of <curve, b_q> for q = 1..p:
///   sum_l (t_{l+1} - t_l) (Y_{l+1} b_q(t_{l+1}) + Y_l b_q(t_l)) / 2.
/// A grid not reaching 0 or 1 is integrated over [t_1, t_m] only, with a warning.
Eigen::VectorXd project_curve(const DiscretizedCurve& curve, const BasisSpec& spec,
                              std::vector<std::string>* warnings = nullptr);

/// Scores for every curve, preserving group and curve order. Basis evaluations
/// are shared between consecutive curves on the same grid.
GroupedScores project_dataset(const FunctionalDataset& data, const BasisSpec& spec);

}  // namespace funkmean
