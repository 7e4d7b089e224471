#include "funkmean/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "funkmean/error.hpp"

namespace funkmean {

namespace {

bool covers_unit_interval(const std::vector<double>& times) {
  return times.front() == 0.0 && times.back() == 1.0;
}

Eigen::VectorXd weighted_scores(const DiscretizedCurve& curve, const BasisMatrix& basis, const Eigen::VectorXd& w) {
  const Eigen::Map<const Eigen::VectorXd> y(curve.values.data(), static_cast<Eigen::Index>(curve.values.size()));
  return basis.values.transpose() * (w.array() * y.array()).matrix();
}

}  // namespace

std::vector<std::size_t> FunctionalDataset::sizes() const {
  std::vector<std::size_t> out;
  for (const auto& g : groups) out.push_back(g.size());
  return out;
}

bool FunctionalDataset::grids_identical() const {
  const std::vector<double>* reference = nullptr;
  for (const auto& g : groups) {
    for (const auto& c : g) {
      if (reference == nullptr) {
        reference = &c.times;
      } else if (c.times != *reference) {
        return false;
      }
    }
  }
  return true;
}

void validate_curve(const DiscretizedCurve& curve) {
  if (curve.times.size() < 2) throw Error(ErrorCode::GridTooCoarse, "a curve needs at least 2 observation points");
  if (curve.values.size() != curve.times.size()) {
    throw Error(ErrorCode::InvalidCurve, "times and values differ in length");
  }
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    if (!std::isfinite(curve.times[i]) || !std::isfinite(curve.values[i])) {
      throw Error(ErrorCode::InvalidCurve, "non-finite entry at point " + std::to_string(i));
    }
    if (i > 0 && !(curve.times[i] > curve.times[i - 1])) {
      throw Error(ErrorCode::NonMonotoneTimes, "times must be strictly increasing (index " + std::to_string(i) + ")");
    }
  }
}

void validate_dataset(const FunctionalDataset& data) {
  if (data.k() < 2) throw Error(ErrorCode::InvalidDataset, "need at least 2 groups");
  for (std::size_t j = 0; j < data.k(); ++j) {
    if (data.groups[j].empty()) throw Error(ErrorCode::InvalidDataset, "group " + std::to_string(j) + " is empty");
    for (const auto& c : data.groups[j]) validate_curve(c);
  }
}

DiscretizedCurve rescale_domain(const DiscretizedCurve& curve) {
  if (curve.times.size() < 2) throw Error(ErrorCode::GridTooCoarse, "a curve needs at least 2 observation points");
  const auto [lo, hi] = std::minmax_element(curve.times.begin(), curve.times.end());
  const double a = *lo;
  const double span = *hi - *lo;
  if (!(span > 0.0)) throw Error(ErrorCode::DegenerateDomain, "all observation times are equal");
  DiscretizedCurve out = curve;
  for (double& t : out.times) t = (t - a) / span;
  out.times[static_cast<std::size_t>(lo - curve.times.begin())] = 0.0;
  out.times[static_cast<std::size_t>(hi - curve.times.begin())] = 1.0;
  return out;
}

FunctionalDataset rescale_dataset(const FunctionalDataset& data) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& g : data.groups) {
    for (const auto& c : g) {
      for (double t : c.times) {
        lo = std::min(lo, t);
        hi = std::max(hi, t);
      }
    }
  }
  if (lo >= 0.0 && hi <= 1.0) return data;
  if (!(hi > lo)) throw Error(ErrorCode::DegenerateDomain, "all observation times are equal");
  FunctionalDataset out = data;
  for (auto& g : out.groups) {
    for (auto& c : g) {
      for (double& t : c.times) t = t == hi ? 1.0 : (t - lo) / (hi - lo);
    }
  }
  return out;
}

Eigen::VectorXd project_curve(const DiscretizedCurve& curve, const BasisSpec& spec, std::vector<std::string>* warnings) {
  validate_curve(curve);
  const BasisMatrix basis = evaluate_basis(spec, curve.times);
  if (warnings != nullptr && !covers_unit_interval(curve.times)) {
    warnings->push_back("grid does not reach both 0 and 1; integrating over [t_1, t_m] only");
  }
  return weighted_scores(curve, basis, trapezoid_weights(curve.times));
}

GroupedScores project_dataset(const FunctionalDataset& data, const BasisSpec& spec) {
  validate_dataset(data);
  GroupedScores out;
  if (!data.shared_grid && !data.grids_identical()) {
    out.warnings.push_back("curves are observed on different grids; quadrature error is not shared across curves");
  }
  const std::vector<double>* cached_grid = nullptr;
  BasisMatrix basis;
  Eigen::VectorXd w;
  bool warned_endpoints = false;
  for (const auto& group : data.groups) {
    ScoreMatrix scores(static_cast<Eigen::Index>(group.size()), spec.p);
    for (std::size_t i = 0; i < group.size(); ++i) {
      const auto& curve = group[i];
      if (cached_grid == nullptr || (cached_grid != &curve.times && curve.times != *cached_grid)) {
        basis = evaluate_basis(spec, curve.times);
        w = trapezoid_weights(curve.times);
        cached_grid = &curve.times;
      }
      if (!warned_endpoints && !covers_unit_interval(curve.times)) {
        out.warnings.push_back("some grids do not reach both 0 and 1; integrating over [t_1, t_m] only");
        warned_endpoints = true;
      }
      scores.row(static_cast<Eigen::Index>(i)) = weighted_scores(curve, basis, w).transpose();
    }
    out.groups.push_back(std::move(scores));
  }
  return out;
}

}  // namespace funkmean
