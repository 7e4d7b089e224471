#include "funkmean/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "funkmean/error.hpp"

namespace funkmean {

namespace {

constexpr int kReferenceGridPoints = 2049;
constexpr double kRankTolerance = 1e-9;

std::vector<double> uniform_grid(int m) {
  std::vector<double> grid(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) grid[static_cast<std::size_t>(i)] = static_cast<double>(i) / (m - 1);
  return grid;
}

std::vector<double> spline_knots_for(const BasisSpec& spec) {
  if (!spec.spline_knots.empty()) return spec.spline_knots;
  const int interior = std::max(0, spec.p - spec.spline_order);
  std::vector<double> knots;
  for (int i = 1; i <= interior; ++i) knots.push_back(static_cast<double>(i) / (interior + 1));
  return knots;
}

Eigen::MatrixXd spline_values(const BasisSpec& spec, std::span<const double> times) {
  if (spec.spline_order < 1) throw Error(ErrorCode::InvalidConfig, "spline order must be >= 1");
  const auto knots = spline_knots_for(spec);
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!(knots[i] > 0.0 && knots[i] < 1.0) || (i > 0 && knots[i] <= knots[i - 1])) {
      throw Error(ErrorCode::InvalidConfig, "spline knots must be strictly increasing inside (0,1)");
    }
  }
  const int dimension = static_cast<int>(knots.size()) + spec.spline_order;
  if (dimension < spec.p) {
    throw Error(ErrorCode::SplineBasisTooSmall,
                "spline space has dimension " + std::to_string(dimension) + " < p = " + std::to_string(spec.p));
  }
  const auto reference = uniform_grid(kReferenceGridPoints);
  const Eigen::MatrixXd raw_reference = bspline_values(spec.spline_order, knots, reference);
  const Eigen::MatrixXd coefficients = orthonormalize_columns(raw_reference, reference).coefficients;
  const Eigen::MatrixXd raw = bspline_values(spec.spline_order, knots, times);
  return (raw * coefficients).leftCols(spec.p);
}

}  // namespace

std::string to_string(BasisFamily family) {
  switch (family) {
    case BasisFamily::fourier: return "fourier";
    case BasisFamily::haar: return "haar";
    case BasisFamily::spline: return "spline";
  }
  return "unknown";
}

BasisFamily parse_basis_family(std::string_view name) {
  if (name == "fourier") return BasisFamily::fourier;
  if (name == "haar") return BasisFamily::haar;
  if (name == "spline" || name == "spline_orthonormal") return BasisFamily::spline;
  throw Error(ErrorCode::InvalidConfig, "unknown basis family '" + std::string(name) + "'");
}

std::string BasisSpec::label() const { return to_string(family); }

double fourier_function(int index, double t) {
  if (index == 1) return 1.0;
  const int frequency = index / 2;
  const double angle = 2.0 * std::numbers::pi * frequency * t;
  return std::numbers::sqrt2 * (index % 2 == 0 ? std::cos(angle) : std::sin(angle));
}

double haar_function(int index, double t) {
  if (index == 1) return 1.0;
  const int offset = index - 1;  // = 2^j + s
  int level = 0;
  while ((2 << level) <= offset) ++level;
  const int shift = offset - (1 << level);
  const double scale = std::ldexp(1.0, -level);
  const double left = shift * scale;
  const double right = (shift + 1) * scale;
  const double middle = (shift + 0.5) * scale;
  const double height = std::sqrt(std::ldexp(1.0, level));
  // half-open pieces [left, middle) and [middle, right); t = 1 belongs to the last piece
  if (t < left || t > right || (t == right && right < 1.0)) return 0.0;
  return t < middle ? height : -height;
}

void validate_unit_grid(std::span<const double> times) {
  if (times.size() < 2) throw Error(ErrorCode::EmptyGrid, "a grid needs at least 2 points");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0 && times[i] <= 1.0)) {
      throw Error(ErrorCode::TimesOutOfRange, "time " + std::to_string(times[i]) + " outside [0,1]");
    }
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw Error(ErrorCode::NonMonotoneTimes, "times must be strictly increasing (index " + std::to_string(i) + ")");
    }
  }
}

BasisMatrix evaluate_basis(const BasisSpec& spec, std::span<const double> times) {
  if (spec.p < 1) throw Error(ErrorCode::InvalidConfig, "basis size p must be >= 1");
  validate_unit_grid(times);
  BasisMatrix out{std::vector<double>(times.begin(), times.end()), {}};
  const auto m = static_cast<Eigen::Index>(times.size());
  switch (spec.family) {
    case BasisFamily::fourier:
    case BasisFamily::haar: {
      const auto fn = spec.family == BasisFamily::fourier ? fourier_function : haar_function;
      out.values.resize(m, spec.p);
      for (int l = 0; l < spec.p; ++l) {
        for (Eigen::Index i = 0; i < m; ++i) out.values(i, l) = fn(l + 1, times[static_cast<std::size_t>(i)]);
      }
      break;
    }
    case BasisFamily::spline:
      out.values = spline_values(spec, times);
      break;
  }
  return out;
}

Eigen::VectorXd trapezoid_weights(std::span<const double> times) {
  const auto m = static_cast<Eigen::Index>(times.size());
  Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
  for (Eigen::Index l = 0; l + 1 < m; ++l) {
    const double half = 0.5 * (times[static_cast<std::size_t>(l + 1)] - times[static_cast<std::size_t>(l)]);
    w(l) += half;
    w(l + 1) += half;
  }
  return w;
}

Eigen::MatrixXd bspline_values(int order, std::span<const double> interior_knots, std::span<const double> times) {
  const int degree = order - 1;
  std::vector<double> knots(static_cast<std::size_t>(order), 0.0);
  knots.insert(knots.end(), interior_knots.begin(), interior_knots.end());
  knots.insert(knots.end(), static_cast<std::size_t>(order), 1.0);
  const int count = static_cast<int>(interior_knots.size()) + order;

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(times.size()), count);
  std::vector<double> basis(static_cast<std::size_t>(order));
  std::vector<double> left(static_cast<std::size_t>(order));
  std::vector<double> right(static_cast<std::size_t>(order));
  for (std::size_t row = 0; row < times.size(); ++row) {
    const double t = times[row];
    // knot span: knots[span] <= t < knots[span + 1], t = 1 folded into the last span
    int span = count - 1;
    if (t < 1.0) {
      span = static_cast<int>(std::upper_bound(knots.begin(), knots.end(), t) - knots.begin()) - 1;
      span = std::clamp(span, degree, count - 1);
    }
    basis[0] = 1.0;
    for (int j = 1; j <= degree; ++j) {
      left[static_cast<std::size_t>(j)] = t - knots[static_cast<std::size_t>(span + 1 - j)];
      right[static_cast<std::size_t>(j)] = knots[static_cast<std::size_t>(span + j)] - t;
      double saved = 0.0;
      for (int r = 0; r < j; ++r) {
        const double denom = right[static_cast<std::size_t>(r + 1)] + left[static_cast<std::size_t>(j - r)];
        const double temp = basis[static_cast<std::size_t>(r)] / denom;
        basis[static_cast<std::size_t>(r)] = saved + right[static_cast<std::size_t>(r + 1)] * temp;
        saved = left[static_cast<std::size_t>(j - r)] * temp;
      }
      basis[static_cast<std::size_t>(j)] = saved;
    }
    for (int j = 0; j <= degree; ++j) {
      out(static_cast<Eigen::Index>(row), span - degree + j) = basis[static_cast<std::size_t>(j)];
    }
  }
  return out;
}

Orthonormalization orthonormalize_columns(const Eigen::MatrixXd& raw, std::span<const double> times) {
  if (raw.rows() != static_cast<Eigen::Index>(times.size())) {
    throw Error(ErrorCode::DimensionMismatch, "raw values and times differ in length");
  }
  const Eigen::VectorXd w = trapezoid_weights(times);
  const auto q = raw.cols();
  Orthonormalization out{raw, Eigen::MatrixXd::Identity(q, q)};
  auto inner = [&w](const auto& a, const auto& b) { return (a.array() * b.array() * w.array()).sum(); };

  for (Eigen::Index i = 0; i < q; ++i) {
    const double original_norm = std::sqrt(inner(raw.col(i), raw.col(i)));
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < i; ++j) {
        const double r = inner(out.values.col(j), out.values.col(i));
        out.values.col(i) -= r * out.values.col(j);
        out.coefficients.col(i) -= r * out.coefficients.col(j);
      }
    }
    const double norm = std::sqrt(inner(out.values.col(i), out.values.col(i)));
    if (!(original_norm > 0.0) || norm <= kRankTolerance * original_norm) {
      throw Error(ErrorCode::RankDeficient, "column " + std::to_string(i) + " is linearly dependent on earlier columns");
    }
    out.values.col(i) /= norm;
    out.coefficients.col(i) /= norm;
  }
  return out;
}

}  // namespace funkmean
