#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace funkmean {

enum class BasisFamily { fourier, haar, spline };

std::string to_string(BasisFamily family);
BasisFamily parse_basis_family(std::string_view name);

/// A truncated orthonormal basis of L2[0,1].
///
/// Fourier ordering: 1, sqrt2 cos(2 pi t), sqrt2 sin(2 pi t), sqrt2 cos(4 pi t), ...
/// so column 2m is the cosine and column 2m+1 the sine of frequency m.
///
/// Haar ordering: the constant, then wavelets psi_{j,s} by level j = 0, 1, ...
/// and shift s = 0 .. 2^j - 1. psi_{j,s} is +2^{j/2} on the left half of
/// [s 2^-j, (s+1) 2^-j) and -2^{j/2} on the right half. Jump points take the
/// right limit (half-open pieces), except t = 1, which takes the left limit.
///
/// Spline: clamped B-splines of `spline_order` on `spline_knots` (interior
/// knots in (0,1)), orthonormalized by weighted Gram-Schmidt on a fixed
/// 2049-point reference grid, so the functions do not depend on the caller's grid.
/// With no knots given, p - order uniform interior knots are used.
struct BasisSpec {
  BasisFamily family = BasisFamily::fourier;
  int p = 3;
  int spline_order = 4;
  std::vector<double> spline_knots;

  static BasisSpec fourier(int p) { return {BasisFamily::fourier, p, 4, {}}; }
  static BasisSpec haar(int p) { return {BasisFamily::haar, p, 4, {}}; }
  static BasisSpec spline(int p, int order = 4, std::vector<double> knots = {}) {
    return {BasisFamily::spline, p, order, std::move(knots)};
  }

  /// True when the first q functions of spec(p) equal spec(q) for q <= p.
  bool nested() const noexcept { return family != BasisFamily::spline; }

  std::string label() const;
};

struct BasisMatrix {
  std::vector<double> times;
  Eigen::MatrixXd values;  // m x p, column l is b_{l+1}(times)
};

/// b_index(t), 1-based.
double fourier_function(int index, double t);
double haar_function(int index, double t);

/// Throws EmptyGrid / TimesOutOfRange / NonMonotoneTimes on a bad grid.
void validate_unit_grid(std::span<const double> times);

BasisMatrix evaluate_basis(const BasisSpec& spec, std::span<const double> times);

/// Trapezium weights w so that sum_l w_l f(t_l) approximates the integral over [t_1, t_m].
Eigen::VectorXd trapezoid_weights(std::span<const double> times);

/// Raw clamped B-spline basis (m x (knots + order)) by Cox-de Boor recursion.
Eigen::MatrixXd bspline_values(int order, std::span<const double> interior_knots,
                               std::span<const double> times);

struct Orthonormalization {
  Eigen::MatrixXd values;        // m x q, orthonormal under trapezium weights
  Eigen::MatrixXd coefficients;  // q x q upper triangular, values = raw * coefficients
};

/// Modified Gram-Schmidt (two passes) in the trapezium inner product on `times`.
/// Column i of the result has positive inner product with raw column i.
/// Throws RankDeficient when a column is numerically in the span of earlier ones.
Orthonormalization orthonormalize_columns(const Eigen::MatrixXd& raw, std::span<const double> times);

inline Eigen::MatrixXd orthonormalize_spline(const Eigen::MatrixXd& raw, std::span<const double> times) {
  return orthonormalize_columns(raw, times).values;
}

}  // namespace funkmean
