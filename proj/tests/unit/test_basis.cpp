#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "funkmean/basis.hpp"
#include "funkmean/error.hpp"
#include "oracles.hpp"

using namespace funkmean;
using Catch::Matchers::WithinAbs;

namespace {

Eigen::MatrixXd trapezoid_gram(const Eigen::MatrixXd& values, const std::vector<double>& grid) {
  const Eigen::VectorXd w = trapezoid_weights(grid);
  return values.transpose() * w.asDiagonal() * values;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::EmptyInput;
}

}  // namespace

TEST_CASE("fourier p=1 is the constant one", "[basis]") {
  const std::vector<double> t{0.0, 0.5, 1.0};
  const auto b = evaluate_basis(BasisSpec::fourier(1), t);
  REQUIRE(b.values.cols() == 1);
  for (int i = 0; i < 3; ++i) CHECK(b.values(i, 0) == 1.0);
}

TEST_CASE("haar p=2 at quarter points", "[basis]") {
  const std::vector<double> t{0.25, 0.75};
  const auto b = evaluate_basis(BasisSpec::haar(2), t);
  CHECK(b.values(0, 0) == 1.0);
  CHECK(b.values(1, 0) == 1.0);
  CHECK(b.values(0, 1) == 1.0);
  CHECK(b.values(1, 1) == -1.0);
}

TEST_CASE("fourier column 11 is sqrt2 sin(10 pi t)", "[basis]") {
  CHECK_THAT(fourier_function(11, 0.05), WithinAbs(std::numbers::sqrt2, 1e-14));
  for (double t : {0.0, 0.13, 0.5, 0.77, 1.0}) {
    for (int m = 1; m <= 8; ++m) {
      CHECK_THAT(fourier_function(2 * m, t), WithinAbs(std::numbers::sqrt2 * std::cos(2 * std::numbers::pi * m * t), 1e-14));
      CHECK_THAT(fourier_function(2 * m + 1, t), WithinAbs(std::numbers::sqrt2 * std::sin(2 * std::numbers::pi * m * t), 1e-14));
    }
  }
}

TEST_CASE("haar ordering by level then shift", "[basis]") {
  // psi_{1,1}: index 4, support [1/2, 1), height sqrt2
  CHECK(haar_function(4, 0.55) == Catch::Approx(std::numbers::sqrt2));
  CHECK(haar_function(4, 0.80) == Catch::Approx(-std::numbers::sqrt2));
  CHECK(haar_function(4, 0.25) == 0.0);
  // psi_{2,0}: index 5, support [0, 1/4), height 2
  CHECK(haar_function(5, 0.1) == Catch::Approx(2.0));
  CHECK(haar_function(5, 0.2) == Catch::Approx(-2.0));
  CHECK(haar_function(5, 0.3) == 0.0);
}

TEST_CASE("haar jump points take the right limit, t = 1 the left limit", "[basis]") {
  CHECK(haar_function(2, 0.5) == -1.0);
  CHECK(haar_function(3, 0.5) == 0.0);
  CHECK(haar_function(3, 0.25) == Catch::Approx(-std::numbers::sqrt2));
  CHECK(haar_function(4, 0.5) == Catch::Approx(std::numbers::sqrt2));
  CHECK(haar_function(2, 1.0) == -1.0);
  CHECK(haar_function(4, 1.0) == Catch::Approx(-std::numbers::sqrt2));
  CHECK(haar_function(3, 1.0) == 0.0);
}

TEST_CASE("haar functions are exactly orthonormal on dyadic cells", "[basis][invariant]") {
  // midpoint rule on 2048 cells integrates piecewise-constant dyadic products exactly
  const int cells = 2048;
  std::vector<double> mids(cells);
  for (int i = 0; i < cells; ++i) mids[static_cast<std::size_t>(i)] = (i + 0.5) / cells;
  const auto b = evaluate_basis(BasisSpec::haar(64), mids).values;
  const Eigen::MatrixXd gram = b.transpose() * b / cells;
  CHECK((gram - Eigen::MatrixXd::Identity(64, 64)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("haar trapezium Gram on the 2049-point grid", "[basis][invariant]") {
  // jump nodes cost O(h) per level: bound 2^(J-1) h for finest level J
  const auto grid = oracle::uniform_grid(2049);
  const double h = 1.0 / 2048;
  for (int p : {2, 4, 8, 16, 32, 64}) {
    const auto gram = trapezoid_gram(evaluate_basis(BasisSpec::haar(p), grid).values, grid);
    const int finest = static_cast<int>(std::floor(std::log2(p - 1)));
    const double err = (gram - Eigen::MatrixXd::Identity(p, p)).cwiseAbs().maxCoeff();
    INFO("p = " << p << ", error = " << err);
    CHECK(err <= std::ldexp(1.0, std::max(finest - 1, 0)) * h * (1 + 1e-9));
  }
}

TEST_CASE("fourier and spline trapezium Gram within 1e-3 on 2049 points", "[basis][invariant]") {
  const auto grid = oracle::uniform_grid(2049);
  for (int p : {1, 5, 11, 33, 64}) {
    const auto fg = trapezoid_gram(evaluate_basis(BasisSpec::fourier(p), grid).values, grid);
    CHECK((fg - Eigen::MatrixXd::Identity(p, p)).cwiseAbs().maxCoeff() < 1e-3);
    const auto sg = trapezoid_gram(evaluate_basis(BasisSpec::spline(p), grid).values, grid);
    CHECK((sg - Eigen::MatrixXd::Identity(p, p)).cwiseAbs().maxCoeff() < 1e-3);
  }
}

TEST_CASE("fourier Gram on uniform grids is O(m^-2)", "[basis][invariant]") {
  // trapezium is exact for trigonometric products with period dividing the grid span
  for (int m : {101, 257}) {
    const auto grid = oracle::uniform_grid(m);
    const auto g = trapezoid_gram(evaluate_basis(BasisSpec::fourier(9), grid).values, grid);
    CHECK((g - Eigen::MatrixXd::Identity(9, 9)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("evaluate_basis is deterministic and nested", "[basis]") {
  const auto grid = oracle::uniform_grid(97);
  for (auto fam : {BasisFamily::fourier, BasisFamily::haar}) {
    const auto a = evaluate_basis({fam, 12, 4, {}}, grid).values;
    const auto b = evaluate_basis({fam, 12, 4, {}}, grid).values;
    CHECK(a == b);
    const auto c = evaluate_basis({fam, 5, 4, {}}, grid).values;
    CHECK(a.leftCols(5) == c);
  }
  CHECK_FALSE(BasisSpec::spline(6).nested());
}

TEST_CASE("grid validation errors", "[basis]") {
  CHECK(code_of([] { evaluate_basis(BasisSpec::fourier(2), std::vector<double>{0.5}); }) == ErrorCode::EmptyGrid);
  CHECK(code_of([] { evaluate_basis(BasisSpec::fourier(2), std::vector<double>{0.0, 1.5}); }) == ErrorCode::TimesOutOfRange);
  CHECK(code_of([] { evaluate_basis(BasisSpec::fourier(2), std::vector<double>{0.5, 0.2}); }) == ErrorCode::NonMonotoneTimes);
  CHECK(code_of([] { evaluate_basis(BasisSpec::spline(9, 4, {0.5}), oracle::uniform_grid(20)); }) ==
        ErrorCode::SplineBasisTooSmall);
  CHECK(code_of([] { parse_basis_family("legendre"); }) == ErrorCode::InvalidConfig);
  CHECK(parse_basis_family("spline_orthonormal") == BasisFamily::spline);
}

TEST_CASE("orthonormalize: [1, t] on 101 points", "[basis]") {
  const auto grid = oracle::uniform_grid(101);
  Eigen::MatrixXd raw(101, 2);
  for (int i = 0; i < 101; ++i) {
    raw(i, 0) = 1.0;
    raw(i, 1) = grid[static_cast<std::size_t>(i)];
  }
  const auto q = orthonormalize_columns(raw, grid);
  // independent Gram: explicit trapezium loops
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      double g = 0;
      for (int l = 0; l < 100; ++l) {
        g += 0.5 * (grid[l + 1] - grid[l]) * (q.values(l, a) * q.values(l, b) + q.values(l + 1, a) * q.values(l + 1, b));
      }
      CHECK_THAT(g, WithinAbs(a == b ? 1.0 : 0.0, 1e-10));
    }
  }
  CHECK((raw * q.coefficients - q.values).cwiseAbs().maxCoeff() < 1e-12);
  // second column is (t - 1/2) over its trapezium norm, 1/12 + h^2/6 for a quadratic
  CHECK_THAT(q.values(100, 1), WithinAbs(0.5 / std::sqrt(1.0 / 12 + 1e-4 / 6), 1e-12));
}

TEST_CASE("orthonormalize is idempotent on orthonormal input", "[basis]") {
  const auto grid = oracle::uniform_grid(65);
  const auto fourier = evaluate_basis(BasisSpec::fourier(5), grid).values;
  const auto q = orthonormalize_columns(fourier, grid);
  CHECK((q.values - fourier).cwiseAbs().maxCoeff() < 1e-10);
  for (int i = 0; i < 5; ++i) CHECK(q.coefficients(i, i) > 0.0);
}

TEST_CASE("orthonormalize rejects dependent columns", "[basis]") {
  const auto grid = oracle::uniform_grid(30);
  Eigen::MatrixXd raw(30, 2);
  for (int i = 0; i < 30; ++i) raw(i, 0) = raw(i, 1) = std::sin(grid[static_cast<std::size_t>(i)]);
  CHECK(code_of([&] { orthonormalize_spline(raw, grid); }) == ErrorCode::RankDeficient);
}

TEST_CASE("spline functions do not depend on the caller's grid", "[basis]") {
  const auto coarse = oracle::uniform_grid(9);
  const auto fine = oracle::uniform_grid(2049);
  const auto a = evaluate_basis(BasisSpec::spline(7), coarse).values;
  const auto b = evaluate_basis(BasisSpec::spline(7), fine).values;
  for (int i = 0; i < 9; ++i) {
    for (int l = 0; l < 7; ++l) CHECK_THAT(a(i, l), WithinAbs(b(i * 256, l), 1e-12));
  }
}

TEST_CASE("b-spline values form a partition of unity", "[basis]") {
  const auto grid = oracle::uniform_grid(57);
  const std::vector<double> knots{0.2, 0.45, 0.7};
  const auto raw = bspline_values(4, knots, grid);
  REQUIRE(raw.cols() == 7);
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    CHECK_THAT(raw.row(i).sum(), WithinAbs(1.0, 1e-13));
    CHECK(raw.row(i).minCoeff() >= -1e-15);
  }
}
