#include <catch_amalgamated.hpp>

#include <cmath>

#include "funkmean/error.hpp"
#include "funkmean/presets.hpp"
#include "funkmean/simulate.hpp"

using namespace funkmean;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::EmptyInput;
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.name = "small";
  c.sizes = {12, 10};
  c.grid_points = 30;
  c.groups = {{{1.0, 0.5, 1.5}, MeanSpec::zero(), true}, {{2.0, 0.5, 1.5}, MeanSpec::linear(0.0), true}};
  c.p_values = {2, 3};
  c.sweep_values = {0.0, 1.5};
  c.replications = 12;
  c.bootstrap = 40;
  c.seed = 5;
  return c;
}

}  // namespace

TEST_CASE("matern kernel at zero distance is sigma2", "[simulate]") {
  for (double nu : {0.5, 1.0, 2.5, 7.0, 50.0}) CHECK(matern_kernel({2.5, 0.3, nu}, 0.0) == 2.5);
}

TEST_CASE("matern closed forms for half-integer smoothness", "[simulate]") {
  for (double ell : {0.2, 1.0, 3.0}) {
    for (double d : {1e-6, 0.01, 0.1, 0.5, 1.0, 2.0}) {
      const double z1 = d / ell;
      const double z3 = std::sqrt(3.0) * d / ell;
      const double z5 = std::sqrt(5.0) * d / ell;
      CHECK_THAT(matern_kernel({1.7, ell, 0.5}, d), WithinAbs(1.7 * std::exp(-z1), 1e-10));
      CHECK_THAT(matern_kernel({1.7, ell, 1.5}, d), WithinAbs(1.7 * (1 + z3) * std::exp(-z3), 1e-10));
      CHECK_THAT(matern_kernel({1.7, ell, 2.5}, d), WithinAbs(1.7 * (1 + z5 + z5 * z5 / 3) * std::exp(-z5), 1e-10));
    }
  }
}

TEST_CASE("matern kernel is continuous and decreasing for large smoothness", "[simulate]") {
  double prev = matern_kernel({1.0, 1.0, 50.0}, 0.0);
  for (double d = 1e-8; d < 3.0; d *= 1.7) {
    const double k = matern_kernel({1.0, 1.0, 50.0}, d);
    CHECK(k <= prev * (1 + 1e-12));
    CHECK(k > 0.0);
    prev = k;
  }
  CHECK_THAT(matern_kernel({1.0, 1.0, 50.0}, 1e-9), WithinAbs(1.0, 1e-9));
}

TEST_CASE("matern parameters are validated", "[simulate]") {
  CHECK(code_of([] { validate(MaternParams{0.0, 1.0, 1.0}); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { validate(MaternParams{1.0, -1.0, 1.0}); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { validate(MaternParams{1.0, 1.0, 0.0}); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("gaussian sampler moments", "[simulate][stochastic]") {
  const auto grid = simulation_grid(5);
  const MaternParams params{2.0, 0.7, 1.5};
  const Eigen::MatrixXd cov = matern_cov(params, grid);
  Eigen::VectorXd mean(5);
  mean << 1, -2, 0.5, 3, 0;
  const GaussianSampler sampler(mean, cov);
  RngStream rng(17, {});
  const int n = 10000;
  Eigen::MatrixXd draws(n, 5);
  for (int i = 0; i < n; ++i) draws.row(i) = sampler.draw(rng).transpose();
  const Eigen::VectorXd m = draws.colwise().mean().transpose();
  for (int a = 0; a < 5; ++a) CHECK(std::abs(m(a) - mean(a)) < 4 * std::sqrt(2.0) / 100);
  const Eigen::MatrixXd centered = draws.rowwise() - m.transpose();
  const Eigen::MatrixXd s = centered.transpose() * centered / n;
  CHECK((s - cov).cwiseAbs().maxCoeff() < 0.05 * 2.0);
}

TEST_CASE("zero covariance returns the mean", "[simulate]") {
  Eigen::VectorXd mean(3);
  mean << 1, 2, 3;
  const std::vector<double> t{0.0, 0.5, 1.0};
  RngStream rng(1, {});
  const auto c = gp_sample(mean, Eigen::MatrixXd::Zero(3, 3), t, rng);
  CHECK(c.times == t);
  for (int i = 0; i < 3; ++i) CHECK_THAT(c.values[static_cast<std::size_t>(i)], WithinAbs(mean(i), 1e-4));
}

TEST_CASE("sampler adds the smallest jitter that factors", "[simulate]") {
  // rank one covariance
  const Eigen::MatrixXd cov = Eigen::MatrixXd::Ones(4, 4);
  const GaussianSampler s(Eigen::VectorXd::Zero(4), cov);
  CHECK(s.jitter() > 0.0);
  CHECK(s.jitter() <= 1e-6);
  const GaussianSampler plain(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2));
  CHECK(plain.jitter() == Catch::Approx(1e-10));
}

TEST_CASE("mean families", "[simulate]") {
  const std::vector<double> grid{0.0, 0.05, 0.5, 1.0};
  const auto lin = MeanSpec::linear(2.0).evaluate(grid);
  CHECK(lin(3) == 2.0);
  CHECK(MeanSpec::neg_quadratic(2.0).evaluate(grid)(2) == -0.5);
  CHECK_THAT(MeanSpec::identity_plus_sine(1.0).evaluate(grid)(1), WithinAbs(0.05 + std::sqrt(2.0), 1e-14));
  CHECK(code_of([] { MeanSpec::custom({1.0, 2.0}).evaluate(std::vector<double>{0.0, 0.5, 1.0}); }) ==
        ErrorCode::InvalidConfig);
  CHECK(parse_mean_kind("neg_quadratic") == MeanSpec::Kind::neg_quadratic);
}

TEST_CASE("generated datasets are deterministic", "[simulate]") {
  const auto c = small_config();
  const auto a = generate_dataset(c, 1.5, 3);
  const auto b = generate_dataset(c, 1.5, 3);
  REQUIRE(a.k() == 2);
  CHECK(a.groups[0].size() == 12);
  CHECK(a.groups[1].size() == 10);
  CHECK(a.groups[1][4].values == b.groups[1][4].values);
  CHECK(a.groups[0][0].values != generate_dataset(c, 1.5, 4).groups[0][0].values);
}

TEST_CASE("sweep values reuse the same normals", "[simulate]") {
  const auto c = small_config();
  const auto lo = generate_dataset(c, 0.0, 2);
  const auto hi = generate_dataset(c, 1.5, 2);
  CHECK(lo.groups[0][3].values == hi.groups[0][3].values);
  for (std::size_t i = 0; i < lo.groups[1].size(); ++i) {
    for (std::size_t t = 0; t < lo.groups[1][i].values.size(); ++t) {
      const double x = lo.groups[1][i].times[t];
      CHECK_THAT(hi.groups[1][i].values[t] - lo.groups[1][i].values[t], WithinAbs(1.5 * x, 1e-12));
    }
  }
}

TEST_CASE("designs_at applies the sweep", "[simulate]") {
  auto c = table_preset("table1");
  const auto d = designs_at(c, 5.0);
  CHECK(d[0].matern.nu == 5.0);
  CHECK(d[1].matern.nu == 5.0);
  c = table_preset("table3");
  const auto e = designs_at(c, 0.4);
  CHECK(e[0].mean.c == 0.0);
  CHECK(e[1].mean.c == 0.4);
}

TEST_CASE("experiment configuration is validated", "[simulate]") {
  auto c = small_config();
  c.sizes = {12};
  CHECK(code_of([&] { validate(c); }) == ErrorCode::InvalidConfig);
  c = small_config();
  c.p_values = {0};
  CHECK(code_of([&] { validate(c); }) == ErrorCode::InvalidConfig);
  c = small_config();
  c.replications = 0;
  CHECK(code_of([&] { validate(c); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("serial and parallel experiments return the same table", "[simulate]") {
  const auto c = small_config();
  const auto a = run_rejection_experiment(c, Execution::serial);
  const auto b = run_rejection_experiment(c, Execution::parallel);
  REQUIRE(a.rows.size() == 2 * 2 * 2);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].reject_rate == b.rows[i].reject_rate);
    CHECK(a.rows[i].basis == b.rows[i].basis);
    CHECK(a.rows[i].singular == b.rows[i].singular);
  }
  REQUIRE(a.find(1.5, "fourier", 3) != nullptr);
  CHECK(a.find(1.5, "fourier", 3)->R == 12);
  CHECK(a.find(2.0, "fourier", 3) == nullptr);
}

TEST_CASE("size and power experiments check their designs", "[simulate]") {
  auto c = small_config();
  CHECK(code_of([&] { run_size_experiment(c); }) == ErrorCode::InvalidConfig);
  c.sweep_values = {0.0};
  CHECK(code_of([&] { run_power_experiment(c); }) == ErrorCode::InvalidConfig);
  c.replications = 4;
  c.bootstrap = 10;
  CHECK(run_size_experiment(c).rows.size() == 4);
}

TEST_CASE("strong alternatives are rejected", "[simulate][stochastic]") {
  auto c = small_config();
  c.sizes = {40, 40};
  c.sweep_values = {3.0};
  c.replications = 40;
  c.bootstrap = 100;
  const auto t = run_power_experiment(c);
  for (const auto& row : t.rows) CHECK(row.reject_rate >= 0.9);
}

TEST_CASE("smooth null design holds its size", "[simulate][stochastic]") {
  auto c = table_preset("table1");
  c.sweep_values = {5.0};
  c.bases = {BasisFamily::haar};
  c.replications = 1000;
  c.bootstrap = 1000;
  const auto t = run_size_experiment(c);
  REQUIRE(t.rows.size() == 1);
  INFO("rate " << t.rows[0].reject_rate << ", singular " << t.rows[0].singular);
  CHECK(t.rows[0].reject_rate >= 0.031);
  CHECK(t.rows[0].reject_rate <= 0.061);
}
