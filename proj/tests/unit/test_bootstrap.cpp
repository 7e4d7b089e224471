#include <catch_amalgamated.hpp>

#include <cstring>

#include "funkmean/bootstrap.hpp"
#include "funkmean/error.hpp"
#include "oracles.hpp"

using namespace funkmean;
using Catch::Matchers::WithinAbs;

namespace {

GroupedScores gaussian_groups(RngStream& rng, int p, std::initializer_list<int> sizes, double shift = 0.0) {
  GroupedScores s;
  int j = 0;
  for (int n : sizes) {
    const Eigen::MatrixXd cov = oracle::random_spd(p, rng, 10.0);
    s.groups.push_back(oracle::gaussian_rows(n, Eigen::VectorXd::Constant(p, j == 0 ? 0.0 : shift), cov, rng));
    ++j;
  }
  return s;
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

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("bootstrap configuration is validated", "[bootstrap]") {
  RngStream rng(1, {});
  const auto s = gaussian_groups(rng, 2, {10, 10});
  BootstrapConfig c;
  c.B = 0;
  CHECK(code_of([&] { bootstrap_test(s, c); }) == ErrorCode::InvalidConfig);
  c.B = 10;
  c.alpha = 1.5;
  CHECK(code_of([&] { bootstrap_test(s, c); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("bootstrap is a pure function of the seed", "[bootstrap]") {
  RngStream rng(2, {});
  const auto s = gaussian_groups(rng, 3, {25, 18});
  BootstrapConfig c;
  c.B = 300;
  c.seed = 77;
  const auto a = bootstrap_test(s, c);
  const auto b = bootstrap_test(s, c);
  CHECK(bitwise_equal(a.w_star, b.w_star));
  CHECK(a.p_boot == b.p_boot);
  c.seed = 78;
  CHECK_FALSE(bitwise_equal(a.w_star, bootstrap_test(s, c).w_star));
}

TEST_CASE("serial and parallel kernels are bit-identical", "[bootstrap]") {
  RngStream rng(3, {});
  for (int trial = 0; trial < 5; ++trial) {
    const auto s = gaussian_groups(rng, 2 + trial, {30, 22, 15 + trial});
    BootstrapConfig c;
    c.B = 257;
    c.seed = 1000 + static_cast<std::uint64_t>(trial);
    const auto serial = bootstrap_test(s, c, {}, Execution::serial);
    const auto parallel = bootstrap_test(s, c, {}, Execution::parallel);
    CHECK(bitwise_equal(serial.w_star, parallel.w_star));
    CHECK(serial.p_boot == parallel.p_boot);
    CHECK(serial.redraws == parallel.redraws);
  }
}

TEST_CASE("centered groups have mean zero", "[bootstrap]") {
  RngStream rng(4, {});
  const auto s = gaussian_groups(rng, 3, {12, 9}, 5.0);
  for (const auto& g : center_groups(s)) CHECK(g.colwise().mean().cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("resampling keeps size and draws rows uniformly", "[bootstrap]") {
  RngStream rng(5, {});
  const ScoreMatrix zeros = ScoreMatrix::Zero(7, 3);
  const auto r = resample_group(zeros, rng);
  CHECK(r.rows() == 7);
  CHECK(r.cols() == 3);
  CHECK(r.isZero(0.0));

  ScoreMatrix two(2, 1);
  two << -1.0, 1.0;
  int first = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const auto d = resample_group(two, rng);
    REQUIRE(d.rows() == 2);
    first += d(0, 0) == -1.0 ? 1 : 0;
  }
  const double freq = static_cast<double>(first) / draws;
  CHECK(freq >= 0.47);
  CHECK(freq <= 0.53);
}

TEST_CASE("p_boot is the share of replicates at or above the observed W", "[bootstrap]") {
  RngStream rng(6, {});
  const auto s = gaussian_groups(rng, 2, {20, 20}, 0.3);
  BootstrapConfig c;
  c.B = 199;
  c.seed = 9;
  const auto r = bootstrap_test(s, c);
  REQUIRE(r.w_star.size() == 199);
  std::size_t exceed = 0;
  for (double w : r.w_star) exceed += w >= r.w_observed ? 1 : 0;
  CHECK(r.p_boot == static_cast<double>(exceed) / 199.0);
  CHECK(r.reject == (r.p_boot < 0.05));
  c.plus_one_correction = true;
  CHECK(bootstrap_test(s, c).p_boot == static_cast<double>(exceed + 1) / 200.0);
  // observed W matches the statistic on the raw scores
  const auto t = t_flrt(s);
  CHECK_THAT(r.w_observed, WithinAbs(t.w, 1e-12));
}

TEST_CASE("replicate b uses only its own substream", "[bootstrap]") {
  RngStream rng(7, {});
  const auto s = gaussian_groups(rng, 2, {15, 15});
  const auto centered = center_groups(s);
  const auto many = bootstrap_replicates(centered, 50, 123, 100, {}, Execution::serial);
  const auto few = bootstrap_replicates(centered, 10, 123, 100, {}, Execution::serial);
  for (std::size_t b = 0; b < 10; ++b) CHECK(many.w_star[b] == few.w_star[b]);
  // hand-built replicate 3
  RngStream r3(123, {3});
  std::vector<GroupCovariance> covs;
  for (const auto& g : centered) covs.push_back(group_covariance(resample_group(g, r3)));
  CHECK(many.w_star[3] == standardize(flrt_statistic(covs), 2, 2));
}

TEST_CASE("degenerate resamples give ResampleDegenerate", "[bootstrap]") {
  // each group has one distinct row pair; most resamples of size 2 are constant
  ScoreMatrix g(2, 1);
  g << 0.0, 1.0;
  GroupedScores s{{g, g}, {}};
  BootstrapConfig c;
  c.B = 200;
  c.max_attempts = 1;
  CHECK(code_of([&] { bootstrap_test(s, c); }) == ErrorCode::ResampleDegenerate);
  // a constant group never recovers
  ScoreMatrix flat = ScoreMatrix::Ones(5, 1);
  GroupedScores bad{{g, flat}, {}};
  c.max_attempts = 100;
  CHECK(code_of([&] { bootstrap_replicates(center_groups(bad), 3, 1, 100, {}, Execution::serial); }) ==
        ErrorCode::ResampleDegenerate);
  // with the default cap, n_j = 2 groups recover by redrawing
  c.B = 50;
  const auto r = bootstrap_test(s, c);
  CHECK(r.w_star.size() == 50);
  CHECK(r.redraws > 0);
}

TEST_CASE("bootstrap test holds its size", "[bootstrap][stochastic]") {
  const int reps = 1000;
  int rejections = 0;
  for (int r = 0; r < reps; ++r) {
    RngStream rng(2024, {static_cast<std::uint64_t>(r)});
    GroupedScores s;
    const Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(3, 3);
    s.groups.push_back(oracle::gaussian_rows(50, Eigen::VectorXd::Zero(3), cov, rng));
    s.groups.push_back(oracle::gaussian_rows(30, Eigen::VectorXd::Zero(3), 2.0 * cov, rng));
    BootstrapConfig c;
    c.B = 1000;
    c.seed = derive_key(99, {static_cast<std::uint64_t>(r)});
    rejections += bootstrap_test(s, c).reject ? 1 : 0;
  }
  const double rate = static_cast<double>(rejections) / reps;
  INFO("size " << rate);
  CHECK(rate >= 0.035);
  CHECK(rate <= 0.065);
}

TEST_CASE("bootstrap has power against a clear shift", "[bootstrap][stochastic]") {
  int rejections = 0;
  for (int r = 0; r < 100; ++r) {
    RngStream rng(77, {static_cast<std::uint64_t>(r)});
    const auto s = gaussian_groups(rng, 3, {60, 60}, 1.0);
    BootstrapConfig c;
    c.B = 200;
    c.seed = static_cast<std::uint64_t>(r);
    rejections += bootstrap_test(s, c).reject ? 1 : 0;
  }
  CHECK(rejections >= 90);
}
