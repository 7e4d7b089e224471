#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "funkmean/basis.hpp"
#include "funkmean/parallel.hpp"
#include "funkmean/projection.hpp"
#include "funkmean/rng.hpp"

namespace funkmean {

/// Matern covariance sigma2 * 2^{1-nu} / Gamma(nu) * z^nu * K_nu(z), z = sqrt(2 nu) d / ell.
struct MaternParams {
  double sigma2 = 1.0;
  double ell = 1.0;
  double nu = 0.5;
};

void validate(const MaternParams& params);

/// Kernel value at distance d >= 0; exactly sigma2 at d = 0.
double matern_kernel(const MaternParams& params, double distance);

Eigen::MatrixXd matern_cov(const MaternParams& params, std::span<const double> times);

/// Mean functions used by the simulation designs.
struct MeanSpec {
  enum class Kind { zero, linear, neg_quadratic, identity_plus_sine, custom_table };
  Kind kind = Kind::zero;
  double c = 0.0;
  std::vector<double> table;  // custom_table only, one value per grid point

  static MeanSpec zero() { return {}; }
  static MeanSpec linear(double c) { return {Kind::linear, c, {}}; }                          // c x
  static MeanSpec neg_quadratic(double c) { return {Kind::neg_quadratic, c, {}}; }            // -c x^2
  static MeanSpec identity_plus_sine(double c) { return {Kind::identity_plus_sine, c, {}}; }  // x + c sqrt2 sin(10 pi x)
  static MeanSpec custom(std::vector<double> values) { return {Kind::custom_table, 0.0, std::move(values)}; }

  Eigen::VectorXd evaluate(std::span<const double> grid) const;
};

std::string to_string(MeanSpec::Kind kind);
MeanSpec::Kind parse_mean_kind(const std::string& name);

/// Multivariate normal sampler N(mean, cov) with a Cholesky factor.
/// Diagonal jitter starts at 1e-10 * s and grows tenfold up to 1e-6 * s,
/// s = max diagonal entry, until the factorization succeeds.
class GaussianSampler {
 public:
  GaussianSampler(Eigen::VectorXd mean, const Eigen::MatrixXd& cov);

  /// mean + L z with z standard normal drawn from `rng`.
  Eigen::VectorXd draw(RngStream& rng) const;

  double jitter() const noexcept { return jitter_; }
  const Eigen::MatrixXd& factor() const noexcept { return factor_; }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd factor_;
  double jitter_ = 0.0;
};

DiscretizedCurve gp_sample(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, std::span<const double> times,
                           RngStream& rng);

/// m equally spaced points on [0,1] including both endpoints.
std::vector<double> simulation_grid(int m);

struct GroupDesign {
  MaternParams matern;
  MeanSpec mean;
  /// Whether a c sweep rewrites this group's mean coefficient.
  bool follows_sweep = true;
};

enum class SweepKind { nu, c };

std::string to_string(SweepKind kind);

/// A Monte-Carlo design: for each sweep value, `replications` datasets are
/// drawn, projected onto every basis and tested at every p with the bootstrap.
struct ExperimentConfig {
  std::string name;
  std::vector<int> sizes;
  int grid_points = 100;
  std::vector<GroupDesign> groups;
  std::vector<BasisFamily> bases{BasisFamily::haar, BasisFamily::fourier};
  std::vector<int> p_values{2};
  SweepKind sweep = SweepKind::c;
  std::vector<double> sweep_values{0.0};
  int replications = 1000;
  int bootstrap = 500;
  double alpha = 0.05;
  std::uint64_t seed = 1;
};

/// Throws InvalidConfig on inconsistent dimensions or values.
void validate(const ExperimentConfig& config);

/// Group designs with the sweep value applied (nu or mean coefficient).
std::vector<GroupDesign> designs_at(const ExperimentConfig& config, double sweep_value);

/// One dataset of the design at a sweep value. Curve i of group j in
/// replicate r is drawn from the substream (seed, {1, r, j}); the same normals
/// are reused across sweep values.
FunctionalDataset generate_dataset(const ExperimentConfig& config, double sweep_value, std::uint64_t replicate);

struct RejectionRow {
  double sweep_value = 0.0;
  std::string basis;
  int p = 0;
  double reject_rate = 0.0;
  int R = 0;
  int B = 0;
  std::uint64_t seed = 0;
  /// Replicates where a covariance was too ill-conditioned to test; counted as non-rejections.
  int singular = 0;
};

struct RejectionTable {
  SweepKind sweep = SweepKind::c;
  std::vector<RejectionRow> rows;

  const RejectionRow* find(double sweep_value, const std::string& basis, int p) const;
};

using SizeTable = RejectionTable;
using PowerTable = RejectionTable;

/// Rejection proportions per (sweep value, basis, p). Replicates run in
/// parallel; the serial path returns the same table.
RejectionTable run_rejection_experiment(const ExperimentConfig& config, Execution exec = Execution::parallel);

/// Requires equal group means at every sweep value.
SizeTable run_size_experiment(const ExperimentConfig& config, Execution exec = Execution::parallel);

/// Requires differing group means at some sweep value.
PowerTable run_power_experiment(const ExperimentConfig& config, Execution exec = Execution::parallel);

/// Header `nu_or_c,basis,p,reject_rate,R,B,seed`.
void write_table_csv(const RejectionTable& table, const std::string& path);

/// Rejection rate against the sweep value, one series per (basis, p).
void write_table_svg(const RejectionTable& table, const std::string& path, const std::string& title);

}  // namespace funkmean
