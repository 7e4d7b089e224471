#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "funkmean/scores.hpp"

namespace funkmean {

/// Inversion policy for group covariances. A covariance is rejected as singular
/// when its smallest eigenvalue is <= 0 or lambda_max / lambda_min exceeds
/// `condition_limit`. `jitter` (default off) adds jitter * I before inverting.
struct CovarianceOptions {
  double condition_limit = 1e12;
  double jitter = 0.0;
};

/// Group mean and covariance with divisor n_j.
struct GroupCovariance {
  Eigen::VectorXd mean;
  Eigen::MatrixXd sigma_hat;
  Eigen::Index n = 0;
};

GroupCovariance group_covariance(const ScoreMatrix& scores);

/// Inverse and symmetric inverse square root from one eigendecomposition.
struct WhitenedCovariance {
  Eigen::MatrixXd inverse;
  Eigen::MatrixXd inverse_sqrt;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double condition = 0.0;
};

/// Throws SingularCovarianceError(group) under the policy above.
WhitenedCovariance whiten(const Eigen::MatrixXd& sigma, std::size_t group, const CovarianceOptions& options = {});

/// Precision-weighted pooled mean (sum_j n_j S_j^-1)^-1 (sum_j n_j S_j^-1 ybar_j).
Eigen::VectorXd pooled_mean(std::span<const GroupCovariance> covs, const CovarianceOptions& options = {});

struct ConditionEntry {
  double condition = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

struct TestResult {
  double t_flrt = 0.0;
  double df = 0.0;
  double w = 0.0;         // (t_flrt - df) / sqrt(2 df)
  double p_normal = 1.0;  // P(N(0,1) >= w)
  double p_chisq = 1.0;   // P(chi2_df >= t_flrt)
  std::vector<ConditionEntry> condition_report;
  std::vector<std::string> warnings;
};

/// T = sum_j n_j (ybar_j - mu)^T S_j^-1 (ybar_j - mu) from precomputed group moments.
double flrt_statistic(std::span<const GroupCovariance> covs, const CovarianceOptions& options = {});

/// Standardized statistic W = (T - df) / sqrt(2 df) with df = p (k - 1).
double standardize(double t, Eigen::Index p, std::size_t k);

TestResult t_flrt(const GroupedScores& scores, const CovarianceOptions& options = {});

/// P = S B S^T and Q = I - P for the stacked whitening matrix S with blocks
/// sqrt(n_j) Sigma_j^{-1/2} and B = (sum_j n_j Sigma_j^{-1})^{-1}.
struct ProjectionPair {
  Eigen::MatrixXd P;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd B;
  Eigen::MatrixXd stacked;  // pk x p
};

ProjectionPair projection_pair(std::span<const Eigen::MatrixXd> covs, std::span<const double> sizes,
                               const CovarianceOptions& options = {});

/// Plug-in estimate of v_d^T Q v_d, where v_d stacks Sigma_j^{-1/2} (ybar_1 - ybar_j).
/// `raw` keeps the unclamped value; `value` is clamped at 0.
struct NoncentralityEstimate {
  double value = 0.0;
  double raw = 0.0;
};

NoncentralityEstimate noncentrality_estimate(const GroupedScores& scores, const CovarianceOptions& options = {});

/// Same quantity from population (or any supplied) means and covariances.
NoncentralityEstimate noncentrality_from_moments(std::span<const Eigen::VectorXd> means,
                                                 std::span<const Eigen::MatrixXd> covs,
                                                 std::span<const double> sizes,
                                                 const CovarianceOptions& options = {});

/// Classical two-sample Hotelling T^2 with pooled (n1 + n2 - 2) covariance.
struct HotellingResult {
  double t2 = 0.0;
  double f = 0.0;
  double df1 = 0.0;
  double df2 = 0.0;
  double p_value = 1.0;
};

HotellingResult hotelling_t2(const GroupedScores& scores, const CovarianceOptions& options = {});

}  // namespace funkmean
