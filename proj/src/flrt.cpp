#include "funkmean/flrt.hpp"

#include <cmath>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "funkmean/error.hpp"

namespace funkmean {

namespace {

Eigen::LLT<Eigen::MatrixXd> factor_precision_sum(const Eigen::MatrixXd& precision_sum) {
  Eigen::LLT<Eigen::MatrixXd> llt(precision_sum);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularCovariance, "sum of weighted precisions is not positive definite");
  }
  return llt;
}

std::string condition_text(double condition) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", condition);
  return buf;
}

}  // namespace

GroupCovariance group_covariance(const ScoreMatrix& scores) {
  const Eigen::Index n = scores.rows();
  if (n < 2) throw Error(ErrorCode::TooFewObservations, "a group covariance needs at least 2 observations");
  GroupCovariance out;
  out.n = n;
  out.mean = scores.colwise().mean().transpose();
  const Eigen::MatrixXd centered = scores.rowwise() - out.mean.transpose();
  out.sigma_hat = (centered.transpose() * centered) / static_cast<double>(n);
  out.sigma_hat = 0.5 * (out.sigma_hat + out.sigma_hat.transpose());
  return out;
}

WhitenedCovariance whiten(const Eigen::MatrixXd& sigma, std::size_t group, const CovarianceOptions& options) {
  Eigen::MatrixXd m = sigma;
  if (options.jitter > 0.0) m.diagonal().array() += options.jitter;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (eig.info() != Eigen::Success) {
    throw SingularCovarianceError(group, INFINITY, "eigendecomposition failed for group " + std::to_string(group));
  }
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  WhitenedCovariance out;
  out.lambda_min = lambda.minCoeff();
  out.lambda_max = lambda.maxCoeff();
  out.condition = out.lambda_min > 0.0 ? out.lambda_max / out.lambda_min : INFINITY;
  if (!(out.lambda_min > 0.0) || !(out.condition <= options.condition_limit)) {
    throw SingularCovarianceError(group, out.condition,
                                  "covariance of group " + std::to_string(group) + " is singular (condition number " +
                                      condition_text(out.condition) + "); lower p or check for degenerate scores");
  }
  const Eigen::MatrixXd& v = eig.eigenvectors();
  out.inverse = v * lambda.cwiseInverse().asDiagonal() * v.transpose();
  out.inverse_sqrt = v * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
  return out;
}

Eigen::VectorXd pooled_mean(std::span<const GroupCovariance> covs, const CovarianceOptions& options) {
  const Eigen::Index p = covs.front().mean.size();
  Eigen::MatrixXd precision_sum = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd weighted = Eigen::VectorXd::Zero(p);
  for (std::size_t j = 0; j < covs.size(); ++j) {
    const Eigen::MatrixXd prec = static_cast<double>(covs[j].n) * whiten(covs[j].sigma_hat, j, options).inverse;
    precision_sum += prec;
    weighted += prec * covs[j].mean;
  }
  return factor_precision_sum(precision_sum).solve(weighted);
}

double flrt_statistic(std::span<const GroupCovariance> covs, const CovarianceOptions& options) {
  const Eigen::Index p = covs.front().mean.size();
  std::vector<Eigen::MatrixXd> inverses;
  inverses.reserve(covs.size());
  Eigen::MatrixXd precision_sum = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd weighted = Eigen::VectorXd::Zero(p);
  for (std::size_t j = 0; j < covs.size(); ++j) {
    inverses.push_back(whiten(covs[j].sigma_hat, j, options).inverse);
    const double n = static_cast<double>(covs[j].n);
    precision_sum.noalias() += n * inverses.back();
    weighted.noalias() += n * (inverses.back() * covs[j].mean);
  }
  const Eigen::VectorXd mu = factor_precision_sum(precision_sum).solve(weighted);
  double t = 0.0;
  for (std::size_t j = 0; j < covs.size(); ++j) {
    const Eigen::VectorXd r = covs[j].mean - mu;
    t += static_cast<double>(covs[j].n) * r.dot(inverses[j] * r);
  }
  return std::max(t, 0.0);
}

double standardize(double t, Eigen::Index p, std::size_t k) {
  const double df = static_cast<double>(p) * static_cast<double>(k - 1);
  return (t - df) / std::sqrt(2.0 * df);
}

TestResult t_flrt(const GroupedScores& scores, const CovarianceOptions& options) {
  validate_scores(scores);
  const Eigen::Index p = scores.p();
  const std::size_t k = scores.k();
  TestResult result;
  std::vector<GroupCovariance> covs;
  covs.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    const Eigen::Index n = scores.groups[j].rows();
    if (n <= 2 * p) {
      result.warnings.push_back("group " + std::to_string(j) + " has n = " + std::to_string(n) + " <= 2p = " +
                                std::to_string(2 * p) + "; the statistic may be ill-conditioned");
    }
    covs.push_back(group_covariance(scores.groups[j]));
    const auto w = whiten(covs.back().sigma_hat, j, options);
    result.condition_report.push_back({w.condition, w.lambda_min, w.lambda_max});
  }
  result.t_flrt = flrt_statistic(covs, options);
  result.df = static_cast<double>(p) * static_cast<double>(k - 1);
  result.w = standardize(result.t_flrt, p, k);
  result.p_normal = 0.5 * std::erfc(result.w / std::sqrt(2.0));
  result.p_chisq = boost::math::gamma_q(0.5 * result.df, 0.5 * result.t_flrt);
  return result;
}

ProjectionPair projection_pair(std::span<const Eigen::MatrixXd> covs, std::span<const double> sizes,
                               const CovarianceOptions& options) {
  if (covs.size() != sizes.size() || covs.size() < 2) {
    throw Error(ErrorCode::DimensionMismatch, "need matching covariance and size lists with k >= 2");
  }
  const Eigen::Index p = covs.front().rows();
  const auto k = static_cast<Eigen::Index>(covs.size());
  ProjectionPair out;
  out.stacked.resize(p * k, p);
  Eigen::MatrixXd precision_sum = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    if (covs[ju].rows() != p || covs[ju].cols() != p) {
      throw Error(ErrorCode::DimensionMismatch, "covariances must all be p x p");
    }
    const auto w = whiten(covs[ju], ju, options);
    out.stacked.middleRows(j * p, p) = std::sqrt(sizes[ju]) * w.inverse_sqrt;
    precision_sum += sizes[ju] * w.inverse;
  }
  out.B = factor_precision_sum(precision_sum).solve(Eigen::MatrixXd::Identity(p, p));
  out.B = 0.5 * (out.B + out.B.transpose());
  out.P = out.stacked * out.B * out.stacked.transpose();
  out.P = 0.5 * (out.P + out.P.transpose());
  out.Q = Eigen::MatrixXd::Identity(p * k, p * k) - out.P;
  return out;
}

NoncentralityEstimate noncentrality_from_moments(std::span<const Eigen::VectorXd> means,
                                                 std::span<const Eigen::MatrixXd> covs,
                                                 std::span<const double> sizes,
                                                 const CovarianceOptions& options) {
  if (means.size() != covs.size() || covs.size() != sizes.size() || covs.size() < 2) {
    throw Error(ErrorCode::DimensionMismatch, "need matching mean, covariance and size lists with k >= 2");
  }
  const Eigen::Index p = means.front().size();
  // v^T Q v = |v|^2 - (S^T v)^T B (S^T v), with S^T v = sum_j sqrt(n_j) Sigma_j^{-1/2} v_j
  Eigen::MatrixXd precision_sum = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd projected = Eigen::VectorXd::Zero(p);
  double norm2 = 0.0;
  for (std::size_t j = 0; j < covs.size(); ++j) {
    const auto w = whiten(covs[j], j, options);
    const Eigen::VectorXd vj = w.inverse_sqrt * (means.front() - means[j]);
    norm2 += vj.squaredNorm();
    projected += std::sqrt(sizes[j]) * (w.inverse_sqrt * vj);
    precision_sum += sizes[j] * w.inverse;
  }
  const double explained = projected.dot(factor_precision_sum(precision_sum).solve(projected));
  NoncentralityEstimate out;
  out.raw = norm2 - explained;
  out.value = std::max(out.raw, 0.0);
  return out;
}

NoncentralityEstimate noncentrality_estimate(const GroupedScores& scores, const CovarianceOptions& options) {
  validate_scores(scores);
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covs;
  std::vector<double> sizes;
  for (const auto& g : scores.groups) {
    auto c = group_covariance(g);
    means.push_back(std::move(c.mean));
    covs.push_back(std::move(c.sigma_hat));
    sizes.push_back(static_cast<double>(c.n));
  }
  return noncentrality_from_moments(means, covs, sizes, options);
}

HotellingResult hotelling_t2(const GroupedScores& scores, const CovarianceOptions& options) {
  validate_scores(scores);
  if (scores.k() != 2) throw Error(ErrorCode::NotTwoGroups, "Hotelling T^2 compares exactly 2 groups");
  const auto a = group_covariance(scores.groups[0]);
  const auto b = group_covariance(scores.groups[1]);
  const double n1 = static_cast<double>(a.n);
  const double n2 = static_cast<double>(b.n);
  const double p = static_cast<double>(scores.p());
  if (n1 + n2 - p - 1.0 <= 0.0) throw Error(ErrorCode::TooFewObservations, "need n1 + n2 > p + 1");
  // divisor-n covariances rescaled to the unbiased pooled estimate
  const Eigen::MatrixXd pooled = (n1 * a.sigma_hat + n2 * b.sigma_hat) / (n1 + n2 - 2.0);
  const auto w = whiten(pooled, 0, options);
  const Eigen::VectorXd d = a.mean - b.mean;
  HotellingResult out;
  out.t2 = std::max(0.0, (n1 * n2 / (n1 + n2)) * d.dot(w.inverse * d));
  out.df1 = p;
  out.df2 = n1 + n2 - p - 1.0;
  out.f = out.t2 * out.df2 / (p * (n1 + n2 - 2.0));
  out.p_value = boost::math::cdf(boost::math::complement(boost::math::fisher_f(out.df1, out.df2), out.f));
  return out;
}

}  // namespace funkmean
