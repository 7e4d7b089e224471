#include "funkmean/bootstrap.hpp"

#include <exception>
#include <optional>

#include "funkmean/error.hpp"

namespace funkmean {

namespace {

struct ReplicateOutcome {
  double w = 0.0;
  int attempts = 0;
  bool exhausted = false;
};

ReplicateOutcome run_replicate(const std::vector<ScoreMatrix>& centered, std::uint64_t seed, int b, int max_attempts,
                               const CovarianceOptions& options) {
  RngStream rng(seed, {static_cast<std::uint64_t>(b)});
  const Eigen::Index p = centered.front().cols();
  std::vector<GroupCovariance> covs(centered.size());
  ReplicateOutcome out;
  while (out.attempts < max_attempts) {
    ++out.attempts;
    for (std::size_t j = 0; j < centered.size(); ++j) covs[j] = group_covariance(resample_group(centered[j], rng));
    try {
      out.w = standardize(flrt_statistic(covs, options), p, centered.size());
      return out;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularCovariance) throw;
    }
  }
  out.exhausted = true;
  return out;
}

}  // namespace

ScoreMatrix resample_group(const ScoreMatrix& centered, RngStream& rng) {
  const Eigen::Index n = centered.rows();
  ScoreMatrix out(n, centered.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    out.row(i) = centered.row(static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(n))));
  }
  return out;
}

std::vector<ScoreMatrix> center_groups(const GroupedScores& scores) {
  std::vector<ScoreMatrix> out;
  out.reserve(scores.k());
  for (const auto& g : scores.groups) out.emplace_back(g.rowwise() - g.colwise().mean());
  return out;
}

BootstrapReplicates bootstrap_replicates(const std::vector<ScoreMatrix>& centered, int B, std::uint64_t seed,
                                         int max_attempts, const CovarianceOptions& options, Execution exec) {
  std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(B));
  std::vector<std::exception_ptr> failures(static_cast<std::size_t>(B));
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (int b = 0; b < B; ++b) {
      try {
        outcomes[static_cast<std::size_t>(b)] = run_replicate(centered, seed, b, max_attempts, options);
      } catch (...) {
        failures[static_cast<std::size_t>(b)] = std::current_exception();
      }
    }
  } else {
    for (int b = 0; b < B; ++b) {
      try {
        outcomes[static_cast<std::size_t>(b)] = run_replicate(centered, seed, b, max_attempts, options);
      } catch (...) {
        failures[static_cast<std::size_t>(b)] = std::current_exception();
      }
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  BootstrapReplicates out;
  out.w_star.reserve(outcomes.size());
  for (std::size_t b = 0; b < outcomes.size(); ++b) {
    if (outcomes[b].exhausted) {
      throw Error(ErrorCode::ResampleDegenerate, "bootstrap replicate " + std::to_string(b) + " stayed singular after " +
                                                     std::to_string(max_attempts) + " draws");
    }
    out.w_star.push_back(outcomes[b].w);
    out.redraws += static_cast<std::size_t>(outcomes[b].attempts - 1);
  }
  return out;
}

BootstrapResult bootstrap_test(const GroupedScores& scores, const BootstrapConfig& config,
                               const CovarianceOptions& options, Execution exec) {
  if (config.B < 1) throw Error(ErrorCode::InvalidConfig, "bootstrap needs B >= 1");
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw Error(ErrorCode::InvalidConfig, "alpha must lie in (0,1)");
  if (config.max_attempts < 1) throw Error(ErrorCode::InvalidConfig, "max_attempts must be >= 1");
  validate_scores(scores);

  std::vector<GroupCovariance> covs;
  for (const auto& g : scores.groups) covs.push_back(group_covariance(g));
  BootstrapResult result;
  result.seed = config.seed;
  result.w_observed = standardize(flrt_statistic(covs, options), scores.p(), scores.k());

  auto replicates = bootstrap_replicates(center_groups(scores), config.B, config.seed, config.max_attempts, options, exec);
  std::size_t exceed = 0;
  for (double w : replicates.w_star) exceed += w >= result.w_observed ? 1 : 0;
  result.p_boot = config.plus_one_correction
                      ? static_cast<double>(exceed + 1) / static_cast<double>(config.B + 1)
                      : static_cast<double>(exceed) / static_cast<double>(config.B);
  result.reject = result.p_boot < config.alpha;
  result.w_star = std::move(replicates.w_star);
  result.redraws = replicates.redraws;
  return result;
}

}  // namespace funkmean
