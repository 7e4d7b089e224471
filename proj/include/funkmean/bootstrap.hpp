#pragma once

#include <cstdint>
#include <vector>

#include "funkmean/flrt.hpp"
#include "funkmean/parallel.hpp"
#include "funkmean/rng.hpp"
#include "funkmean/scores.hpp"

namespace funkmean {

struct BootstrapConfig {
  int B = 500;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  /// Report (1 + #{W* >= W}) / (B + 1) instead of the plain proportion.
  bool plus_one_correction = false;
  /// Draws allowed per replicate before giving up with ResampleDegenerate.
  /// Keeps the total number of draws below 100 B.
  int max_attempts = 100;
};

struct BootstrapResult {
  double p_boot = 1.0;
  double w_observed = 0.0;
  std::vector<double> w_star;
  bool reject = false;
  std::uint64_t seed = 0;
  std::size_t redraws = 0;  // resamples discarded for a singular group covariance
};

/// n_j rows drawn uniformly with replacement from `centered`.
ScoreMatrix resample_group(const ScoreMatrix& centered, RngStream& rng);

/// Each group minus its own sample mean, so every group has mean zero.
std::vector<ScoreMatrix> center_groups(const GroupedScores& scores);

struct BootstrapReplicates {
  std::vector<double> w_star;
  std::size_t redraws = 0;
};

/// W*_b for b = 0..B-1. Replicate b draws from RngStream(seed, {b}) only, so
/// the serial and OpenMP kernels return identical vectors.
BootstrapReplicates bootstrap_replicates(const std::vector<ScoreMatrix>& centered, int B, std::uint64_t seed,
                                         int max_attempts, const CovarianceOptions& options, Execution exec);

/// Groupwise nonparametric bootstrap of the standardized statistic W.
BootstrapResult bootstrap_test(const GroupedScores& scores, const BootstrapConfig& config,
                               const CovarianceOptions& options = {}, Execution exec = Execution::parallel);

}  // namespace funkmean
