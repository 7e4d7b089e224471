#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "funkmean/basis.hpp"
#include "funkmean/flrt.hpp"
#include "funkmean/projection.hpp"

namespace funkmean {

/// Noncentrality estimates (v_d^T Q v_d)_p for p = 1..p_max; values[p - 1].
struct DiagnosticCurve {
  std::string basis_label;
  std::vector<double> values;
  std::vector<std::string> warnings;
};

/// Spike rule: index l is a spike when
///   values[l] > median + c * MAD  and  values[l] > tau,
/// keeping at most `max_count` indices, largest values first.
/// `significance` is used by reorder_diagnostic only: a spike must also have a
/// one-dimensional test p-value below significance / N, so that values inside
/// the sampling noise of a null profile are not reported.
struct SpikeRule {
  double c = 5.0;
  double tau = 1e-3;
  std::size_t max_count = 5;
  double significance = 0.05;
};

struct ReorderProfile {
  std::string basis_label;
  std::vector<double> values;       // values[l - 1] for l = 1..N
  std::vector<double> p_values;     // chi-square p-value of the 1-D test on e_l
  std::vector<std::size_t> spikes;  // 1-based indices, largest value first
};

/// p_max default: min(20, min_j n_j / 3), at least 1.
int default_p_max(const FunctionalDataset& data);

/// Nested curve: for each basis and p = 1..p_max the plug-in noncentrality.
/// A singular covariance is rethrown naming the basis and p.
std::vector<DiagnosticCurve> multi_basis_diagnostic(const FunctionalDataset& data, const std::vector<BasisSpec>& specs,
                                                    int p_max, const CovarianceOptions& options = {});

/// Same computation from precomputed scores (p_max = scores.p()).
DiagnosticCurve diagnostic_curve(const GroupedScores& scores, const std::string& label,
                                 const CovarianceOptions& options = {});

/// Reorder profile: noncentrality of each single basis function e_1..e_N.
ReorderProfile reorder_diagnostic(const FunctionalDataset& data, const BasisSpec& spec, int N,
                                  const SpikeRule& rule = {}, const CovarianceOptions& options = {});

ReorderProfile reorder_profile(const GroupedScores& scores, const std::string& label, const SpikeRule& rule = {},
                               const CovarianceOptions& options = {});

/// Indices (0-based) passing the rule; `eligible`, when non-empty, masks candidates.
std::vector<std::size_t> detect_spikes(std::span<const double> values, const SpikeRule& rule,
                                       std::span<const unsigned char> eligible = {});

/// Writes `<stem>.csv` (header `index,value,basis`) and `<stem>.svg`.
/// Throws EmptyInput for an empty list and IOFailure when a file cannot be written.
void emit_diagnostic_artifacts(const std::vector<DiagnosticCurve>& curves, const std::string& stem);
void emit_diagnostic_artifacts(const std::vector<ReorderProfile>& profiles, const std::string& stem);

}  // namespace funkmean
