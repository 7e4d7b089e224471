#include "funkmean/diagnostics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "funkmean/error.hpp"
#include "funkmean/plot.hpp"

namespace funkmean {

namespace {

double median(std::vector<double> v) {
  const std::size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2), v.end());
  const double upper = v[n / 2];
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2));
  return 0.5 * (lower + upper);
}

std::string shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

template <typename Series>
void emit(const std::vector<Series>& items, const std::string& stem, const std::string& x_label) {
  if (items.empty()) throw Error(ErrorCode::EmptyInput, "no diagnostic series to write");
  std::ostringstream csv;
  csv << "index,value,basis\n";
  std::vector<PlotSeries> series;
  for (const auto& item : items) {
    PlotSeries s{item.basis_label, {}, {}};
    for (std::size_t i = 0; i < item.values.size(); ++i) {
      csv << i + 1 << ',' << shortest(item.values[i]) << ',' << item.basis_label << '\n';
      s.x.push_back(static_cast<double>(i + 1));
      s.y.push_back(item.values[i]);
    }
    series.push_back(std::move(s));
  }
  write_text_file(stem + ".csv", csv.str());
  write_text_file(stem + ".svg", render_svg_plot(series, "noncentrality diagnostic", x_label, "v_d' Q v_d estimate"));
}

}  // namespace

int default_p_max(const FunctionalDataset& data) {
  std::size_t smallest = data.groups.empty() ? 0 : data.groups.front().size();
  for (const auto& g : data.groups) smallest = std::min(smallest, g.size());
  return std::max(1, std::min(20, static_cast<int>(smallest / 3)));
}

DiagnosticCurve diagnostic_curve(const GroupedScores& scores, const std::string& label, const CovarianceOptions& options) {
  validate_scores(scores);
  DiagnosticCurve curve{label, {}, {}};
  const Eigen::Index p_max = scores.p();
  const auto sizes = scores.sizes();
  if (*std::min_element(sizes.begin(), sizes.end()) < 5 * p_max) {
    curve.warnings.push_back("smallest group has fewer than 5 p_max curves; values at large p are volatile");
  }
  for (Eigen::Index p = 1; p <= p_max; ++p) {
    try {
      curve.values.push_back(noncentrality_estimate(scores.leading(p), options).value);
    } catch (const SingularCovarianceError& e) {
      throw SingularCovarianceError(e.group(), e.condition(),
                                    std::string(e.what()) + " [basis " + label + ", p = " + std::to_string(p) + "]");
    }
  }
  return curve;
}

std::vector<DiagnosticCurve> multi_basis_diagnostic(const FunctionalDataset& data, const std::vector<BasisSpec>& specs,
                                                    int p_max, const CovarianceOptions& options) {
  if (p_max < 1) throw Error(ErrorCode::InvalidConfig, "p_max must be >= 1");
  validate_dataset(data);
  std::vector<DiagnosticCurve> out;
  for (const auto& spec : specs) {
    BasisSpec full = spec;
    full.p = p_max;
    if (full.nested()) {
      out.push_back(diagnostic_curve(project_dataset(data, full), spec.label(), options));
      continue;
    }
    // non-nested families: project afresh for every p
    DiagnosticCurve curve{spec.label(), {}, {}};
    for (int p = 1; p <= p_max; ++p) {
      BasisSpec at_p = spec;
      at_p.p = p;
      auto partial = diagnostic_curve(project_dataset(data, at_p), spec.label(), options);
      curve.values.push_back(partial.values.back());
      if (p == p_max) curve.warnings = partial.warnings;
    }
    out.push_back(std::move(curve));
  }
  return out;
}

ReorderProfile reorder_profile(const GroupedScores& scores, const std::string& label, const SpikeRule& rule,
                               const CovarianceOptions& options) {
  validate_scores(scores);
  ReorderProfile profile{label, {}, {}, {}};
  const Eigen::Index n_functions = scores.p();
  for (Eigen::Index l = 0; l < n_functions; ++l) {
    const GroupedScores single = scores.select({l});
    try {
      profile.values.push_back(noncentrality_estimate(single, options).value);
      profile.p_values.push_back(t_flrt(single, options).p_chisq);
    } catch (const SingularCovarianceError& e) {
      throw SingularCovarianceError(e.group(), e.condition(),
                                    std::string(e.what()) + " [basis " + label + ", function " + std::to_string(l + 1) + "]");
    }
  }
  const double level = rule.significance / static_cast<double>(n_functions);
  std::vector<unsigned char> eligible;
  for (double pv : profile.p_values) eligible.push_back(pv < level ? 1 : 0);
  for (std::size_t index : detect_spikes(profile.values, rule, eligible)) profile.spikes.push_back(index + 1);
  return profile;
}

ReorderProfile reorder_diagnostic(const FunctionalDataset& data, const BasisSpec& spec, int N, const SpikeRule& rule,
                                  const CovarianceOptions& options) {
  if (N < 1) throw Error(ErrorCode::InvalidConfig, "N must be >= 1");
  BasisSpec full = spec;
  full.p = N;
  return reorder_profile(project_dataset(data, full), spec.label(), rule, options);
}

std::vector<std::size_t> detect_spikes(std::span<const double> values, const SpikeRule& rule,
                                       std::span<const unsigned char> eligible) {
  if (values.empty()) return {};
  const std::vector<double> v(values.begin(), values.end());
  const double center = median(v);
  std::vector<double> deviations;
  deviations.reserve(v.size());
  for (double x : v) deviations.push_back(std::abs(x - center));
  const double mad = median(deviations);
  const double threshold = center + rule.c * mad;

  std::vector<std::size_t> spikes;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!eligible.empty() && !eligible[i]) continue;
    if (v[i] > threshold && v[i] > rule.tau) spikes.push_back(i);
  }
  std::stable_sort(spikes.begin(), spikes.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  if (spikes.size() > rule.max_count) spikes.resize(rule.max_count);
  return spikes;
}

void emit_diagnostic_artifacts(const std::vector<DiagnosticCurve>& curves, const std::string& stem) {
  emit(curves, stem, "p");
}

void emit_diagnostic_artifacts(const std::vector<ReorderProfile>& profiles, const std::string& stem) {
  emit(profiles, stem, "basis function index");
}

}  // namespace funkmean
