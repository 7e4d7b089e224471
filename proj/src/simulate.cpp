#include "funkmean/simulate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <numbers>
#include <sstream>

#include "funkmean/bessel.hpp"
#include "funkmean/bootstrap.hpp"
#include "funkmean/error.hpp"
#include "funkmean/plot.hpp"

namespace funkmean {

namespace {

constexpr unsigned char kSingular = 2;

bool is_parametric(MeanSpec::Kind kind) {
  return kind == MeanSpec::Kind::linear || kind == MeanSpec::Kind::neg_quadratic ||
         kind == MeanSpec::Kind::identity_plus_sine;
}

std::string shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::vector<GaussianSampler> build_samplers(const std::vector<GroupDesign>& designs, const std::vector<double>& grid) {
  std::vector<GaussianSampler> samplers;
  samplers.reserve(designs.size());
  for (const auto& d : designs) samplers.emplace_back(d.mean.evaluate(grid), matern_cov(d.matern, grid));
  return samplers;
}

FunctionalDataset draw_dataset(const std::vector<GaussianSampler>& samplers, const std::vector<int>& sizes,
                               const std::vector<double>& grid, std::uint64_t seed, std::uint64_t replicate) {
  FunctionalDataset data;
  data.shared_grid = true;
  for (std::size_t j = 0; j < samplers.size(); ++j) {
    RngStream rng(seed, {1, replicate, static_cast<std::uint64_t>(j)});
    std::vector<DiscretizedCurve> curves;
    curves.reserve(static_cast<std::size_t>(sizes[j]));
    for (int i = 0; i < sizes[j]; ++i) {
      const Eigen::VectorXd values = samplers[j].draw(rng);
      curves.push_back({grid, std::vector<double>(values.data(), values.data() + values.size())});
    }
    data.groups.push_back(std::move(curves));
    data.labels.push_back("group" + std::to_string(j + 1));
  }
  return data;
}

bool means_equal(const std::vector<GroupDesign>& designs, const std::vector<double>& grid) {
  const Eigen::VectorXd first = designs.front().mean.evaluate(grid);
  for (std::size_t j = 1; j < designs.size(); ++j) {
    if ((designs[j].mean.evaluate(grid) - first).cwiseAbs().maxCoeff() > 1e-12) return false;
  }
  return true;
}

}  // namespace

void validate(const MaternParams& params) {
  if (!(params.sigma2 > 0.0) || !(params.ell > 0.0) || !(params.nu > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "Matern parameters must be strictly positive");
  }
}

double matern_kernel(const MaternParams& params, double distance) {
  if (distance == 0.0) return params.sigma2;
  const double z = std::sqrt(2.0 * params.nu) * std::abs(distance) / params.ell;
  const double log_value = (1.0 - params.nu) * std::numbers::ln2 - std::lgamma(params.nu) + params.nu * std::log(z) +
                           log_bessel_k(params.nu, z);
  return params.sigma2 * std::min(1.0, std::exp(log_value));
}

Eigen::MatrixXd matern_cov(const MaternParams& params, std::span<const double> times) {
  validate(params);
  const auto m = static_cast<Eigen::Index>(times.size());
  Eigen::MatrixXd cov(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    cov(a, a) = params.sigma2;
    for (Eigen::Index b = 0; b < a; ++b) {
      const double v = matern_kernel(params, times[static_cast<std::size_t>(a)] - times[static_cast<std::size_t>(b)]);
      cov(a, b) = v;
      cov(b, a) = v;
    }
  }
  return cov;
}

Eigen::VectorXd MeanSpec::evaluate(std::span<const double> grid) const {
  const auto m = static_cast<Eigen::Index>(grid.size());
  Eigen::VectorXd out(m);
  if (kind == Kind::custom_table) {
    if (table.size() != grid.size()) throw Error(ErrorCode::InvalidConfig, "custom mean table length differs from the grid");
    for (Eigen::Index i = 0; i < m; ++i) out(i) = table[static_cast<std::size_t>(i)];
    return out;
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    const double x = grid[static_cast<std::size_t>(i)];
    switch (kind) {
      case Kind::zero: out(i) = 0.0; break;
      case Kind::linear: out(i) = c * x; break;
      case Kind::neg_quadratic: out(i) = -c * x * x; break;
      case Kind::identity_plus_sine:
        out(i) = x + c * std::numbers::sqrt2 * std::sin(10.0 * std::numbers::pi * x);
        break;
      case Kind::custom_table: break;
    }
  }
  return out;
}

std::string to_string(MeanSpec::Kind kind) {
  switch (kind) {
    case MeanSpec::Kind::zero: return "zero";
    case MeanSpec::Kind::linear: return "linear";
    case MeanSpec::Kind::neg_quadratic: return "neg_quadratic";
    case MeanSpec::Kind::identity_plus_sine: return "identity_plus_sine";
    case MeanSpec::Kind::custom_table: return "custom_table";
  }
  return "zero";
}

MeanSpec::Kind parse_mean_kind(const std::string& name) {
  for (auto kind : {MeanSpec::Kind::zero, MeanSpec::Kind::linear, MeanSpec::Kind::neg_quadratic,
                    MeanSpec::Kind::identity_plus_sine, MeanSpec::Kind::custom_table}) {
    if (to_string(kind) == name) return kind;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown mean family '" + name + "'");
}

GaussianSampler::GaussianSampler(Eigen::VectorXd mean, const Eigen::MatrixXd& cov) : mean_(std::move(mean)) {
  if (cov.rows() != mean_.size() || cov.cols() != mean_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "mean and covariance sizes differ");
  }
  const double max_diag = cov.size() > 0 ? cov.diagonal().maxCoeff() : 0.0;
  const double scale = max_diag > 0.0 ? max_diag : 1.0;
  for (double level = 1e-10; level <= 1e-6 * (1.0 + 1e-9); level *= 10.0) {
    Eigen::MatrixXd jittered = cov;
    jittered.diagonal().array() += level * scale;
    Eigen::LLT<Eigen::MatrixXd> llt(jittered);
    if (llt.info() == Eigen::Success) {
      factor_ = llt.matrixL();
      jitter_ = level * scale;
      return;
    }
  }
  throw Error(ErrorCode::FactorizationFailed, "covariance not positive definite even with jitter 1e-6 * max diagonal");
}

Eigen::VectorXd GaussianSampler::draw(RngStream& rng) const {
  Eigen::VectorXd z(mean_.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  return mean_ + factor_.triangularView<Eigen::Lower>() * z;
}

DiscretizedCurve gp_sample(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, std::span<const double> times,
                           RngStream& rng) {
  if (static_cast<Eigen::Index>(times.size()) != mean.size()) {
    throw Error(ErrorCode::DimensionMismatch, "times and mean differ in length");
  }
  const Eigen::VectorXd values = GaussianSampler(mean, cov).draw(rng);
  return {std::vector<double>(times.begin(), times.end()), std::vector<double>(values.data(), values.data() + values.size())};
}

std::vector<double> simulation_grid(int m) {
  if (m < 2) throw Error(ErrorCode::EmptyGrid, "simulation grid needs at least 2 points");
  std::vector<double> grid(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) grid[static_cast<std::size_t>(i)] = static_cast<double>(i) / (m - 1);
  return grid;
}

std::string to_string(SweepKind kind) { return kind == SweepKind::nu ? "nu" : "c"; }

void validate(const ExperimentConfig& config) {
  const auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (config.groups.size() < 2) fail("an experiment needs at least 2 groups");
  if (config.sizes.size() != config.groups.size()) fail("sizes and groups differ in length");
  for (int n : config.sizes) {
    if (n < 2) fail("every group size must be >= 2");
  }
  if (config.grid_points < 2) fail("grid_points must be >= 2");
  if (config.bases.empty()) fail("at least one basis is required");
  if (config.p_values.empty()) fail("at least one p is required");
  for (int p : config.p_values) {
    if (p < 1) fail("p values must be >= 1");
  }
  if (config.sweep_values.empty()) fail("sweep_values must not be empty");
  if (config.replications < 1) fail("replications must be >= 1");
  if (config.bootstrap < 1) fail("bootstrap must be >= 1");
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) fail("alpha must lie in (0,1)");
  for (const auto& g : config.groups) {
    validate(g.matern);
    if (g.mean.kind == MeanSpec::Kind::custom_table &&
        g.mean.table.size() != static_cast<std::size_t>(config.grid_points)) {
      fail("custom mean table length must equal grid_points");
    }
  }
  if (config.sweep == SweepKind::nu) {
    for (double v : config.sweep_values) {
      if (!(v > 0.0)) fail("nu sweep values must be positive");
    }
  }
}

std::vector<GroupDesign> designs_at(const ExperimentConfig& config, double sweep_value) {
  std::vector<GroupDesign> out = config.groups;
  for (auto& g : out) {
    if (config.sweep == SweepKind::nu) {
      g.matern.nu = sweep_value;
    } else if (g.follows_sweep && is_parametric(g.mean.kind)) {
      g.mean.c = sweep_value;
    }
  }
  return out;
}

FunctionalDataset generate_dataset(const ExperimentConfig& config, double sweep_value, std::uint64_t replicate) {
  validate(config);
  const auto grid = simulation_grid(config.grid_points);
  const auto samplers = build_samplers(designs_at(config, sweep_value), grid);
  return draw_dataset(samplers, config.sizes, grid, config.seed, replicate);
}

const RejectionRow* RejectionTable::find(double sweep_value, const std::string& basis, int p) const {
  for (const auto& row : rows) {
    if (row.basis == basis && row.p == p && std::abs(row.sweep_value - sweep_value) < 1e-12) return &row;
  }
  return nullptr;
}

RejectionTable run_rejection_experiment(const ExperimentConfig& config, Execution exec) {
  validate(config);
  const auto grid = simulation_grid(config.grid_points);
  const int max_p = *std::max_element(config.p_values.begin(), config.p_values.end());
  const std::size_t n_bases = config.bases.size();
  const std::size_t n_p = config.p_values.size();
  const std::size_t cells = n_bases * n_p;
  const int R = config.replications;

  RejectionTable table;
  table.sweep = config.sweep;
  for (double value : config.sweep_values) {
    const auto samplers = build_samplers(designs_at(config, value), grid);
    std::vector<std::vector<unsigned char>> rejected(static_cast<std::size_t>(R));
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(R));

    auto replicate = [&](int r) {
      const auto ru = static_cast<std::uint64_t>(r);
      const FunctionalDataset data = draw_dataset(samplers, config.sizes, grid, config.seed, ru);
      std::vector<unsigned char> flags(cells, 0);
      for (std::size_t bi = 0; bi < n_bases; ++bi) {
        const BasisSpec full{config.bases[bi], max_p, 4, {}};
        GroupedScores nested_scores;
        if (full.nested()) nested_scores = project_dataset(data, full);
        for (std::size_t pi = 0; pi < n_p; ++pi) {
          const int p = config.p_values[pi];
          const GroupedScores scores = full.nested() ? nested_scores.leading(p)
                                                     : project_dataset(data, BasisSpec{config.bases[bi], p, 4, {}});
          BootstrapConfig boot;
          boot.B = config.bootstrap;
          boot.alpha = config.alpha;
          boot.seed = derive_key(config.seed, {2, ru, bi, static_cast<std::uint64_t>(p)});
          try {
            flags[bi * n_p + pi] = bootstrap_test(scores, boot, {}, Execution::serial).reject ? 1 : 0;
          } catch (const Error& e) {
            if (e.code() != ErrorCode::SingularCovariance && e.code() != ErrorCode::ResampleDegenerate) throw;
            flags[bi * n_p + pi] = kSingular;
          }
        }
      }
      rejected[static_cast<std::size_t>(r)] = std::move(flags);
    };

    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
      for (int r = 0; r < R; ++r) {
        try {
          replicate(r);
        } catch (...) {
          failures[static_cast<std::size_t>(r)] = std::current_exception();
        }
      }
    } else {
      for (int r = 0; r < R; ++r) {
        try {
          replicate(r);
        } catch (...) {
          failures[static_cast<std::size_t>(r)] = std::current_exception();
        }
      }
    }
    for (const auto& f : failures) {
      if (f) std::rethrow_exception(f);
    }

    for (std::size_t bi = 0; bi < n_bases; ++bi) {
      for (std::size_t pi = 0; pi < n_p; ++pi) {
        int count = 0;
        int singular = 0;
        for (const auto& flags : rejected) {
          count += flags[bi * n_p + pi] == 1 ? 1 : 0;
          singular += flags[bi * n_p + pi] == kSingular ? 1 : 0;
        }
        table.rows.push_back({value, to_string(config.bases[bi]), config.p_values[pi],
                              static_cast<double>(count) / static_cast<double>(R), R, config.bootstrap, config.seed,
                              singular});
      }
    }
  }
  return table;
}

SizeTable run_size_experiment(const ExperimentConfig& config, Execution exec) {
  validate(config);
  const auto grid = simulation_grid(config.grid_points);
  for (double value : config.sweep_values) {
    if (!means_equal(designs_at(config, value), grid)) {
      throw Error(ErrorCode::InvalidConfig, "size experiments need equal group means (sweep value " + shortest(value) + ")");
    }
  }
  return run_rejection_experiment(config, exec);
}

PowerTable run_power_experiment(const ExperimentConfig& config, Execution exec) {
  validate(config);
  const auto grid = simulation_grid(config.grid_points);
  const bool any_difference = std::any_of(config.sweep_values.begin(), config.sweep_values.end(),
                                          [&](double v) { return !means_equal(designs_at(config, v), grid); });
  if (!any_difference) throw Error(ErrorCode::InvalidConfig, "power experiments need a mean difference at some sweep value");
  return run_rejection_experiment(config, exec);
}

void write_table_csv(const RejectionTable& table, const std::string& path) {
  std::ostringstream out;
  out << "nu_or_c,basis,p,reject_rate,R,B,seed\n";
  for (const auto& row : table.rows) {
    out << shortest(row.sweep_value) << ',' << row.basis << ',' << row.p << ',' << shortest(row.reject_rate) << ','
        << row.R << ',' << row.B << ',' << row.seed << '\n';
  }
  write_text_file(path, out.str());
}

void write_table_svg(const RejectionTable& table, const std::string& path, const std::string& title) {
  std::vector<PlotSeries> series;
  for (const auto& row : table.rows) {
    const std::string label = row.basis + " p=" + std::to_string(row.p);
    auto it = std::find_if(series.begin(), series.end(), [&](const PlotSeries& s) { return s.label == label; });
    if (it == series.end()) {
      series.push_back({label, {}, {}});
      it = series.end() - 1;
    }
    it->x.push_back(row.sweep_value);
    it->y.push_back(row.reject_rate);
  }
  write_text_file(path, render_svg_plot(series, title, to_string(table.sweep), "rejection rate"));
}

}  // namespace funkmean
