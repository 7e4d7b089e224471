// funkmean: k-sample test for equal mean functions, diagnostics and simulation presets.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "funkmean/bootstrap.hpp"
#include "funkmean/config_json.hpp"
#include "funkmean/curve_table.hpp"
#include "funkmean/diagnostics.hpp"
#include "funkmean/error.hpp"
#include "funkmean/parallel.hpp"
#include "funkmean/presets.hpp"
#include "funkmean/projection.hpp"
#include "funkmean/rng.hpp"
#include "funkmean/simulate.hpp"

using namespace funkmean;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Loaded {
  CurveTable table;
  std::vector<std::string> warnings;
};

Loaded load(const std::string& path) {
  Loaded l{read_curve_table_file(path), {}};
  validate_dataset(l.table.data);
  const auto rescaled = rescale_dataset(l.table.data);
  bool changed = false;
  for (std::size_t j = 0; j < rescaled.groups.size() && !changed; ++j) {
    changed = rescaled.groups[j].front().times != l.table.data.groups[j].front().times;
  }
  if (changed) l.warnings.push_back("observation times lie outside [0,1]; mapped affinely onto [0,1]");
  l.table.data = rescaled;
  return l;
}

json group_mapping(const FunctionalDataset& data) {
  json groups = json::array();
  for (std::size_t j = 0; j < data.groups.size(); ++j) {
    groups.push_back({{"index", j}, {"label", data.labels.at(j)}, {"n", data.groups[j].size()}});
  }
  return groups;
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

// p-value used for the verdict: bootstrap when run, else chi-square for p <= 10 and normal above.
std::pair<std::string, double> headline_p(const TestResult& r, Eigen::Index p, const BootstrapResult* boot) {
  if (boot) return {"p_boot", boot->p_boot};
  if (p <= 10) return {"p_chisq", r.p_chisq};
  return {"p_normal", r.p_normal};
}

std::string verdict(double p_value, double alpha) {
  return p_value < alpha ? "reject equal means at alpha = " + fmt(alpha)
                         : "fail to reject equal means at alpha = " + fmt(alpha);
}

void rethrow_singular(const SingularCovarianceError& e, const FunctionalDataset& data) {
  const std::size_t g = e.group();
  const std::string label = g < data.labels.size() ? data.labels[g] : std::to_string(g);
  throw SingularCovarianceError(g, e.condition(),
                                std::string(e.what()) + " (group " + std::to_string(g) + " '" + label +
                                    "'); try a smaller --p or more curves per group");
}

std::vector<Eigen::Index> to_columns(const std::vector<int>& one_based, Eigen::Index p) {
  std::vector<Eigen::Index> cols;
  for (int l : one_based) {
    if (l < 1 || l > p) throw Error(ErrorCode::InvalidConfig, "--select index " + std::to_string(l) + " outside 1.." + std::to_string(p));
    cols.push_back(l - 1);
  }
  return cols;
}

// ---- test ----------------------------------------------------------------

struct TestOptions {
  std::string input;
  std::string basis = "fourier";
  int p = 3;
  int bootstrap = 0;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  std::vector<int> select;
  std::string out;
};

int cmd_test(const TestOptions& o) {
  const auto start = Clock::now();
  auto loaded = load(o.input);
  const auto& data = loaded.table.data;
  BasisSpec spec{parse_basis_family(o.basis), o.p, 4, {}};
  int p_project = o.p;
  if (!o.select.empty()) p_project = std::max(o.p, *std::max_element(o.select.begin(), o.select.end()));
  spec.p = p_project;
  std::cout << "basis = " << to_string(spec.family) << ", p = " << o.p;
  if (!o.select.empty()) {
    std::cout << ", functions =";
    for (int l : o.select) std::cout << ' ' << l;
  }
  std::cout << ", k = " << data.k() << '\n';

  GroupedScores scores = project_dataset(data, spec);
  scores = o.select.empty() ? scores.leading(o.p) : scores.select(to_columns(o.select, p_project));
  if (!o.select.empty()) {
    std::cerr << "caution: the basis functions were picked by looking at this same data, so the test uses the data "
                 "twice and its size may be inflated; use `diagnose --split` for a held-out test\n";
  }

  TestResult result;
  BootstrapResult boot;
  try {
    result = t_flrt(scores);
    if (o.bootstrap > 0) {
      BootstrapConfig bc;
      bc.B = o.bootstrap;
      bc.seed = o.seed;
      bc.alpha = o.alpha;
      boot = bootstrap_test(scores, bc);
    }
  } catch (const SingularCovarianceError& e) {
    rethrow_singular(e, data);
  }
  loaded.warnings.insert(loaded.warnings.end(), scores.warnings.begin(), scores.warnings.end());
  loaded.warnings.insert(loaded.warnings.end(), result.warnings.begin(), result.warnings.end());
  print_warnings(loaded.warnings);

  RunRecord record;
  record.command = "test";
  record.seed = o.seed;
  record.config = {{"input", o.input}, {"basis", to_string(spec.family)}, {"p", o.p},
                   {"bootstrap", o.bootstrap}, {"alpha", o.alpha}, {"select", o.select},
                   {"groups", group_mapping(data)}};
  record.result = {{"test", to_json(result)}, {"warnings", loaded.warnings}};
  if (o.bootstrap > 0) record.result["bootstrap"] = to_json(boot);
  const auto [name, pv] = headline_p(result, scores.p(), o.bootstrap > 0 ? &boot : nullptr);
  record.result["verdict"] = {{"p_value_kind", name}, {"p_value", pv}, {"reject", pv < o.alpha}};
  record.timings = {{"total_seconds", seconds_since(start)}};
  write_json_file(record.to_json(), o.out);

  std::cout << "T = " << fmt(result.t_flrt) << ", df = " << result.df << ", W = " << fmt(result.w)
            << ", p_chisq = " << fmt(result.p_chisq) << ", p_normal = " << fmt(result.p_normal);
  if (o.bootstrap > 0) std::cout << ", p_boot = " << fmt(boot.p_boot) << " (B = " << o.bootstrap << ")";
  std::cout << '\n' << verdict(pv, o.alpha) << " (" << name << " = " << fmt(pv) << ")\n";
  return 0;
}

// ---- diagnose ------------------------------------------------------------

struct DiagnoseOptions {
  std::string input;
  std::vector<std::string> bases{"fourier"};
  int pmax = 0;
  int reorder = 0;
  double split = 0.0;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  std::string out;
};

// Per-group seeded shuffle; the first round(ratio * n_j) curves train, the rest test.
std::pair<FunctionalDataset, FunctionalDataset> split_dataset(const FunctionalDataset& data, double ratio,
                                                              std::uint64_t seed) {
  FunctionalDataset train, test;
  train.labels = test.labels = data.labels;
  for (std::size_t j = 0; j < data.groups.size(); ++j) {
    const auto& g = data.groups[j];
    std::vector<std::size_t> order(g.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    RngStream rng(seed, {3, j});
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.index(i)]);
    const auto n_train = static_cast<std::size_t>(std::lround(ratio * static_cast<double>(g.size())));
    if (n_train < 2 || g.size() - n_train < 2) {
      throw Error(ErrorCode::TooFewObservations, "--split leaves fewer than 2 curves in a half of group " + std::to_string(j));
    }
    train.groups.emplace_back();
    test.groups.emplace_back();
    for (std::size_t i = 0; i < order.size(); ++i) {
      (i < n_train ? train.groups.back() : test.groups.back()).push_back(g[order[i]]);
    }
  }
  train.shared_grid = train.grids_identical();
  test.shared_grid = test.grids_identical();
  return {train, test};
}

// Nested-curve selection: the p with the largest increase over p - 1.
int select_p(const DiagnosticCurve& c) {
  int best = 1;
  double best_gain = -1.0;
  for (std::size_t i = 0; i < c.values.size(); ++i) {
    const double gain = c.values[i] - (i == 0 ? 0.0 : c.values[i - 1]);
    if (gain > best_gain) {
      best_gain = gain;
      best = static_cast<int>(i) + 1;
    }
  }
  return best;
}

std::vector<int> select_functions(const ReorderProfile& prof) {
  std::vector<int> out(prof.spikes.begin(), prof.spikes.end());
  if (out.empty()) {
    out.push_back(static_cast<int>(std::max_element(prof.values.begin(), prof.values.end()) - prof.values.begin()) + 1);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

int cmd_diagnose(const DiagnoseOptions& o) {
  const auto start = Clock::now();
  auto loaded = load(o.input);
  const auto& full = loaded.table.data;
  if (o.split != 0.0 && !(o.split > 0.0 && o.split < 1.0)) throw Error(ErrorCode::InvalidConfig, "--split must lie in (0,1)");
  FunctionalDataset train = full, held_out;
  if (o.split > 0.0) std::tie(train, held_out) = split_dataset(full, o.split, o.seed);

  std::vector<BasisSpec> specs;
  for (const auto& b : o.bases) specs.push_back(BasisSpec{parse_basis_family(b), 1, 4, {}});
  const bool reorder = o.reorder > 0;
  const int p_max = reorder ? 0 : (o.pmax > 0 ? o.pmax : default_p_max(train));
  std::cout << "bases =";
  for (const auto& s : specs) std::cout << ' ' << s.label();
  std::cout << (reorder ? ", reorder N = " + std::to_string(o.reorder) : ", p_max = " + std::to_string(p_max));
  if (o.split > 0.0) std::cout << ", split = " << fmt(o.split) << " (seed " << o.seed << ")";
  std::cout << '\n';

  RunRecord record;
  record.command = "diagnose";
  record.seed = o.seed;
  record.config = {{"input", o.input}, {"bases", o.bases}, {"pmax", p_max}, {"reorder", o.reorder},
                   {"split", o.split}, {"alpha", o.alpha}, {"groups", group_mapping(full)}};
  json artifacts = json::array();
  json selections = json::array();

  std::vector<std::pair<BasisSpec, std::vector<int>>> chosen;  // basis with selected 1-based functions
  if (reorder) {
    std::vector<ReorderProfile> profiles;
    for (const auto& spec : specs) profiles.push_back(reorder_diagnostic(train, spec, o.reorder));
    emit_diagnostic_artifacts(profiles, o.out);
    for (std::size_t b = 0; b < profiles.size(); ++b) {
      const auto& prof = profiles[b];
      artifacts.push_back(to_json(prof));
      std::cout << prof.basis_label << ": spikes at {" << join({prof.spikes.begin(), prof.spikes.end()}) << "}\n";
      chosen.emplace_back(specs[b], select_functions(prof));
    }
  } else {
    const auto curves = multi_basis_diagnostic(train, specs, p_max);
    emit_diagnostic_artifacts(curves, o.out);
    for (std::size_t b = 0; b < curves.size(); ++b) {
      artifacts.push_back(to_json(curves[b]));
      print_warnings(curves[b].warnings);
      const int p = select_p(curves[b]);
      std::cout << curves[b].basis_label << ": largest jump at p = " << p << '\n';
      std::vector<int> first(static_cast<std::size_t>(p));
      std::iota(first.begin(), first.end(), 1);
      chosen.emplace_back(specs[b], first);
    }
  }

  if (o.split > 0.0) {
    for (const auto& [spec, functions] : chosen) {
      BasisSpec at = spec;
      at.p = *std::max_element(functions.begin(), functions.end());
      std::vector<Eigen::Index> cols;
      for (int l : functions) cols.push_back(l - 1);
      const auto scores = project_dataset(held_out, at).select(cols);
      TestResult r;
      try {
        r = t_flrt(scores);
      } catch (const SingularCovarianceError& e) {
        rethrow_singular(e, held_out);
      }
      const auto [name, pv] = headline_p(r, scores.p(), nullptr);
      std::cout << "held-out test, " << spec.label() << " functions {" << join(functions) << "}: T = " << fmt(r.t_flrt)
                << ", " << name << " = " << fmt(pv) << "; " << verdict(pv, o.alpha) << '\n';
      selections.push_back({{"basis", spec.label()}, {"functions", functions}, {"held_out", to_json(r)},
                            {"p_value_kind", name}, {"p_value", pv}, {"reject", pv < o.alpha}});
    }
  } else {
    for (const auto& [spec, functions] : chosen) {
      selections.push_back({{"basis", spec.label()}, {"functions", functions}});
    }
    std::cerr << "caution: testing functions chosen from these plots on the same data uses the data twice and may "
                 "inflate the size; pass --split 0.5 for a held-out test\n";
  }

  record.result = {{"artifacts", {{"csv", o.out + ".csv"}, {"svg", o.out + ".svg"}}},
                   {"diagnostics", artifacts},
                   {"selection", selections},
                   {"warnings", loaded.warnings}};
  record.timings = {{"total_seconds", seconds_since(start)}};
  write_json_file(record.to_json(), o.out + ".json");
  print_warnings(loaded.warnings);
  return 0;
}

// ---- simulate ------------------------------------------------------------

struct SimulateOptions {
  std::string preset;
  std::string config;
  std::string scale;
  bool full = false;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out;
};

std::pair<int, int> parse_scale(const std::string& s) {
  int R = 0, B = 0;
  char comma = 0;
  std::istringstream in(s);
  if (!(in >> R >> comma >> B) || comma != ',' || !in.eof()) {
    throw Error(ErrorCode::InvalidConfig, "--scale expects R,B (e.g. 1000,500), got '" + s + "'");
  }
  return {R, B};
}

std::string sweep_tag(double v) {
  std::string s = fmt(v);
  std::replace(s.begin(), s.end(), '.', 'p');
  return s;
}

int run_figure(const SimulateOptions& o, FigurePreset fig) {
  const auto start = Clock::now();
  if (o.seed_given) fig.design.seed = o.seed;
  RunRecord record;
  record.command = "simulate";
  record.seed = fig.design.seed;
  json bases = json::array();
  for (const auto& b : fig.bases) bases.push_back(b.label());
  record.config = {{"preset", fig.name}, {"design", fig.design}, {"bases", bases}, {"reorder", fig.reorder},
                   {"p_max", fig.p_max}, {"N", fig.N}};
  json results = json::array();
  for (double c : fig.c_values) {
    const auto data = generate_dataset(fig.design, c, 0);
    const std::string stem = o.out + "/" + fig.name + "_c" + sweep_tag(c);
    json entry = {{"c", c}, {"csv", stem + ".csv"}, {"svg", stem + ".svg"}};
    if (fig.reorder) {
      std::vector<ReorderProfile> profiles;
      for (const auto& spec : fig.bases) profiles.push_back(reorder_diagnostic(data, spec, fig.N));
      emit_diagnostic_artifacts(profiles, stem);
      for (const auto& p : profiles) {
        entry["profiles"].push_back(to_json(p));
        std::cout << fig.name << " c = " << fmt(c) << ", " << p.basis_label << ": spikes at {"
                  << join({p.spikes.begin(), p.spikes.end()}) << "}\n";
      }
    } else {
      const auto curves = multi_basis_diagnostic(data, fig.bases, fig.p_max);
      emit_diagnostic_artifacts(curves, stem);
      for (const auto& cv : curves) {
        entry["curves"].push_back(to_json(cv));
        std::cout << fig.name << " c = " << fmt(c) << ", " << cv.basis_label << ": largest jump at p = " << select_p(cv)
                  << '\n';
      }
    }
    results.push_back(entry);
  }
  record.result = {{"figures", results}};
  record.timings = {{"total_seconds", seconds_since(start)}};
  write_json_file(record.to_json(), o.out + "/" + fig.name + ".json");
  return 0;
}

int cmd_simulate(const SimulateOptions& o) {
  if (o.preset.empty() == o.config.empty()) throw Error(ErrorCode::InvalidConfig, "give exactly one of --preset or --config");
  std::filesystem::create_directories(o.out);
  if (!o.preset.empty() && is_figure_preset(o.preset)) return run_figure(o, figure_preset(o.preset));

  const auto start = Clock::now();
  ExperimentConfig config = o.preset.empty() ? read_experiment_config(o.config) : table_preset(o.preset);
  if (!o.scale.empty()) {
    const auto [R, B] = parse_scale(o.scale);
    apply_scale(config, R, B);
  } else if (!o.preset.empty() && !o.full) {
    apply_scale(config, kDefaultReplications, kDefaultBootstrap);
  }
  if (o.seed_given) config.seed = o.seed;
  validate(config);
  std::cout << config.name << ": R = " << config.replications << ", B = " << config.bootstrap << ", seed = " << config.seed
            << ", threads = " << (configured_threads() == 0 ? std::string("auto") : std::to_string(configured_threads()))
            << '\n';

  const auto table = run_rejection_experiment(config);
  const std::string stem = o.out + "/" + (config.name.empty() ? std::string("experiment") : config.name);
  write_table_csv(table, stem + ".csv");
  write_table_svg(table, stem + ".svg", config.name + " rejection rates");
  for (const auto& r : table.rows) {
    std::cout << "  " << to_string(table.sweep) << " = " << fmt(r.sweep_value) << "  " << r.basis << "  p = " << r.p
              << "  reject = " << fmt(r.reject_rate) << '\n';
  }

  RunRecord record;
  record.command = "simulate";
  record.seed = config.seed;
  record.config = config;
  if (!o.preset.empty()) record.config["preset"] = o.preset;
  record.result = {{"table", to_json(table)}, {"csv", stem + ".csv"}, {"svg", stem + ".svg"}};
  record.timings = {{"total_seconds", seconds_since(start)}};
  write_json_file(record.to_json(), stem + ".json");
  return 0;
}

// ---- generate ------------------------------------------------------------

struct GenerateOptions {
  std::string preset;
  double value = 0.0;
  std::uint64_t replicate = 0;
  std::uint64_t seed = 1;
  std::string layout = "wide";
  std::string out;
};

int cmd_generate(const GenerateOptions& o) {
  ExperimentConfig config = table_preset(o.preset);
  config.seed = o.seed;
  auto table = make_curve_table(generate_dataset(config, o.value, o.replicate));
  if (o.layout != "wide" && o.layout != "long") throw Error(ErrorCode::InvalidConfig, "--layout must be wide or long");
  write_curve_table_file(table, o.layout == "wide" ? CurveLayout::wide : CurveLayout::long_format, o.out);
  std::cout << "wrote " << o.out << " (" << o.preset << ", " << to_string(config.sweep) << " = " << fmt(o.value)
            << ", replicate " << o.replicate << ", seed " << o.seed << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"funkmean: k-sample test for equality of functional means"};
  app.require_subcommand(1);

  TestOptions test_opts;
  auto* test = app.add_subcommand("test", "Run the test on a curve CSV and write a JSON run record");
  test->add_option("input", test_opts.input, "Curve table (wide or long CSV)")->required();
  test->add_option("--basis", test_opts.basis, "fourier, haar or spline")->capture_default_str();
  test->add_option("--p", test_opts.p, "Number of basis scores")->capture_default_str()->check(CLI::PositiveNumber);
  test->add_option("--bootstrap", test_opts.bootstrap, "Bootstrap resamples (0 = off)")->capture_default_str();
  test->add_option("--seed", test_opts.seed, "Bootstrap seed")->capture_default_str();
  test->add_option("--alpha", test_opts.alpha, "Level")->capture_default_str();
  test->add_option("--select", test_opts.select, "Test only these 1-based basis functions")->delimiter(',');
  test->add_option("--out", test_opts.out, "Run record path (JSON)")->required();

  DiagnoseOptions diag_opts;
  auto* diagnose = app.add_subcommand("diagnose", "Noncentrality diagnostics per basis");
  diagnose->add_option("input", diag_opts.input, "Curve table (wide or long CSV)")->required();
  diagnose->add_option("--bases", diag_opts.bases, "Comma-separated bases")->delimiter(',')->capture_default_str();
  auto* pmax = diagnose->add_option("--pmax", diag_opts.pmax, "Largest p for the multi-basis curve");
  auto* reorder = diagnose->add_option("--reorder", diag_opts.reorder, "Profile of single functions 1..N");
  pmax->excludes(reorder);
  diagnose->add_option("--split", diag_opts.split, "Train fraction per group; test the selection on the rest");
  diagnose->add_option("--seed", diag_opts.seed, "Split seed")->capture_default_str();
  diagnose->add_option("--alpha", diag_opts.alpha, "Level for the held-out verdict")->capture_default_str();
  diagnose->add_option("--out", diag_opts.out, "Output stem (writes .csv, .svg, .json)")->required();

  SimulateOptions sim_opts;
  auto* simulate = app.add_subcommand("simulate", "Run a simulation preset or config");
  auto* preset = simulate->add_option("--preset", sim_opts.preset, "table1, table2, table3, fig1 or fig2");
  auto* config = simulate->add_option("--config", sim_opts.config, "Experiment config JSON");
  preset->excludes(config);
  auto* scale = simulate->add_option("--scale", sim_opts.scale, "R,B (default 1000,500 for presets)");
  simulate->add_flag("--full", sim_opts.full, "Use the full-scale preset (R = 5000, B = 1000)")->excludes(scale);
  auto* sim_seed = simulate->add_option("--seed", sim_opts.seed, "Override the design seed");
  simulate->add_option("--out", sim_opts.out, "Output directory")->required();

  GenerateOptions gen_opts;
  auto* generate = app.add_subcommand("generate", "Write one simulated dataset of a table preset as CSV");
  generate->add_option("--preset", gen_opts.preset, "table1, table2 or table3")->required();
  generate->add_option("--value", gen_opts.value, "Sweep value (nu or c)")->capture_default_str();
  generate->add_option("--replicate", gen_opts.replicate, "Replicate index")->capture_default_str();
  generate->add_option("--seed", gen_opts.seed, "Design seed")->capture_default_str();
  generate->add_option("--layout", gen_opts.layout, "wide or long")->capture_default_str();
  generate->add_option("--out", gen_opts.out, "CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  apply_thread_limit();
  try {
    if (*test) return cmd_test(test_opts);
    if (*diagnose) return cmd_diagnose(diag_opts);
    if (*simulate) {
      sim_opts.seed_given = sim_seed->count() > 0;
      return cmd_simulate(sim_opts);
    }
    if (*generate) return cmd_generate(gen_opts);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
