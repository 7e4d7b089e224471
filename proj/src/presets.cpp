#include "funkmean/presets.hpp"

#include <algorithm>

#include "funkmean/error.hpp"

namespace funkmean {

namespace {

ExperimentConfig table1() {
  ExperimentConfig c;
  c.name = "table1";
  c.sizes = {50, 30};
  c.groups = {GroupDesign{{5.0, 1.0, 0.5}, MeanSpec::zero(), true}, GroupDesign{{1.0, 4.0, 0.5}, MeanSpec::zero(), true}};
  c.p_values = {2};
  c.sweep = SweepKind::nu;
  c.sweep_values = {0.5, 1.0, 1.5, 2.0, 5.0, 10.0, 50.0};
  return c;
}

ExperimentConfig table2() {
  ExperimentConfig c;
  c.name = "table2";
  c.sizes = {50, 30};
  c.groups = {GroupDesign{{5.0, 1.0, 5.0}, MeanSpec::linear(0.0), true},
              GroupDesign{{1.0, 0.5, 5.0}, MeanSpec::neg_quadratic(0.0), true}};
  c.p_values = {3};
  c.sweep = SweepKind::c;
  c.sweep_values = {0.0, 0.107, 0.214, 0.321, 0.429, 0.536, 0.643, 0.750, 0.857, 0.964, 1.070, 1.180, 1.290};
  return c;
}

ExperimentConfig table3() {
  ExperimentConfig c;
  c.name = "table3";
  c.sizes = {500, 300};
  c.groups = {GroupDesign{{5.0, 1.0, 5.0}, MeanSpec::identity_plus_sine(0.0), false},
              GroupDesign{{1.0, 0.5, 5.0}, MeanSpec::identity_plus_sine(0.0), true}};
  c.p_values = {2, 3, 4, 5, 10, 11};
  c.sweep = SweepKind::c;
  c.sweep_values = {0.0, 0.2, 0.4, 0.6};
  return c;
}

}  // namespace

std::vector<std::string> preset_names() { return {"table1", "table2", "table3", "fig1", "fig2"}; }

bool is_table_preset(const std::string& name) { return name == "table1" || name == "table2" || name == "table3"; }

bool is_figure_preset(const std::string& name) { return name == "fig1" || name == "fig2"; }

ExperimentConfig table_preset(const std::string& name) {
  ExperimentConfig c;
  if (name == "table1") {
    c = table1();
  } else if (name == "table2") {
    c = table2();
  } else if (name == "table3") {
    c = table3();
  } else {
    throw Error(ErrorCode::UnknownPreset, "unknown preset '" + name + "' (table1, table2, table3, fig1, fig2)");
  }
  apply_scale(c, 5000, 1000);
  return c;
}

void apply_scale(ExperimentConfig& config, int R, int B) {
  if (R < 1 || B < 1) throw Error(ErrorCode::InvalidConfig, "scale needs R >= 1 and B >= 1");
  config.replications = R;
  config.bootstrap = B;
}

FigurePreset figure_preset(const std::string& name) {
  FigurePreset f;
  f.name = name;
  f.design = table3();
  f.design.name = name;
  f.design.replications = 1;
  if (name == "fig1") {
    f.c_values = {0.2};
    f.bases = {BasisSpec::haar(12), BasisSpec::fourier(12)};
    f.reorder = false;
    f.p_max = 12;
  } else if (name == "fig2") {
    f.c_values = {0.2, 0.0};
    f.bases = {BasisSpec::haar(100), BasisSpec::fourier(100)};
    f.reorder = true;
    f.N = 100;
  } else {
    throw Error(ErrorCode::UnknownPreset, "unknown preset '" + name + "' (table1, table2, table3, fig1, fig2)");
  }
  f.design.sweep_values = f.c_values;
  return f;
}

}  // namespace funkmean
