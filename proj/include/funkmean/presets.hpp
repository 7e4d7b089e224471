#pragma once

#include <string>
#include <vector>

#include "funkmean/basis.hpp"
#include "funkmean/simulate.hpp"

namespace funkmean {

/// table1, table2, table3, fig1, fig2.
std::vector<std::string> preset_names();
bool is_table_preset(const std::string& name);
bool is_figure_preset(const std::string& name);

/// Rejection-rate designs at full scale (R = 5000, B = 1000). Throws UnknownPreset.
ExperimentConfig table_preset(const std::string& name);

/// Sets replications and bootstrap size.
void apply_scale(ExperimentConfig& config, int R, int B);

inline constexpr int kDefaultReplications = 1000;
inline constexpr int kDefaultBootstrap = 500;

/// Diagnostic figure on one dataset per mean coefficient, drawn from the
/// high-frequency design (table3) at replicate 0.
struct FigurePreset {
  std::string name;
  ExperimentConfig design;
  std::vector<double> c_values;
  std::vector<BasisSpec> bases;
  bool reorder = false;  // false: multi-basis curve up to p_max; true: reorder profile of length N
  int p_max = 12;
  int N = 100;
};

FigurePreset figure_preset(const std::string& name);

}  // namespace funkmean
