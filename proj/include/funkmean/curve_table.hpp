#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "funkmean/projection.hpp"

namespace funkmean {

/// wide: `#grid,t_1,...,t_m` then `group,id,v_1,...,v_m` per curve.
/// long: header `group,id,time,value`, one row per observation point.
enum class CurveLayout { wide, long_format };

/// A dataset with its curve ids. Group labels are mapped to indices by first
/// appearance and kept in data.labels.
struct CurveTable {
  FunctionalDataset data;
  std::vector<std::vector<std::string>> ids;  // ids[j][i] names curve i of group j
  CurveLayout layout = CurveLayout::wide;
};

/// Detects the layout from the first line. Throws ParseError("line N: ...").
CurveTable read_curve_table(std::istream& in);
CurveTable read_curve_table_file(const std::string& path);

/// Numbers are written in shortest round-trip form. Wide layout requires a shared grid.
void write_curve_table(const CurveTable& table, CurveLayout layout, std::ostream& out);
void write_curve_table_file(const CurveTable& table, CurveLayout layout, const std::string& path);

/// Wraps a dataset with generated ids "1", "2", ... per group.
CurveTable make_curve_table(FunctionalDataset data);

}  // namespace funkmean
