#include "funkmean/curve_table.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string_view>

#include "funkmean/error.hpp"

namespace funkmean {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

double parse_number(std::string_view field, std::size_t line) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = field.data() + field.size();
  if (!field.empty() && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    parse_fail(line, "'" + std::string(field) + "' is not a finite number");
  }
  return value;
}

std::string shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::size_t group_index(CurveTable& table, std::string_view label) {
  for (std::size_t j = 0; j < table.data.labels.size(); ++j) {
    if (table.data.labels[j] == label) return j;
  }
  table.data.labels.emplace_back(label);
  table.data.groups.emplace_back();
  table.ids.emplace_back();
  return table.data.labels.size() - 1;
}

void check_key(std::string_view group, std::string_view id, std::size_t line) {
  if (group.empty()) parse_fail(line, "empty group label");
  if (id.empty()) parse_fail(line, "empty curve id");
}

CurveTable read_wide(std::istream& in, const std::vector<std::string_view>& header) {
  CurveTable table;
  table.layout = CurveLayout::wide;
  std::vector<double> grid;
  for (std::size_t i = 1; i < header.size(); ++i) grid.push_back(parse_number(header[i], 1));
  if (grid.size() < 2) parse_fail(1, "grid needs at least 2 points");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) parse_fail(1, "grid times must be strictly increasing");
  }
  std::string raw;
  std::size_t line_no = 1;
  while (std::getline(in, raw)) {
    ++line_no;
    if (trim(raw).empty()) continue;
    const auto fields = split(raw);
    if (fields.size() != grid.size() + 2) {
      parse_fail(line_no, "expected " + std::to_string(grid.size() + 2) + " fields, found " + std::to_string(fields.size()));
    }
    check_key(fields[0], fields[1], line_no);
    DiscretizedCurve curve{grid, {}};
    curve.values.reserve(grid.size());
    for (std::size_t i = 2; i < fields.size(); ++i) curve.values.push_back(parse_number(fields[i], line_no));
    const std::size_t j = group_index(table, fields[0]);
    table.data.groups[j].push_back(std::move(curve));
    table.ids[j].emplace_back(fields[1]);
  }
  table.data.shared_grid = true;
  return table;
}

CurveTable read_long(std::istream& in) {
  CurveTable table;
  table.layout = CurveLayout::long_format;
  std::map<std::pair<std::size_t, std::string>, std::size_t> position;
  std::string raw;
  std::size_t line_no = 1;
  while (std::getline(in, raw)) {
    ++line_no;
    if (trim(raw).empty()) continue;
    const auto fields = split(raw);
    if (fields.size() != 4) parse_fail(line_no, "expected 4 fields (group,id,time,value), found " + std::to_string(fields.size()));
    check_key(fields[0], fields[1], line_no);
    const double t = parse_number(fields[2], line_no);
    const double v = parse_number(fields[3], line_no);
    const std::size_t j = group_index(table, fields[0]);
    const auto key = std::make_pair(j, std::string(fields[1]));
    auto it = position.find(key);
    if (it == position.end()) {
      it = position.emplace(key, table.data.groups[j].size()).first;
      table.data.groups[j].emplace_back();
      table.ids[j].emplace_back(fields[1]);
    }
    auto& curve = table.data.groups[j][it->second];
    if (!curve.times.empty() && !(t > curve.times.back())) {
      parse_fail(line_no, "times of curve '" + std::string(fields[1]) + "' must be sorted and strictly increasing");
    }
    curve.times.push_back(t);
    curve.values.push_back(v);
  }
  table.data.shared_grid = table.data.grids_identical();
  return table;
}

}  // namespace

CurveTable read_curve_table(std::istream& in) {
  std::string first;
  while (std::getline(in, first) && trim(first).empty()) {
  }
  if (trim(first).empty()) throw Error(ErrorCode::ParseError, "line 1: empty input");
  const auto header = split(first);
  CurveTable table;
  if (header[0] == "#grid") {
    table = read_wide(in, header);
  } else if (header.size() == 4 && header[0] == "group" && header[1] == "id" && header[2] == "time" &&
             header[3] == "value") {
    table = read_long(in);
  } else {
    parse_fail(1, "expected '#grid,...' (wide) or 'group,id,time,value' (long) header");
  }
  if (table.data.groups.empty()) throw Error(ErrorCode::ParseError, "no curves found");
  return table;
}

CurveTable read_curve_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IOFailure, "cannot open '" + path + "'");
  return read_curve_table(in);
}

void write_curve_table(const CurveTable& table, CurveLayout layout, std::ostream& out) {
  const auto& data = table.data;
  auto label = [&](std::size_t j) { return j < data.labels.size() ? data.labels[j] : std::to_string(j + 1); };
  auto id = [&](std::size_t j, std::size_t i) {
    return j < table.ids.size() && i < table.ids[j].size() ? table.ids[j][i] : std::to_string(i + 1);
  };
  if (layout == CurveLayout::wide) {
    if (!data.grids_identical()) throw Error(ErrorCode::InvalidDataset, "wide layout needs a shared grid");
    const auto& grid = data.groups.at(0).at(0).times;
    out << "#grid";
    for (double t : grid) out << ',' << shortest(t);
    out << '\n';
    for (std::size_t j = 0; j < data.groups.size(); ++j) {
      for (std::size_t i = 0; i < data.groups[j].size(); ++i) {
        out << label(j) << ',' << id(j, i);
        for (double v : data.groups[j][i].values) out << ',' << shortest(v);
        out << '\n';
      }
    }
    return;
  }
  out << "group,id,time,value\n";
  for (std::size_t j = 0; j < data.groups.size(); ++j) {
    for (std::size_t i = 0; i < data.groups[j].size(); ++i) {
      const auto& c = data.groups[j][i];
      for (std::size_t l = 0; l < c.times.size(); ++l) {
        out << label(j) << ',' << id(j, i) << ',' << shortest(c.times[l]) << ',' << shortest(c.values[l]) << '\n';
      }
    }
  }
}

void write_curve_table_file(const CurveTable& table, CurveLayout layout, const std::string& path) {
  std::ostringstream buffer;
  write_curve_table(table, layout, buffer);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IOFailure, "cannot open '" + path + "' for writing");
  out << buffer.str();
}

CurveTable make_curve_table(FunctionalDataset data) {
  CurveTable table;
  for (std::size_t j = 0; j < data.groups.size(); ++j) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < data.groups[j].size(); ++i) ids.push_back(std::to_string(i + 1));
    table.ids.push_back(std::move(ids));
  }
  while (data.labels.size() < data.groups.size()) data.labels.push_back("group" + std::to_string(data.labels.size() + 1));
  table.data = std::move(data);
  return table;
}

}  // namespace funkmean
