#pragma once

// Dataset ingestion. The DBH file layout puts the plot id in column 1, the
// diameter in column 10 and the height in column 11 (all 1-based); callers can
// override the positions when their file differs. Missing values (empty, NA,
// NaN) are dropped.

#include <cctype>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "difit/common.hpp"
#include "difit/grouped_data.hpp"

namespace difit {

/// Round to `digits` significant digits. Reports serialize through this so a
/// rerun with the same seed is byte-identical.
inline double round_sig(double v, int digits = 10) {
  if (!std::isfinite(v)) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return std::strtod(buf, nullptr);
}

namespace io_detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // trim surrounding whitespace and quotes
    std::size_t b = 0, e = field.size();
    while (b < e && (std::isspace(static_cast<unsigned char>(field[b])) || field[b] == '"')) ++b;
    while (e > b && (std::isspace(static_cast<unsigned char>(field[e - 1])) || field[e - 1] == '"'))
      --e;
    out.push_back(field.substr(b, e - b));
  }
  return out;
}

inline bool is_missing(const std::string& s) {
  return s.empty() || s == "NA" || s == "na" || s == "NaN" || s == "nan";
}

inline std::optional<double> parse_field(const std::string& s) {
  if (is_missing(s)) return std::nullopt;
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') return std::nullopt;
  return v;
}

inline std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open file: " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(split_csv_line(line));
  }
  return rows;
}

}  // namespace io_detail

enum class DbhColumn { dbh, height };

/// Read one measurement column for one plot, in file order, dropping missing
/// values. Column positions are 1-based.
inline Sample load_dbh(const std::string& path, int plot_id, DbhColumn column,
                       int plot_col = 1, int dbh_col = 10, int height_col = 11) {
  auto rows = io_detail::read_csv(path);
  require(!rows.empty(), "empty file: " + path);
  int value_col = column == DbhColumn::dbh ? dbh_col : height_col;
  Sample out;
  bool plot_seen = false;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (static_cast<int>(row.size()) < plot_col ||
        static_cast<int>(row.size()) < value_col) {
      if (r == 0) continue;  // short header line
      throw domain_error("row " + std::to_string(r + 1) + " of " + path +
                         " lacks column " + std::to_string(value_col));
    }
    auto pid = io_detail::parse_field(row[plot_col - 1]);
    if (!pid) continue;  // header or malformed id
    if (std::lround(*pid) != plot_id) continue;
    plot_seen = true;
    auto v = io_detail::parse_field(row[value_col - 1]);
    if (v) out.push_back(*v);
  }
  require(plot_seen, "plot id " + std::to_string(plot_id) + " not found in " + path);
  require(!out.empty(), "no usable values for plot " + std::to_string(plot_id));
  return out;
}

/// Read paired (dbh, height) rows for one plot; rows missing either value are
/// dropped together so the vectors stay aligned.
inline std::pair<Sample, Sample> load_dbh_pairs(const std::string& path, int plot_id,
                                                int plot_col = 1, int dbh_col = 10,
                                                int height_col = 11) {
  auto rows = io_detail::read_csv(path);
  require(!rows.empty(), "empty file: " + path);
  Sample d, h;
  bool plot_seen = false;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) < plot_col ||
        static_cast<int>(row.size()) < std::max(dbh_col, height_col))
      continue;
    auto pid = io_detail::parse_field(row[plot_col - 1]);
    if (!pid || std::lround(*pid) != plot_id) continue;
    plot_seen = true;
    auto dv = io_detail::parse_field(row[dbh_col - 1]);
    auto hv = io_detail::parse_field(row[height_col - 1]);
    if (dv && hv) {
      d.push_back(*dv);
      h.push_back(*hv);
    }
  }
  require(plot_seen, "plot id " + std::to_string(plot_id) + " not found in " + path);
  require(!d.empty(), "no usable (dbh, height) pairs for plot " + std::to_string(plot_id));
  return {d, h};
}

/// Grouped data as a two-column CSV of (class boundary, frequency). With m
/// classes the file has m + 1 boundary rows; the frequency on the last row is
/// optional and ignored.
inline GroupedSample load_grouped(const std::string& path) {
  auto rows = io_detail::read_csv(path);
  GroupedSample g;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    require(!row.empty(), "grouped file: empty row");
    auto b = io_detail::parse_field(row[0]);
    if (!b && r == 0) continue;  // header
    require(b.has_value(), "grouped file: non-numeric boundary in row " + std::to_string(r + 1));
    g.boundaries.push_back(*b);
    if (row.size() >= 2) {
      auto f = io_detail::parse_field(row[1]);
      if (f) g.frequencies.push_back(*f);
    }
  }
  require(g.boundaries.size() >= 2, "grouped file: need at least two boundaries");
  if (g.frequencies.size() == g.boundaries.size())
    g.frequencies.pop_back();  // trailing placeholder on the last boundary row
  g.validate();
  return g;
}

/// Parse a comma-separated list of reals ("1,2.5,3").
inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& f : io_detail::split_csv_line(s)) {
    auto v = io_detail::parse_field(f);
    require(v.has_value(), "expected a number, got '" + f + "'");
    out.push_back(*v);
  }
  return out;
}

}  // namespace difit
