#pragma once

// CSV and JSON emission. CSV files use '.' as decimal separator and 17
// significant digits; the first column is the time stamp.
//
//   path CSV:        t,x0,x1,...
//   rough-path CSV:  t,X0..X{l-1},XX_0_0,XX_0_1,...,XX_{l-1}_{l-1}
//                    where row i carries XX over [t_i, t_{i+1}] (row-major)
//                    and the last row carries zeros.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "roughinc/path.hpp"
#include "roughinc/rough.hpp"

namespace roughinc {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_text(const std::filesystem::path& file, const std::string& text) {
  std::error_code ec;
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path(), ec);
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write " + file.string());
  out << text;
  if (!out) throw IoError("write failed for " + file.string());
}

inline std::string read_text(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot read " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string path_csv(const Path& p, const std::string& prefix = "x") {
  std::string out = "t";
  for (int c = 0; c < p.dim(); ++c) out += "," + prefix + std::to_string(c);
  out += "\n";
  for (std::size_t i = 0; i < p.size(); ++i) {
    out += fmt17(p.times[i]);
    for (int c = 0; c < p.dim(); ++c) out += "," + fmt17(p.values(c, static_cast<Eigen::Index>(i)));
    out += "\n";
  }
  return out;
}

inline void write_path_csv(const std::filesystem::path& file, const Path& p, const std::string& prefix = "x") {
  write_text(file, path_csv(p, prefix));
}

namespace detail {

inline std::vector<std::vector<double>> parse_csv_numbers(const std::string& text, std::size_t& columns) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  columns = 0;
  bool header = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (header) {
      header = false;
      columns = cells.size();
      bool numeric = true;
      try {
        std::size_t used = 0;
        std::stod(cells.at(0), &used);
        numeric = used == cells[0].size();
      } catch (const std::exception&) {
        numeric = false;
      }
      if (!numeric) continue;
    }
    if (cells.size() != columns) throw IoError("csv line " + std::to_string(lineno) + ": expected " + std::to_string(columns) + " columns");
    std::vector<double> row;
    for (const auto& c : cells) {
      try {
        std::size_t used = 0;
        double v = std::stod(c, &used);
        if (used != c.size()) throw std::invalid_argument(c);
        row.push_back(v);
      } catch (const std::exception&) {
        throw IoError("csv line " + std::to_string(lineno) + ": '" + c + "' is not a number");
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// Recognises times t_i = i 2^-m T so that grid-aware operations work on
// loaded data.
inline void attach_grid(Path& p) {
  const std::size_t n = p.size();
  if (n < 2 || p.times.front() != 0.0) return;
  const std::size_t cells = n - 1;
  if ((cells & (cells - 1)) != 0) return;
  int m = 0;
  while ((std::size_t{1} << m) < cells) ++m;
  if (m > 30) return;
  DyadicGrid g(p.times.back(), m);
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(g.time(static_cast<std::int64_t>(i)) - p.times[i]) > 1e-12 * std::max(1.0, p.times.back())) return;
  p.times = g.times();
  p.grid = g;
}

}  // namespace detail

inline Path read_path_csv(const std::filesystem::path& file, Interpolation interp = Interpolation::linear) {
  std::size_t cols = 0;
  auto rows = detail::parse_csv_numbers(read_text(file), cols);
  if (rows.empty()) throw IoError(file.string() + ": no data rows");
  if (cols < 2) throw IoError(file.string() + ": need a time column and at least one value column");
  std::vector<double> t(rows.size());
  Mat v(static_cast<Eigen::Index>(cols - 1), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    t[i] = rows[i][0];
    for (std::size_t c = 1; c < cols; ++c) v(static_cast<Eigen::Index>(c - 1), static_cast<Eigen::Index>(i)) = rows[i][c];
  }
  Path p;
  try {
    p = Path(std::move(t), std::move(v), interp);
  } catch (const std::invalid_argument& e) {
    throw IoError(file.string() + ": " + e.what());
  }
  detail::attach_grid(p);
  return p;
}

inline std::string rough_path_csv(const RoughPath& r) {
  const int l = r.dim();
  std::string out = "t";
  for (int c = 0; c < l; ++c) out += ",X" + std::to_string(c);
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j) out += ",XX_" + std::to_string(i) + "_" + std::to_string(j);
  out += "\n";
  for (std::size_t k = 0; k < r.size(); ++k) {
    out += fmt17(r.times()[k]);
    for (int c = 0; c < l; ++c) out += "," + fmt17(r.x.values(c, static_cast<Eigen::Index>(k)));
    for (int i = 0; i < l; ++i)
      for (int j = 0; j < l; ++j) out += "," + fmt17(k + 1 < r.size() ? r.second[k](i, j) : 0.0);
    out += "\n";
  }
  return out;
}

inline RoughPath read_rough_path_csv(const std::filesystem::path& file, double alpha) {
  std::size_t cols = 0;
  auto rows = detail::parse_csv_numbers(read_text(file), cols);
  int l = 0;
  while (static_cast<std::size_t>(1 + l + l * l) < cols) ++l;
  if (static_cast<std::size_t>(1 + l + l * l) != cols || l == 0) throw IoError(file.string() + ": column count does not match 1 + l + l^2");
  if (rows.size() < 2) throw IoError(file.string() + ": need at least two rows");
  std::vector<double> t(rows.size());
  Mat v(l, static_cast<Eigen::Index>(rows.size()));
  RoughPath r;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    t[k] = rows[k][0];
    for (int c = 0; c < l; ++c) v(c, static_cast<Eigen::Index>(k)) = rows[k][1 + static_cast<std::size_t>(c)];
    if (k + 1 < rows.size()) {
      Mat a(l, l);
      for (int i = 0; i < l; ++i)
        for (int j = 0; j < l; ++j) a(i, j) = rows[k][1 + static_cast<std::size_t>(l + i * l + j)];
      r.second.push_back(a);
    }
  }
  try {
    r.x = Path(std::move(t), std::move(v));
  } catch (const std::invalid_argument& e) {
    throw IoError(file.string() + ": " + e.what());
  }
  detail::attach_grid(r.x);
  r.alpha = alpha;
  return r;
}

// JSON text with a trailing newline. Numbers use the shortest decimal form
// that reads back to the same double.
inline std::string json_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline void write_json(const std::filesystem::path& file, const nlohmann::json& j) { write_text(file, json_text(j)); }

}  // namespace roughinc
