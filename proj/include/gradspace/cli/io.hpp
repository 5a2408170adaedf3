#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gradspace/error.hpp"
#include "gradspace/grid/domain.hpp"
#include "gradspace/linalg.hpp"

namespace gradspace::cli {

/// Decimal with 17 significant digits.
inline std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_vector(const Vec& v) {
  std::string s = "index,value\n";
  for (std::size_t i = 0; i < v.size(); ++i) s += std::to_string(i) + "," + format_value(v[i]) + "\n";
  return s;
}

inline std::string csv_matrix(const Vec& v, std::size_t n) {
  std::string s = "row,col,value\n";
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      s += std::to_string(i) + "," + std::to_string(j) + "," + format_value(v[i * n + j]) + "\n";
  return s;
}

/// One row per node, one column per axis index (i, j, k, then a3, a4, ...).
inline std::string csv_grid(const Vec& v, const GridDomain& dom) {
  std::string s;
  for (std::size_t a = 0; a < dom.axes(); ++a) s += (a < 3 ? std::string(1, "ijk"[a]) : "a" + std::to_string(a)) + ",";
  s += "value\n";
  for (std::size_t x = 0; x < v.size(); ++x) {
    for (std::size_t a = 0; a < dom.axes(); ++a) s += std::to_string(dom.axis_index(x, a)) + ",";
    s += format_value(v[x]) + "\n";
  }
  return s;
}

inline std::string csv_vectors(const std::vector<Vec>& vs) {
  std::string s = "vector,index,value\n";
  for (std::size_t k = 0; k < vs.size(); ++k)
    for (std::size_t i = 0; i < vs[k].size(); ++i)
      s += std::to_string(k) + "," + std::to_string(i) + "," + format_value(vs[k][i]) + "\n";
  return s;
}

/// The value column (last field) of every data row.
inline Vec parse_csv_values(const std::string& text, const std::string& name) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.find("value") == std::string::npos) {
    throw Error(ErrorKind::schema, name + ": missing CSV header");
  }
  Vec v;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    const std::string cell = comma == std::string::npos ? line : line.substr(comma + 1);
    try {
      std::size_t used = 0;
      v.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw Error(ErrorKind::schema, name + ": bad value '" + cell + "'");
    }
  }
  return v;
}

/// Rows of a vector,index,value CSV grouped by the first column.
inline std::vector<Vec> parse_csv_vectors(const std::string& text, const std::string& name) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::vector<Vec> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string k, i, val;
    if (!std::getline(row, k, ',') || !std::getline(row, i, ',') || !std::getline(row, val)) {
      throw Error(ErrorKind::schema, name + ": malformed row");
    }
    const std::size_t kk = std::stoul(k);
    if (kk >= out.size()) out.resize(kk + 1);
    out[kk].push_back(std::stod(val));
  }
  return out;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::schema, "cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::schema, "cannot write " + path.string());
  out << text;
}

}  // namespace gradspace::cli
