#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "logan/types.hpp"

namespace logan {

/**
 * n x (d+2) sample matrix in canonical column order: exposure, the d
 * mediators, outcome. `names` labels the columns in that order.
 */
struct Dataset {
  Matrix values;
  std::vector<std::string> names;
  bool centered = false;
  Vector column_means;  // means that were subtracted when centered

  int rows() const { return static_cast<int>(values.rows()); }
  int dim() const { return static_cast<int>(values.cols()); }
  int mediators() const { return dim() - 2; }
  Node outcome() const { return dim() - 1; }
};

inline std::vector<std::string> default_column_names(int dim) {
  std::vector<std::string> names;
  names.reserve(dim);
  names.emplace_back("E");
  for (int j = 1; j + 1 < dim; ++j) names.push_back("M" + std::to_string(j));
  names.emplace_back("Y");
  return names;
}

inline Dataset make_dataset(Matrix values, std::vector<std::string> names = {}) {
  if (values.cols() < 3) throw DataError("dataset needs an exposure, a mediator and an outcome");
  if (names.empty()) names = default_column_names(static_cast<int>(values.cols()));
  if (static_cast<Eigen::Index>(names.size()) != values.cols()) {
    throw DataError("dataset: column name count does not match the matrix");
  }
  return Dataset{std::move(values), std::move(names), false, Vector{}};
}

/// Subtracts the column means of the full sample.
inline Dataset center(const Dataset& data) {
  if (data.centered) return data;
  Dataset out = data;
  out.column_means = data.values.colwise().mean().transpose();
  out.values.rowwise() -= out.column_means.transpose();
  out.centered = true;
  return out;
}

inline Matrix select_rows(const Matrix& x, std::span<const int> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = x.row(rows[r]);
  return out;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, end);
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

/// Which columns play the exposure and outcome roles. Empty means first/last.
struct RoleMap {
  std::optional<std::string> exposure;
  std::optional<std::string> outcome;
};

inline double parse_number(const std::string& field, std::size_t row, std::size_t col) {
  std::string_view s = field;
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw DataError("CSV parse error at row " + std::to_string(row) + ", column " +
                    std::to_string(col) + ": '" + field + "' is not a finite number");
  }
  return v;
}

inline Dataset read_csv(std::istream& in, const RoleMap& roles = {}) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("CSV is empty");
  const auto header = split_csv_line(line);
  const std::size_t ncol = header.size();
  if (ncol < 3) throw DataError("CSV needs at least three columns");

  auto find = [&](const std::optional<std::string>& name, std::size_t fallback) {
    if (!name) return fallback;
    auto it = std::find(header.begin(), header.end(), *name);
    if (it == header.end()) throw DataError("CSV has no column named '" + *name + "'");
    if (std::find(it + 1, header.end(), *name) != header.end()) {
      throw DataError("column name '" + *name + "' is not unique");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t e_col = find(roles.exposure, 0);
  const std::size_t y_col = find(roles.outcome, ncol - 1);
  if (e_col == y_col) throw DataError("exposure and outcome must be different columns");

  std::vector<std::size_t> order{e_col};
  for (std::size_t c = 0; c < ncol; ++c) {
    if (c != e_col && c != y_col) order.push_back(c);
  }
  order.push_back(y_col);

  std::vector<std::vector<double>> rows;
  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != ncol) {
      throw DataError("CSV row " + std::to_string(row_no) + " has " + std::to_string(fields.size()) +
                      " fields, expected " + std::to_string(ncol));
    }
    std::vector<double> r(ncol);
    for (std::size_t c = 0; c < ncol; ++c) r[c] = parse_number(fields[c], row_no, c + 1);
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw DataError("CSV has a header but no data rows");

  Matrix values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(ncol));
  std::vector<std::string> names;
  for (std::size_t k = 0; k < ncol; ++k) {
    names.push_back(header[order[k]]);
    for (std::size_t i = 0; i < rows.size(); ++i) values(i, k) = rows[i][order[k]];
  }
  return make_dataset(std::move(values), std::move(names));
}

inline Dataset read_csv_file(const std::string& path, const RoleMap& roles = {}) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  try {
    return read_csv(in, roles);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

inline void write_csv(std::ostream& out, const Dataset& data) {
  for (int j = 0; j < data.dim(); ++j) out << (j ? "," : "") << data.names[j];
  out << '\n';
  for (int i = 0; i < data.rows(); ++i) {
    for (int j = 0; j < data.dim(); ++j) out << (j ? "," : "") << format_double(data.values(i, j));
    out << '\n';
  }
}

}  // namespace logan
