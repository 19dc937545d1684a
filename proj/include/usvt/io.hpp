#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "usvt/error.hpp"
#include "usvt/linalg.hpp"

namespace usvt {

/// Shortest round-trip decimal representation.
inline std::string format_number(double v) { return fmt::format("{}", v); }

inline std::ofstream open_output(const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot open '" + path + "' for writing");
  return out;
}

inline std::ifstream open_input(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open '" + path + "' for reading");
  return in;
}

inline void write_text(const std::string &path, const std::string &text) {
  auto out = open_output(path);
  out << text;
  if (!out)
    throw IoError("write failed for '" + path + "'");
}

inline std::string matrix_csv(const Matrix &m) {
  std::string text;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0)
        text += ',';
      text += format_number(m(i, j));
    }
    text += '\n';
  }
  return text;
}

/// Dense matrix as CSV, one row per line, no header.
inline void write_matrix_csv(const std::string &path, const Matrix &m) { write_text(path, matrix_csv(m)); }

inline Matrix read_matrix_csv(std::istream &in, const std::string &origin = "<stream>") {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty())
      continue;
    std::vector<double> row;
    std::stringstream fields(line);
    std::string cell;
    while (std::getline(fields, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception &) {
        throw ValidationError(origin + ": bad number '" + cell + "' on row " +
                              std::to_string(rows.size() + 1));
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ValidationError(origin + ": ragged CSV row " + std::to_string(rows.size() + 1));
    rows.push_back(std::move(row));
  }
  Matrix m(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

inline Matrix read_matrix_csv(const std::string &path) {
  auto in = open_input(path);
  return read_matrix_csv(in, path);
}

} // namespace usvt
