#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rotopt/linalg.hpp"

namespace rotopt::io {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Parse, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline double parse_number(const std::string& tok) {
  std::size_t a = tok.find_first_not_of(" \t\r");
  std::size_t b = tok.find_last_not_of(" \t\r");
  if (a == std::string::npos) throw Error(ErrorKind::Parse, "empty field");
  const std::string t = tok.substr(a, b - a + 1);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) throw Error(ErrorKind::Parse, "not a number: '" + t + "'");
  if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "non-finite value '" + t + "'");
  return v;
}

// Rows of comma-separated decimals; blank lines and lines starting with '#' are skipped.
inline std::vector<std::vector<double>> parse_csv_rows(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[line.find_first_not_of(" \t\r")] == '#')
      continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (true) {
      const std::size_t next = line.find(',', pos);
      row.push_back(parse_number(line.substr(pos, next == std::string::npos ? std::string::npos : next - pos)));
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix rows_to_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw Error(ErrorKind::Parse, "no data rows");
  const std::size_t cols = rows.front().size();
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw Error(ErrorKind::Parse, "ragged rows");
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

inline Matrix parse_json_matrix(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, e.what());
  }
  if (!j.is_object() || !j.contains("rows") || !j["rows"].is_array())
    throw Error(ErrorKind::Parse, "JSON matrix needs a \"rows\" array");
  std::vector<std::vector<double>> rows;
  for (const auto& r : j["rows"]) {
    if (!r.is_array()) throw Error(ErrorKind::Parse, "each row must be an array");
    std::vector<double> row;
    for (const auto& v : r) {
      if (!v.is_number()) throw Error(ErrorKind::Parse, "matrix entries must be numbers");
      row.push_back(v.get<double>());
    }
    rows.push_back(std::move(row));
  }
  Matrix m = rows_to_matrix(rows);
  if (j.contains("n") && (!j["n"].is_number_integer() || j["n"].get<Index>() != m.rows()))
    throw Error(ErrorKind::Parse, "\"n\" does not match the row count");
  return m;
}

inline bool looks_like_json(const std::string& text) {
  const std::size_t p = text.find_first_not_of(" \t\r\n");
  return p != std::string::npos && text[p] == '{';
}

// Any rectangular table, CSV or JSON.
inline Matrix read_table(const std::string& path) {
  const std::string text = read_file(path);
  return looks_like_json(text) ? parse_json_matrix(text) : rows_to_matrix(parse_csv_rows(text));
}

inline Matrix read_matrix(const std::string& path) {
  Matrix m = read_table(path);
  if (m.rows() != m.cols()) throw Error(ErrorKind::Parse, "matrix in '" + path + "' is not square");
  if (!m.allFinite()) throw Error(ErrorKind::NonFinite, "matrix in '" + path + "' has non-finite entries");
  return m;
}

// All numbers of a table, row by row.
inline Vector flatten(const Matrix& m) {
  Vector v(m.size());
  Index k = 0;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) v(k++) = m(i, j);
  return v;
}

inline Vector read_vector(const std::string& path) { return flatten(read_table(path)); }

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_matrix_csv(std::ostream& os, const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
}

inline nlohmann::json matrix_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    nlohmann::json r = nlohmann::json::array();
    for (Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return {{"n", m.rows()}, {"rows", std::move(rows)}};
}

inline nlohmann::json vector_json(const Vector& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline void write_matrix_json(std::ostream& os, const Matrix& m) {
  // nlohmann prints doubles with enough digits to round-trip.
  os << matrix_json(m).dump() << '\n';
}

inline void write_matrix_file(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Parse, "cannot write '" + path + "'");
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json")
    write_matrix_json(out, m);
  else
    write_matrix_csv(out, m);
}

}  // namespace rotopt::io
