#include "vcde/csv.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vcde {

namespace {

// split one CSV line; double quotes wrap fields, no embedded separators
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      out.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  out.push_back(cell);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// header name first, then a zero-based index string
std::size_t resolve_column(const std::vector<std::string>& header,
                           const std::string& want) {
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == want) return j;
  bool digits = !want.empty();
  for (char c : want)
    if (!std::isdigit(static_cast<unsigned char>(c))) digits = false;
  if (digits) {
    const std::size_t j = std::stoul(want);
    if (j < header.size()) return j;
  }
  throw std::invalid_argument("ingest_csv: no column named '" + want + "'");
}

bool parse_double(const std::string& cell, double& out) {
  const std::string t = trim(cell);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size() && std::isfinite(out);
}

}  // namespace

IngestResult ingest_csv(const std::string& path, const std::string& y_col,
                        const std::vector<std::string>& x_cols) {
  if (x_cols.empty())
    throw std::invalid_argument("ingest_csv: no covariate columns requested");

  std::ifstream in(path);
  if (!in) throw std::runtime_error("ingest_csv: cannot open " + path);

  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("ingest_csv: empty file " + path);
  const std::vector<std::string> header = split_csv_line(line);

  const std::size_t y_idx = resolve_column(header, y_col);
  std::vector<std::size_t> x_idx;
  for (const std::string& name : x_cols) x_idx.push_back(resolve_column(header, name));

  std::vector<double> ys;
  std::vector<std::vector<double>> xs;
  long dropped = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    std::vector<double> row(x_cols.size());
    double yv = 0.0;
    bool ok = y_idx < cells.size() && parse_double(cells[y_idx], yv);
    for (std::size_t k = 0; ok && k < x_idx.size(); ++k)
      ok = x_idx[k] < cells.size() && parse_double(cells[x_idx[k]], row[k]);
    if (!ok) {
      ++dropped;
      continue;
    }
    ys.push_back(yv);
    xs.push_back(std::move(row));
  }

  if (ys.empty()) throw std::invalid_argument("ingest_csv: no usable rows in " + path);

  Eigen::MatrixXd raw_x(static_cast<Eigen::Index>(xs.size()),
                        static_cast<Eigen::Index>(x_cols.size()));
  Eigen::VectorXd raw_y(static_cast<Eigen::Index>(ys.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    raw_y[static_cast<Eigen::Index>(i)] = ys[i];
    for (std::size_t k = 0; k < x_cols.size(); ++k)
      raw_x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = xs[i][k];
  }

  IngestResult out;
  out.data = standardize(raw_x, raw_y);
  out.rows_dropped = dropped;
  out.y_name = header[y_idx];
  for (std::size_t j : x_idx) out.x_names.push_back(header[j]);
  return out;
}

}  // namespace vcde
