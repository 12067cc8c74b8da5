#include "visc/experiment/csv.hpp"

#include "visc/experiment/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace visc::experiment {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& text, const std::filesystem::path& path, std::size_t line) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || (errno == ERANGE && std::isinf(v)))
    throw IoError(path.string() + ":" + std::to_string(line) + ": not a number '" + text + "'");
  return v;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty()) throw IoError(path.string() + ": empty file");
  return lines;
}

}  // namespace

void write_space_time(const std::filesystem::path& path, const std::vector<double>& times, const CellField& coords,
                      const SpaceTimeField& values) {
  if (static_cast<Index>(times.size()) != values.rows() || coords.size() != values.cols())
    throw std::invalid_argument("write_space_time: shape mismatch");
  auto out = open_out(path);
  out << "t\\x";
  for (Index j = 0; j < coords.size(); ++j) out << ',' << format_double(coords[j]);
  out << '\n';
  for (Index n = 0; n < values.rows(); ++n) {
    out << format_double(times[n]);
    for (Index j = 0; j < values.cols(); ++j) out << ',' << format_double(values(n, j));
    out << '\n';
  }
  finish(out, path);
}

SpaceTimeTable read_space_time(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  const auto header = split(lines[0]);
  if (header.empty() || header[0] != "t\\x") throw IoError(path.string() + ": missing 't\\x' header");
  SpaceTimeTable table;
  for (std::size_t j = 1; j < header.size(); ++j) table.coords.push_back(parse_double(header[j], path, 1));
  const Index width = static_cast<Index>(table.coords.size());
  table.values.resize(static_cast<Index>(lines.size()) - 1, width);
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split(lines[r]);
    if (static_cast<Index>(cells.size()) != width + 1)
      throw IoError(path.string() + ":" + std::to_string(r + 1) + ": wrong number of columns");
    table.times.push_back(parse_double(cells[0], path, r + 1));
    for (Index j = 0; j < width; ++j) table.values(static_cast<Index>(r) - 1, j) = parse_double(cells[j + 1], path, r + 1);
  }
  return table;
}

void write_columns(const std::filesystem::path& path, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size()) throw std::invalid_argument("write_columns: header/column mismatch");
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& col : columns)
    if (col.size() != rows) throw std::invalid_argument("write_columns: ragged columns");
  auto out = open_out(path);
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < columns.size(); ++j) out << (j ? "," : "") << format_double(columns[j][r]);
    out << '\n';
  }
  finish(out, path);
}

void write_series(const std::filesystem::path& path, const std::string& header, const std::vector<double>& keys,
                  const std::vector<double>& values) {
  write_columns(path, split(header), {keys, values});
}

Series read_columns(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  Series s;
  s.header = split(lines[0]);
  s.columns.resize(s.header.size());
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split(lines[r]);
    if (cells.size() != s.header.size())
      throw IoError(path.string() + ":" + std::to_string(r + 1) + ": wrong number of columns");
    for (std::size_t j = 0; j < cells.size(); ++j) s.columns[j].push_back(parse_double(cells[j], path, r + 1));
  }
  return s;
}

}  // namespace visc::experiment
