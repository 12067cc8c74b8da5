#pragma once

#include "visc/grid_field.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace visc::experiment {

/// %.17g: enough digits to round-trip any double.
std::string format_double(double v);

/// Space-time matrix: header "t\x,<coord_0>,...", then one row "t^n,<v_0>,..." per level.
struct SpaceTimeTable {
  std::vector<double> times;
  std::vector<double> coords;
  SpaceTimeField values;
};

void write_space_time(const std::filesystem::path& path, const std::vector<double>& times, const CellField& coords,
                      const SpaceTimeField& values);
SpaceTimeTable read_space_time(const std::filesystem::path& path);

/// Two-column series with the given header, e.g. "t,value" or "iter,value".
void write_series(const std::filesystem::path& path, const std::string& header, const std::vector<double>& keys,
                  const std::vector<double>& values);

struct Series {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;
};

/// Generic numeric CSV with a one-line header.
void write_columns(const std::filesystem::path& path, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& columns);
Series read_columns(const std::filesystem::path& path);

}  // namespace visc::experiment
