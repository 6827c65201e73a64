#pragma once

#include <string>
#include <vector>

// Minimal hand-written SVG output: line plots and colour maps.

namespace nrc::cli::svg {

struct Series {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;
};

struct Axes {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool log_x = false;
  bool log_y = false;
};

std::string line_plot(const Axes& axes, const std::vector<Series>& series);

/// Colour map of values on an nx-by-ny grid; values[j * nx + i] sits at (x[i], y[j]).
/// Non-finite values are drawn grey.
std::string color_map(const Axes& axes, const std::vector<double>& x, const std::vector<double>& y,
                      const std::vector<double>& values);

}  // namespace nrc::cli::svg
