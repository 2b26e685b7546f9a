#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace featdyn {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartOptions {
  std::string title;
  std::string x_label = "iteration";
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  int width = 720;
  int height = 440;
};

/// Self-contained SVG line chart. Points that are non-finite, or not
/// positive on a log axis, are dropped.
void write_line_chart(std::ostream& out, const std::vector<Series>& series, const ChartOptions& options);

struct ImageTile {
  std::string caption;
  int width = 28;
  int height = 28;
  std::vector<double> pixels;  // row-major, width * height
};

/// Grid of grayscale tiles, each normalised to its own [min, max].
void write_image_grid(std::ostream& out, const std::vector<ImageTile>& tiles, int columns, int cell_px = 3);

}  // namespace featdyn
