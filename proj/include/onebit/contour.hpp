#pragma once

#include <functional>
#include <vector>

namespace onebit::cli {

struct Segment {
  double x0, y0, x1, y1;
};

struct Grid2 {
  double x_min, x_max, y_min, y_max;
  int cells;  // per axis
};

// Marching squares on the level set f(x, y) = level over a uniform grid.
// Saddle cells are split by the cell-centre value.
std::vector<Segment> trace_contour(const std::function<double(double, double)>& f, const Grid2& grid,
                                   double level);

}  // namespace onebit::cli
