#include "onebit/contour.hpp"

#include <array>

#include "onebit/errors.hpp"

namespace onebit::cli {

std::vector<Segment> trace_contour(const std::function<double(double, double)>& f, const Grid2& grid,
                                   double level) {
  if (grid.cells < 1 || !(grid.x_min < grid.x_max) || !(grid.y_min < grid.y_max)) {
    throw DomainError("trace_contour: empty grid");
  }
  const int n = grid.cells;
  const double dx = (grid.x_max - grid.x_min) / n;
  const double dy = (grid.y_max - grid.y_min) / n;
  auto X = [&](int i) { return grid.x_min + i * dx; };
  auto Y = [&](int j) { return grid.y_min + j * dy; };

  std::vector<double> values(static_cast<std::size_t>(n + 1) * (n + 1));
  auto at = [&](int i, int j) -> double& { return values[static_cast<std::size_t>(j) * (n + 1) + i]; };
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) at(i, j) = f(X(i), Y(j)) - level;
  }

  std::vector<Segment> out;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      // Corners counter-clockwise from the lower left.
      const std::array<double, 4> v{at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)};
      const std::array<double, 4> cx{X(i), X(i + 1), X(i + 1), X(i)};
      const std::array<double, 4> cy{Y(j), Y(j), Y(j + 1), Y(j + 1)};

      // Crossing point on edge e (corner e to corner e+1), if any.
      std::array<std::array<double, 2>, 4> cross{};
      std::array<bool, 4> has{};
      for (int e = 0; e < 4; ++e) {
        const int a = e;
        const int b = (e + 1) % 4;
        if ((v[a] < 0.0) != (v[b] < 0.0)) {
          const double t = v[a] / (v[a] - v[b]);
          cross[e] = {cx[a] + t * (cx[b] - cx[a]), cy[a] + t * (cy[b] - cy[a])};
          has[e] = true;
        }
      }
      std::vector<int> edges;
      for (int e = 0; e < 4; ++e) {
        if (has[e]) edges.push_back(e);
      }
      if (edges.size() == 2) {
        out.push_back({cross[edges[0]][0], cross[edges[0]][1], cross[edges[1]][0], cross[edges[1]][1]});
      } else if (edges.size() == 4) {
        const double centre = f(0.5 * (X(i) + X(i + 1)), 0.5 * (Y(j) + Y(j + 1))) - level;
        // Join edges around the corner whose sign differs from the centre.
        const bool centre_neg = centre < 0.0;
        const bool first_neg = v[0] < 0.0;
        if (first_neg == centre_neg) {
          out.push_back({cross[0][0], cross[0][1], cross[1][0], cross[1][1]});
          out.push_back({cross[2][0], cross[2][1], cross[3][0], cross[3][1]});
        } else {
          out.push_back({cross[3][0], cross[3][1], cross[0][0], cross[0][1]});
          out.push_back({cross[1][0], cross[1][1], cross[2][0], cross[2][1]});
        }
      }
    }
  }
  return out;
}

}  // namespace onebit::cli
