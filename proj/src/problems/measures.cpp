#include "measures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace svrt::problems::measures {

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

std::vector<Point> centers(std::span<const geometry::PlacedShape> shapes) {
  std::vector<Point> out;
  out.reserve(shapes.size());
  for (const auto& s : shapes) out.push_back(geometry::bounding_box(s).center());
  return out;
}

double max_side(const geometry::PlacedShape& shape) {
  const auto box = geometry::bounding_box(shape);
  return std::max(box.width(), box.height());
}

double square_deviation(std::span<const Point> pts) {
  const Point c = geometry::vertex_centroid(pts);
  std::array<Point, 4> p{pts[0], pts[1], pts[2], pts[3]};
  std::sort(p.begin(), p.end(), [c](Point a, Point b) {
    return std::atan2(a.y - c.y, a.x - c.x) < std::atan2(b.y - c.y, b.x - c.x);
  });
  std::array<double, 4> sides{};
  double mean = 0.0;
  for (int i = 0; i < 4; ++i) {
    sides[i] = distance(p[i], p[(i + 1) % 4]);
    mean += sides[i] / 4.0;
  }
  double dev = 0.0;
  for (double s : sides) dev = std::max(dev, std::abs(s - mean));
  dev = std::max(dev, std::abs(distance(p[0], p[2]) - std::numbers::sqrt2 * mean));
  dev = std::max(dev, std::abs(distance(p[1], p[3]) - std::numbers::sqrt2 * mean));
  return dev;
}

double collinearity_deviation(std::span<const Point> pts) {
  int bi = 0, bj = 1;
  double best = -1.0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (distance(pts[i], pts[j]) > best) {
        best = distance(pts[i], pts[j]);
        bi = i;
        bj = j;
      }
  const int m = 3 - bi - bj;
  const Point a = pts[bi], b = pts[bj], q = pts[m];
  const double cross = (b.x - a.x) * (q.y - a.y) - (b.y - a.y) * (q.x - a.x);
  return std::abs(cross) / best;
}

double triangle_spread(std::span<const Point> pts) {
  const double d0 = distance(pts[0], pts[1]);
  const double d1 = distance(pts[1], pts[2]);
  const double d2 = distance(pts[0], pts[2]);
  return std::max({d0, d1, d2}) - std::min({d0, d1, d2});
}

double projection_overshoot(Point p, Point a, Point b) {
  const double len = distance(a, b);
  const double t = ((p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y)) / (len * len);
  return std::max(-t * len, (t - 1.0) * len);
}

}  // namespace svrt::problems::measures
