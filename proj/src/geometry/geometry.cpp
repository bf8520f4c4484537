#include "svrt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "svrt/error.hpp"

namespace svrt::geometry {
namespace {

constexpr int kMaxContourAttempts = 1000;
constexpr double kMinRadius = 0.3;
constexpr double kMaxRadius = 1.0;
constexpr double kJitter = 0.03;
constexpr double kMinEdge = 0.02;

double cross(Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

int orientation(Point o, Point a, Point b) {
  const double c = cross(o, a, b);
  if (c > 0) return 1;
  if (c < 0) return -1;
  return 0;
}

bool on_segment(Point p, Point a, Point b) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_touch(Point p1, Point p2, Point p3, Point p4) {
  const int o1 = orientation(p1, p2, p3);
  const int o2 = orientation(p1, p2, p4);
  const int o3 = orientation(p3, p4, p1);
  const int o4 = orientation(p3, p4, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p3, p1, p2)) return true;
  if (o2 == 0 && on_segment(p4, p1, p2)) return true;
  if (o3 == 0 && on_segment(p1, p3, p4)) return true;
  if (o4 == 0 && on_segment(p2, p3, p4)) return true;
  return false;
}

double point_segment_distance(Point p, Point a, Point b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p.x - a.x) * vx + (p.y - a.y) * vy) / len2, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

// Round-half-away-from-zero of num/den for den > 0. Odd-symmetric, which keeps
// line drawing symmetric under mirroring.
int div_round(long num, long den) {
  if (num >= 0) return static_cast<int>((2 * num + den) / (2 * den));
  return -static_cast<int>((-2 * num + den) / (2 * den));
}

void draw_line(Pixel a, Pixel b, std::vector<Pixel>& out) {
  const long dx = b.x - a.x;
  const long dy = b.y - a.y;
  const long n = std::max(std::labs(dx), std::labs(dy));
  if (n == 0) {
    out.push_back(a);
    return;
  }
  for (long i = 0; i <= n; ++i) out.push_back({a.x + div_round(i * dx, n), a.y + div_round(i * dy, n)});
}

Point untranslated(Point p, const Transform& t) {
  Transform local = t;
  local.dx = 0.0;
  local.dy = 0.0;
  return transform_point(p, local);
}

void normalize_region(std::vector<Pixel>& pixels) {
  std::sort(pixels.begin(), pixels.end());
  pixels.erase(std::unique(pixels.begin(), pixels.end()), pixels.end());
}

std::vector<std::complex<double>> normalized(std::span<const Point> pts) {
  const Point c = vertex_centroid(pts);
  std::vector<std::complex<double>> out;
  out.reserve(pts.size());
  double sum2 = 0.0;
  for (const Point& p : pts) {
    out.emplace_back(p.x - c.x, p.y - c.y);
    sum2 += std::norm(out.back());
  }
  const double rms = std::sqrt(sum2 / static_cast<double>(pts.size()));
  if (rms > 0.0)
    for (auto& z : out) z /= rms;
  return out;
}

}  // namespace

Contour random_contour(Rng& rng, int complexity) {
  if (complexity < kMinContourVertices || complexity > kMaxContourVertices)
    throw InvalidArgument("contour complexity must be in [8, 64], got " + std::to_string(complexity));
  Contour contour;
  contour.id = rng.next_u64();
  std::vector<double> angles(static_cast<std::size_t>(complexity));
  for (int attempt = 0; attempt < kMaxContourAttempts; ++attempt) {
    for (double& a : angles) a = rng.uniform(0.0, 2.0 * std::numbers::pi);
    std::sort(angles.begin(), angles.end());
    contour.points.clear();
    for (double a : angles) {
      const double r = rng.uniform(kMinRadius, kMaxRadius);
      contour.points.push_back({r * std::cos(a) + kJitter * rng.normal(), r * std::sin(a) + kJitter * rng.normal()});
    }
    bool short_edge = false;
    for (std::size_t i = 0; i < contour.points.size(); ++i) {
      const Point& p = contour.points[i];
      const Point& q = contour.points[(i + 1) % contour.points.size()];
      if (std::hypot(p.x - q.x, p.y - q.y) < kMinEdge) short_edge = true;
    }
    if (!short_edge && is_simple(contour.points)) return contour;
  }
  throw GenerationError("random_contour: no simple polygon after " + std::to_string(kMaxContourAttempts) +
                        " attempts");
}

Point transform_point(Point p, const Transform& t) {
  if (t.mirror == Mirror::horizontal_axis) p.y = -p.y;
  if (t.mirror == Mirror::vertical_axis) p.x = -p.x;
  if (t.rotate != 0.0) {
    const double c = std::cos(t.rotate), s = std::sin(t.rotate);
    p = {p.x * c - p.y * s, p.x * s + p.y * c};
  }
  return {p.x * t.scale + t.dx, p.y * t.scale + t.dy};
}

Contour apply_transform(const Contour& contour, const Transform& t) {
  Contour out{{}, contour.id};
  out.points.reserve(contour.points.size());
  for (const Point& p : contour.points) out.points.push_back(transform_point(p, t));
  return out;
}

std::vector<Point> placed_points(const PlacedShape& shape) {
  return apply_transform(shape.contour, shape.transform).points;
}

BBox bounding_box(std::span<const Point> points) {
  BBox box{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const Point& p : points) {
    box.min_x = std::min(box.min_x, p.x);
    box.min_y = std::min(box.min_y, p.y);
    box.max_x = std::max(box.max_x, p.x);
    box.max_y = std::max(box.max_y, p.y);
  }
  return box;
}

BBox bounding_box(const PlacedShape& shape) { return bounding_box(placed_points(shape)); }

Point vertex_centroid(std::span<const Point> points) {
  Point c;
  for (const Point& p : points) {
    c.x += p.x;
    c.y += p.y;
  }
  const auto n = static_cast<double>(points.size());
  return {c.x / n, c.y / n};
}

bool is_simple(std::span<const Point> polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Point a0 = polygon[i], a1 = polygon[(i + 1) % n];
    if (a0 == a1) return false;
    // Adjacent edge folding back onto this one.
    const Point a2 = polygon[(i + 2) % n];
    if (cross(a0, a1, a2) == 0.0 && (a2.x - a1.x) * (a0.x - a1.x) + (a2.y - a1.y) * (a0.y - a1.y) > 0.0)
      return false;
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_touch(a0, a1, polygon[j], polygon[(j + 1) % n])) return false;
    }
  }
  return true;
}

bool point_in_polygon(Point p, std::span<const Point> polygon) {
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = polygon[i];
    const Point& b = polygon[j];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) inside = !inside;
  }
  return inside;
}

PixelRegion outline_region(const PlacedShape& shape) {
  const double fx = std::floor(shape.transform.dx);
  const double fy = std::floor(shape.transform.dy);
  const double rx = shape.transform.dx - fx;
  const double ry = shape.transform.dy - fy;
  const int ix = static_cast<int>(fx);
  const int iy = static_cast<int>(fy);

  std::vector<Pixel> vertices;
  vertices.reserve(shape.contour.points.size());
  for (const Point& p : shape.contour.points) {
    const Point q = untranslated(p, shape.transform);
    vertices.push_back({ix + static_cast<int>(std::lround(q.x + rx)), iy + static_cast<int>(std::lround(q.y + ry))});
  }
  PixelRegion region;
  for (std::size_t i = 0; i < vertices.size(); ++i)
    draw_line(vertices[i], vertices[(i + 1) % vertices.size()], region.pixels);
  normalize_region(region.pixels);
  return region;
}

Bitmap rasterize(std::span<const PlacedShape> shapes, int width, int height) {
  if (width <= 0 || height <= 0) throw InvalidArgument("rasterize: canvas must be positive");
  Bitmap bitmap(width, height);
  for (std::size_t s = 0; s < shapes.size(); ++s) {
    for (const Pixel& px : outline_region(shapes[s]).pixels) {
      if (px.x < 0 || px.y < 0 || px.x >= width || px.y >= height)
        throw OutOfCanvasError("rasterize: shape " + std::to_string(s) + " leaves the " + std::to_string(width) +
                               "x" + std::to_string(height) + " canvas at (" + std::to_string(px.x) + ", " +
                               std::to_string(px.y) + ")");
      bitmap.at(px.x, px.y) = Bitmap::ink;
    }
  }
  return bitmap;
}

bool contains(const PlacedShape& outer, const PlacedShape& inner) {
  const auto poly = placed_points(outer);
  for (const Point& p : placed_points(inner))
    if (!point_in_polygon(p, poly)) return false;
  return true;
}

double segment_distance(Point a0, Point a1, Point b0, Point b1) {
  if (segments_touch(a0, a1, b0, b1)) return 0.0;
  return std::min({point_segment_distance(a0, b0, b1), point_segment_distance(a1, b0, b1),
                   point_segment_distance(b0, a0, a1), point_segment_distance(b1, a0, a1)});
}

double min_separation(const PlacedShape& a, const PlacedShape& b) {
  const auto pa = placed_points(a);
  const auto pb = placed_points(b);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    const Point a0 = pa[i], a1 = pa[(i + 1) % pa.size()];
    for (std::size_t j = 0; j < pb.size(); ++j) {
      best = std::min(best, segment_distance(a0, a1, pb[j], pb[(j + 1) % pb.size()]));
      if (best == 0.0) return 0.0;
    }
  }
  return best;
}

std::vector<PixelRegion> connected_components(const Bitmap& bitmap) {
  std::vector<PixelRegion> regions;
  std::vector<std::uint8_t> seen(bitmap.pixels.size(), 0);
  std::vector<Pixel> stack;
  for (int y = 0; y < bitmap.height; ++y) {
    for (int x = 0; x < bitmap.width; ++x) {
      const auto idx = static_cast<std::size_t>(y) * bitmap.width + x;
      if (seen[idx] || bitmap.pixels[idx] != Bitmap::ink) continue;
      PixelRegion region;
      seen[idx] = 1;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        region.pixels.push_back(p);
        for (int ny = p.y - 1; ny <= p.y + 1; ++ny) {
          for (int nx = p.x - 1; nx <= p.x + 1; ++nx) {
            if (nx < 0 || ny < 0 || nx >= bitmap.width || ny >= bitmap.height) continue;
            const auto nidx = static_cast<std::size_t>(ny) * bitmap.width + nx;
            if (seen[nidx] || bitmap.pixels[nidx] != Bitmap::ink) continue;
            seen[nidx] = 1;
            stack.push_back({nx, ny});
          }
        }
      }
      normalize_region(region.pixels);
      regions.push_back(std::move(region));
    }
  }
  return regions;
}

bool equal_up_to_translation(const PixelRegion& a, const PixelRegion& b) {
  if (a.pixels.size() != b.pixels.size() || a.pixels.empty()) return false;
  const int ox = b.pixels.front().x - a.pixels.front().x;
  const int oy = b.pixels.front().y - a.pixels.front().y;
  for (std::size_t i = 0; i < a.pixels.size(); ++i)
    if (a.pixels[i].x + ox != b.pixels[i].x || a.pixels[i].y + oy != b.pixels[i].y) return false;
  return true;
}

PixelRegion filled_region(std::span<const Point> polygon) {
  const BBox box = bounding_box(polygon);
  PixelRegion region;
  for (int x = static_cast<int>(std::ceil(box.min_x)); x <= static_cast<int>(std::floor(box.max_x)); ++x)
    for (int y = static_cast<int>(std::ceil(box.min_y)); y <= static_cast<int>(std::floor(box.max_y)); ++y)
      if (point_in_polygon({static_cast<double>(x), static_cast<double>(y)}, polygon)) region.pixels.push_back({x, y});
  return region;
}

double centroid_aligned_iou(const PixelRegion& a, const PixelRegion& b) {
  if (a.pixels.empty() || b.pixels.empty()) return 0.0;
  auto mean = [](const PixelRegion& r) {
    double sx = 0, sy = 0;
    for (const Pixel& p : r.pixels) {
      sx += p.x;
      sy += p.y;
    }
    return Point{sx / static_cast<double>(r.pixels.size()), sy / static_cast<double>(r.pixels.size())};
  };
  const Point ca = mean(a), cb = mean(b);
  const int ox = static_cast<int>(std::lround(ca.x - cb.x));
  const int oy = static_cast<int>(std::lround(ca.y - cb.y));
  std::vector<Pixel> shifted;
  shifted.reserve(b.pixels.size());
  for (const Pixel& p : b.pixels) shifted.push_back({p.x + ox, p.y + oy});
  std::vector<Pixel> common;
  std::set_intersection(a.pixels.begin(), a.pixels.end(), shifted.begin(), shifted.end(), std::back_inserter(common));
  const double inter = static_cast<double>(common.size());
  return inter / (static_cast<double>(a.pixels.size() + shifted.size()) - inter);
}

bool similar_polygons(std::span<const Point> a, std::span<const Point> b, bool allow_rotation, double tolerance) {
  if (a.size() != b.size() || a.empty()) return false;
  const auto za = normalized(a);
  const auto zb = normalized(b);
  const std::size_t n = za.size();
  for (std::size_t s = 0; s < n; ++s) {
    std::complex<double> rotation{1.0, 0.0};
    if (allow_rotation) {
      std::complex<double> acc{0.0, 0.0};
      for (std::size_t i = 0; i < n; ++i) acc += std::conj(za[i]) * zb[(i + s) % n];
      if (std::abs(acc) == 0.0) continue;
      rotation = acc / std::abs(acc);
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < n && worst <= tolerance; ++i)
      worst = std::max(worst, std::abs(rotation * za[i] - zb[(i + s) % n]));
    if (worst <= tolerance) return true;
  }
  return false;
}

std::vector<Point> mirrored_about_centroid(std::span<const Point> polygon, Mirror mirror) {
  const Point c = vertex_centroid(polygon);
  std::vector<Point> out(polygon.begin(), polygon.end());
  for (Point& p : out) {
    if (mirror == Mirror::vertical_axis) p.x = 2.0 * c.x - p.x;
    if (mirror == Mirror::horizontal_axis) p.y = 2.0 * c.y - p.y;
  }
  return out;
}

}  // namespace svrt::geometry
