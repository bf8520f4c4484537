#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "svrt/rng.hpp"

namespace svrt::geometry {

/// Canvas coordinates: origin top-left, y grows downward.
struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

/// Closed polyline; the last point connects back to the first.
struct Contour {
  std::vector<Point> points;
  std::uint64_t id = 0;
  bool operator==(const Contour&) const = default;
};

enum class Mirror : std::uint8_t { none, horizontal_axis, vertical_axis };

/// Applied as mirror -> rotate -> scale -> translate.
struct Transform {
  double dx = 0.0;
  double dy = 0.0;
  double scale = 1.0;
  double rotate = 0.0;  // radians
  Mirror mirror = Mirror::none;
  bool operator==(const Transform&) const = default;
};

struct PlacedShape {
  Contour contour;
  Transform transform;
  bool operator==(const PlacedShape&) const = default;
};

struct BBox {
  double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  Point center() const { return {(min_x + max_x) * 0.5, (min_y + max_y) * 0.5}; }
};

/// Binary outline image: 255 background, 0 drawn.
struct Bitmap {
  static constexpr std::uint8_t background = 255;
  static constexpr std::uint8_t ink = 0;

  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  Bitmap() = default;
  Bitmap(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, background) {}

  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  bool operator==(const Bitmap&) const = default;
};

struct Pixel {
  int x = 0;
  int y = 0;
  auto operator<=>(const Pixel&) const = default;
};

/// A set of pixels, kept sorted by (x, y) with no duplicates.
struct PixelRegion {
  std::vector<Pixel> pixels;
  bool operator==(const PixelRegion&) const = default;
};

inline constexpr int kMinContourVertices = 8;
inline constexpr int kMaxContourVertices = 64;

/// Random simple closed polygon with exactly `complexity` vertices, roughly of
/// unit radius around the origin. Pure function of the rng state; throws
/// GenerationError when the rejection loop is exhausted.
Contour random_contour(Rng& rng, int complexity);

Point transform_point(Point p, const Transform& t);
Contour apply_transform(const Contour& contour, const Transform& t);

/// Transformed vertices of a placed shape.
std::vector<Point> placed_points(const PlacedShape& shape);

BBox bounding_box(std::span<const Point> points);
BBox bounding_box(const PlacedShape& shape);

/// Mean of the vertices.
Point vertex_centroid(std::span<const Point> points);

/// Brute-force O(n^2) check that no two non-adjacent edges touch and no two
/// consecutive vertices coincide.
bool is_simple(std::span<const Point> polygon);

/// Crossing-number (ray casting) parity test.
bool point_in_polygon(Point p, std::span<const Point> polygon);

/// Outline pixels of one shape: each edge is a 1-pixel integer line between
/// rounded endpoints. Translation is split into integer and fractional parts,
/// so integer translations shift the pixel set exactly. No bounds check.
PixelRegion outline_region(const PlacedShape& shape);

/// Draws every shape's outline. Throws OutOfCanvasError if a pixel falls
/// outside the canvas.
Bitmap rasterize(std::span<const PlacedShape> shapes, int width, int height);

/// True iff every transformed vertex of `inner` lies strictly inside `outer`.
bool contains(const PlacedShape& outer, const PlacedShape& inner);

/// Minimum distance between the two transformed closed polylines (0 if they
/// touch or cross).
double min_separation(const PlacedShape& a, const PlacedShape& b);

double segment_distance(Point a0, Point a1, Point b0, Point b1);

/// 8-connected components of ink pixels, ordered by their smallest pixel.
std::vector<PixelRegion> connected_components(const Bitmap& bitmap);

/// True iff some integer offset maps the pixel set of `a` exactly onto `b`.
bool equal_up_to_translation(const PixelRegion& a, const PixelRegion& b);

/// Pixel centers inside the polygon.
PixelRegion filled_region(std::span<const Point> polygon);

/// Intersection-over-union of two filled regions after aligning their
/// centroids to the nearest integer offset.
double centroid_aligned_iou(const PixelRegion& a, const PixelRegion& b);

/// Vertex-wise similarity: equal vertex count and, for some cyclic shift, the
/// polygons agree after removing translation and scale (and rotation when
/// allowed). Reflections are never allowed. `tolerance` is relative to the
/// RMS radius.
bool similar_polygons(std::span<const Point> a, std::span<const Point> b, bool allow_rotation,
                      double tolerance = 1e-6);

/// Polygon mirrored about the vertical (x -> 2c - x) or horizontal line through
/// its vertex centroid.
std::vector<Point> mirrored_about_centroid(std::span<const Point> polygon, Mirror mirror);

}  // namespace svrt::geometry
