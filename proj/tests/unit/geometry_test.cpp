#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "svrt/error.hpp"
#include "svrt/geometry.hpp"

using namespace svrt;
using namespace svrt::geometry;

namespace {

PlacedShape polygon(std::vector<Point> pts, Transform t = {}) { return {{std::move(pts), 0}, t}; }

PlacedShape square(double x0, double y0, double side) {
  return polygon({{x0, y0}, {x0 + side, y0}, {x0 + side, y0 + side}, {x0, y0 + side}});
}

std::set<std::pair<int, int>> ink(const Bitmap& b) {
  std::set<std::pair<int, int>> out;
  for (int y = 0; y < b.height; ++y)
    for (int x = 0; x < b.width; ++x)
      if (b.at(x, y) == Bitmap::ink) out.insert({x, y});
  return out;
}

// Andrew's monotone chain, counter-clockwise.
std::vector<Point> convex_hull(std::vector<Point> p) {
  std::sort(p.begin(), p.end(), [](Point a, Point b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  const auto cross = [](Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); };
  std::vector<Point> h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  h.resize(k - 1);
  return h;
}

// Independent inside test: winding number.
bool inside_by_winding(Point p, const std::vector<Point>& poly) {
  int wn = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point a = poly[i], b = poly[(i + 1) % poly.size()];
    const double side = (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y);
    if (a.y <= p.y) {
      if (b.y > p.y && side > 0) ++wn;
    } else if (b.y <= p.y && side < 0) {
      --wn;
    }
  }
  return wn != 0;
}

std::vector<Point> scaled_about(const std::vector<Point>& pts, Point c, double k) {
  std::vector<Point> out;
  for (const auto& p : pts) out.push_back({c.x + k * (p.x - c.x), c.y + k * (p.y - c.y)});
  return out;
}

// Dense sampling of both outlines.
double sampled_distance(const PlacedShape& a, const PlacedShape& b) {
  const auto pa = placed_points(a), pb = placed_points(b);
  const auto sample = [](const std::vector<Point>& poly) {
    std::vector<Point> out;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Point p = poly[i], q = poly[(i + 1) % poly.size()];
      for (int s = 0; s < 200; ++s) {
        const double t = s / 200.0;
        out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
      }
    }
    return out;
  };
  const auto sa = sample(pa), sb = sample(pb);
  double best = 1e300;
  for (const auto& p : sa)
    for (const auto& q : sb) best = std::min(best, std::hypot(p.x - q.x, p.y - q.y));
  return best;
}

// Exhaustive search over offsets: does some shift map a onto b?
bool translation_exists_brute_force(const PixelRegion& a, const PixelRegion& b) {
  if (a.pixels.size() != b.pixels.size()) return false;
  std::set<Pixel> target(b.pixels.begin(), b.pixels.end());
  for (int dx = -64; dx <= 64; ++dx)
    for (int dy = -64; dy <= 64; ++dy) {
      bool all = true;
      for (const auto& p : a.pixels)
        if (!target.count({p.x + dx, p.y + dy})) {
          all = false;
          break;
        }
      if (all) return true;
    }
  return false;
}

}  // namespace

TEST(Rasterize, AxisAlignedSquareHasFortyPixels) {
  const std::vector<PlacedShape> shapes{square(10, 10, 10)};
  const auto drawn = ink(rasterize(shapes, 32, 32));
  std::set<std::pair<int, int>> oracle;
  for (int t = 10; t <= 20; ++t) {
    oracle.insert({t, 10});
    oracle.insert({t, 20});
    oracle.insert({10, t});
    oracle.insert({20, t});
  }
  EXPECT_EQ(oracle.size(), 40u);
  EXPECT_EQ(drawn, oracle);
}

TEST(Rasterize, EmptyListGivesBlankCanvas) {
  const auto b = rasterize({}, 16, 12);
  EXPECT_EQ(b.width, 16);
  EXPECT_EQ(b.height, 12);
  EXPECT_TRUE(std::all_of(b.pixels.begin(), b.pixels.end(), [](auto v) { return v == Bitmap::background; }));
}

TEST(Rasterize, IntegerTranslationShiftsPixelsExactly) {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto c = random_contour(rng, 8 + trial % 20);
    const Transform t{20.3 + trial * 0.01, 21.7, 9.0 + trial % 5, 0.4 * trial, Mirror::none};
    Transform moved = t;
    moved.dx += 5;
    moved.dy += 3;
    const std::vector<PlacedShape> a{{c, t}}, b{{c, moved}};
    std::set<std::pair<int, int>> shifted;
    for (auto [x, y] : ink(rasterize(a, 64, 64))) shifted.insert({x + 5, y + 3});
    EXPECT_EQ(shifted, ink(rasterize(b, 64, 64)));
  }
}

TEST(Rasterize, OutOfCanvasThrows) {
  const std::vector<PlacedShape> shapes{square(-3, 5, 10)};
  EXPECT_THROW(rasterize(shapes, 32, 32), OutOfCanvasError);
}

TEST(Rasterize, PixelAlignedMirrorMatchesMirroredRaster) {
  Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const auto c = random_contour(rng, 12);
    const Transform plain{30, 31.5, 12, 0.0, Mirror::none};
    Transform flipped = plain;
    flipped.mirror = Mirror::vertical_axis;
    const auto r = outline_region(PlacedShape{c, plain});
    std::set<Pixel> expected;
    for (const auto& p : r.pixels) expected.insert({2 * 30 - p.x, p.y});
    const auto m = outline_region(PlacedShape{c, flipped});
    EXPECT_EQ(std::set<Pixel>(m.pixels.begin(), m.pixels.end()), expected);
  }
}

TEST(Transform, MirrorIsAnInvolution) {
  for (const auto mirror : {Mirror::vertical_axis, Mirror::horizontal_axis}) {
    const Transform t{0, 0, 1, 0, mirror};
    const Point p{0.3, -0.7};
    const Point q = transform_point(transform_point(p, t), t);
    EXPECT_DOUBLE_EQ(q.x, p.x);
    EXPECT_DOUBLE_EQ(q.y, p.y);
  }
}

TEST(RandomContour, SimpleDeterministicAndSized) {
  Rng a(3), b(3);
  for (int complexity : {8, 12, 30, 64}) {
    const auto c1 = random_contour(a, complexity);
    const auto c2 = random_contour(b, complexity);
    EXPECT_EQ(c1, c2);
    EXPECT_EQ(c1.points.size(), std::size_t(complexity));
    EXPECT_TRUE(is_simple(c1.points));
  }
  Rng r(5);
  for (int i = 0; i < 300; ++i) EXPECT_TRUE(is_simple(random_contour(r, 8 + i % 40).points));
}

TEST(RandomContour, RejectsComplexityOutsideRange) {
  Rng r(1);
  EXPECT_THROW(random_contour(r, 3), InvalidArgument);
  EXPECT_THROW(random_contour(r, 65), InvalidArgument);
}

TEST(IsSimple, DetectsBowTie) {
  EXPECT_FALSE(is_simple(std::vector<Point>{{0, 0}, {1, 1}, {1, 0}, {0, 1}}));
  EXPECT_TRUE(is_simple(std::vector<Point>{{0, 0}, {1, 0}, {1, 1}, {0, 1}}));
}

TEST(Contains, CenteredSmallSquareInsideLarge) {
  EXPECT_TRUE(contains(square(10, 10, 30), square(20, 20, 10)));
  EXPECT_FALSE(contains(square(20, 20, 10), square(10, 10, 30)));
}

TEST(Contains, DisjointShapesAreNotContained) {
  EXPECT_FALSE(contains(square(0, 0, 10), square(20, 20, 5)));
}

TEST(Contains, RandomNestedConvexConstructions) {
  Rng rng(21);
  for (int i = 0; i < 500; ++i) {
    const auto c = random_contour(rng, 8 + i % 30);
    const Transform t{32 + rng.uniform(-3, 3), 32 + rng.uniform(-3, 3), 10 + rng.uniform(0, 15), rng.uniform(0, 6.28)};
    const auto outer_pts = convex_hull(placed_points({c, t}));
    const Point centre = vertex_centroid(outer_pts);
    const auto inner_pts = scaled_about(outer_pts, centre, 0.4);
    for (const auto& p : inner_pts) ASSERT_TRUE(inside_by_winding(p, outer_pts));
    EXPECT_TRUE(contains(polygon(outer_pts), polygon(inner_pts)));
  }
}

TEST(Contains, TransitiveOnConvexChains) {
  Rng rng(22);
  for (int i = 0; i < 200; ++i) {
    const auto c = random_contour(rng, 16);
    const auto outer = convex_hull(placed_points({c, {32, 32, 20, 0}}));
    const Point centre = vertex_centroid(outer);
    const auto mid = scaled_about(outer, centre, 0.7);
    const auto inner = scaled_about(outer, centre, 0.3);
    ASSERT_TRUE(contains(polygon(outer), polygon(mid)));
    ASSERT_TRUE(contains(polygon(mid), polygon(inner)));
    EXPECT_TRUE(contains(polygon(outer), polygon(inner)));
  }
}

TEST(MinSeparation, IdenticalShapesAtZeroOffset) {
  Rng rng(4);
  const PlacedShape s{random_contour(rng, 10), {30, 30, 10, 0}};
  EXPECT_DOUBLE_EQ(min_separation(s, s), 0.0);
}

TEST(MinSeparation, SquaresTenApart) {
  EXPECT_DOUBLE_EQ(min_separation(square(0, 0, 1), square(11, 0, 1)), 10.0);
}

TEST(MinSeparation, MatchesDenseSampling) {
  Rng rng(8);
  for (int i = 0; i < 60; ++i) {
    const PlacedShape a{random_contour(rng, 10), {rng.uniform(10, 50), rng.uniform(10, 50), rng.uniform(4, 10), rng.uniform(0, 6)}};
    const PlacedShape b{random_contour(rng, 10), {rng.uniform(10, 50), rng.uniform(10, 50), rng.uniform(4, 10), rng.uniform(0, 6)}};
    const double exact = min_separation(a, b);
    const double sampled = sampled_distance(a, b);
    if (exact == 0.0) continue;  // crossing outlines: sampling only bounds from above
    EXPECT_NEAR(exact, sampled, 0.5);
    EXPECT_LE(exact, sampled + 1e-9);
  }
}

TEST(EqualUpToTranslation, ShiftedRegion) {
  Rng rng(5);
  const auto c = random_contour(rng, 14);
  const auto a = outline_region({c, {30, 30, 10, 0}});
  const auto b = outline_region({c, {37, 28, 10, 0}});
  EXPECT_TRUE(equal_up_to_translation(a, b));
  EXPECT_TRUE(equal_up_to_translation(a, a));
}

TEST(EqualUpToTranslation, SquareVersusTriangleOfEqualPixelCount) {
  bool found = false;
  for (int side = 4; side < 30 && !found; ++side) {
    const auto sq = outline_region(square(5, 5, side));
    for (int leg = 3; leg < 40 && !found; ++leg) {
      const auto tri = outline_region(polygon({{5, 5}, {5.0 + leg, 5}, {5, 5.0 + leg}}));
      if (tri.pixels.size() != sq.pixels.size()) continue;
      found = true;
      EXPECT_FALSE(translation_exists_brute_force(sq, tri));
      EXPECT_FALSE(equal_up_to_translation(sq, tri));
    }
  }
  EXPECT_TRUE(found);
}

TEST(EqualUpToTranslation, AsymmetricShapeVersusItsMirror) {
  Rng rng(12);
  int checked = 0;
  for (int i = 0; i < 20; ++i) {
    const auto c = random_contour(rng, 12);
    const auto a = outline_region({c, {30, 30, 12, 0}});
    const auto m = outline_region({c, {30, 30, 12, 0, Mirror::vertical_axis}});
    const bool brute = translation_exists_brute_force(a, m);
    EXPECT_EQ(equal_up_to_translation(a, m), brute);
    if (!brute) ++checked;
  }
  EXPECT_GT(checked, 15);
}

TEST(ConnectedComponents, SeparatesShapes) {
  const std::vector<PlacedShape> shapes{square(2, 2, 8), square(20, 20, 8)};
  const auto parts = connected_components(rasterize(shapes, 32, 32));
  ASSERT_EQ(parts.size(), 2u);
  EXPECT_EQ(parts[0].pixels.size(), 32u);
  EXPECT_TRUE(equal_up_to_translation(parts[0], parts[1]));
}

TEST(SimilarPolygons, ScaleRotationAndMirror) {
  Rng rng(31);
  const auto c = random_contour(rng, 12);
  const auto base = placed_points({c, {30, 30, 10, 0}});
  const auto bigger = placed_points({c, {10, 12, 17, 0}});
  const auto turned = placed_points({c, {40, 20, 8, 1.1}});
  const auto flipped = placed_points({c, {30, 30, 10, 0, Mirror::vertical_axis}});
  EXPECT_TRUE(similar_polygons(base, bigger, false));
  EXPECT_FALSE(similar_polygons(base, turned, false));
  EXPECT_TRUE(similar_polygons(base, turned, true));
  EXPECT_FALSE(similar_polygons(base, flipped, true));
  const auto other = placed_points({random_contour(rng, 12), {30, 30, 10, 0}});
  EXPECT_FALSE(similar_polygons(base, other, true));
}

TEST(CentroidAlignedIou, IdenticalIsOneDisjointShapesDiffer) {
  const auto a = filled_region(placed_points(square(5, 5, 10)));
  EXPECT_DOUBLE_EQ(centroid_aligned_iou(a, a), 1.0);
  const auto thin = filled_region(placed_points(polygon({{5, 5}, {25, 5}, {25, 8}, {5, 8}})));
  EXPECT_LT(centroid_aligned_iou(a, thin), 0.5);
}
