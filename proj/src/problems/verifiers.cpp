#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include "measures.hpp"
#include "svrt/error.hpp"
#include "svrt/problems.hpp"

// Label derivation from the placed geometry only. Nothing here reads the
// sampler's cue metadata.

namespace svrt::problems {
namespace {

using geometry::Mirror;
using geometry::PlacedShape;
using geometry::Point;
using measures::distance;
using Derived = std::optional<int>;

struct Context {
  const SceneSpec& scene;
  Tolerances tol;
  double k;
  std::span<const PlacedShape> shapes() const { return scene.shapes; }
  std::size_t count() const { return scene.shapes.size(); }
};

// Groups shapes whose outlines are pixel-identical up to translation.
// Returns a group index per shape.
std::vector<int> identity_groups(std::span<const PlacedShape> shapes) {
  std::vector<geometry::PixelRegion> regions;
  for (const auto& s : shapes) regions.push_back(geometry::outline_region(s));
  std::vector<int> group(shapes.size(), -1);
  int next = 0;
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    if (group[i] >= 0) continue;
    group[i] = next;
    for (std::size_t j = i + 1; j < shapes.size(); ++j)
      if (group[j] < 0 && geometry::equal_up_to_translation(regions[i], regions[j])) group[j] = next;
    ++next;
  }
  return group;
}

std::vector<int> group_sizes(const std::vector<int>& group) {
  std::vector<int> sizes;
  for (int g : group) {
    if (g >= static_cast<int>(sizes.size())) sizes.resize(g + 1, 0);
    ++sizes[g];
  }
  std::sort(sizes.begin(), sizes.end());
  return sizes;
}

std::vector<Point> pts(const PlacedShape& s) { return geometry::placed_points(s); }

bool same_shape(const PlacedShape& a, const PlacedShape& b, bool allow_rotation = false) {
  return geometry::similar_polygons(pts(a), pts(b), allow_rotation);
}

bool mirror_shape(const PlacedShape& a, const PlacedShape& b, Mirror axis) {
  const auto pa = pts(a);
  return geometry::similar_polygons(geometry::mirrored_about_centroid(pa, axis), pts(b), false);
}

// Index of the shape with the largest bounding-box side.
std::size_t largest(std::span<const PlacedShape> shapes) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < shapes.size(); ++i)
    if (measures::max_side(shapes[i]) > measures::max_side(shapes[best])) best = i;
  return best;
}

Derived by_threshold(double value, double equal_max, double differ_min) {
  if (value <= equal_max) return 0;
  if (value >= differ_min) return 1;
  return std::nullopt;
}

Derived derive_p1(const Context& c) {
  if (c.count() != 2) return std::nullopt;
  const auto g = identity_groups(c.shapes());
  return g[0] == g[1] ? 1 : 0;
}

Derived derive_nesting(const PlacedShape& outer, const PlacedShape& inner) {
  const double sep = geometry::min_separation(outer, inner);
  if (sep <= 0.0) return std::nullopt;
  return geometry::contains(outer, inner) ? 0 : 1;
}

Derived derive_p2(const Context& c) {
  if (c.count() != 2) return std::nullopt;
  const std::size_t big = largest(c.shapes());
  return derive_nesting(c.shapes()[big], c.shapes()[1 - big]);
}

Derived derive_p4(const Context& c) {
  if (c.count() != 2) return std::nullopt;
  const auto p = measures::centers(c.shapes());
  const double dx = std::abs(p[1].x - p[0].x), dy = std::abs(p[1].y - p[0].y);
  if (dx <= 3 * c.k && dy >= 16 * c.k) return 0;
  if (dy <= 3 * c.k && dx >= 16 * c.k) return 1;
  return std::nullopt;
}

Derived derive_p5(const Context& c) {
  if (c.count() != 4) return std::nullopt;
  const auto g = identity_groups(c.shapes());
  if (group_sizes(g) != std::vector<int>{2, 2}) return std::nullopt;
  const auto p = measures::centers(c.shapes());
  int twins = 0;
  for (int i = 0; i < 4; ++i) {
    std::array<std::pair<double, int>, 3> others{};
    int n = 0;
    for (int j = 0; j < 4; ++j)
      if (j != i) others[n++] = {distance(p[i], p[j]), j};
    std::sort(others.begin(), others.end());
    if (others[0].first > others[1].first - c.tol.separation) return std::nullopt;
    if (g[others[0].second] == g[i]) ++twins;
  }
  if (twins == 4) return 0;
  if (twins == 0) return 1;
  return std::nullopt;
}

Derived derive_p6(const Context& c) {
  if (c.count() != 4) return std::nullopt;
  const auto g = identity_groups(c.shapes());
  if (group_sizes(g) != std::vector<int>{2, 2}) return std::nullopt;
  const auto p = measures::centers(c.shapes());
  std::array<double, 2> d{};
  for (int grp = 0; grp < 2; ++grp) {
    std::vector<Point> members;
    for (int i = 0; i < 4; ++i)
      if (g[i] == grp) members.push_back(p[i]);
    d[grp] = distance(members[0], members[1]);
  }
  return by_threshold(std::abs(d[0] - d[1]), c.tol.equality, c.tol.separation);
}

Derived derive_p7(const Context& c) {
  if (c.count() != 6) return std::nullopt;
  const auto sizes = group_sizes(identity_groups(c.shapes()));
  if (sizes == std::vector<int>{2, 2, 2}) return 0;
  if (sizes == std::vector<int>{3, 3}) return 1;
  return std::nullopt;
}

Derived derive_p8(const Context& c) {
  if (c.count() != 2) return std::nullopt;
  const std::size_t bi = largest(c.shapes());
  const PlacedShape& big = c.shapes()[bi];
  const PlacedShape& small = c.shapes()[1 - bi];
  if (geometry::min_separation(big, small) <= 0.0) return std::nullopt;
  const bool nested = geometry::contains(big, small);
  const bool same = same_shape(big, small);
  const double ratio = measures::max_side(big) / measures::max_side(small);
  const bool equal_scale = std::abs(ratio - 1.0) < 1e-6;
  if (nested && same && !equal_scale) return 0;
  if (nested && !same) return 1;
  if (!nested && same && equal_scale) return 1;
  return std::nullopt;
}

Derived derive_p9(const Context& c) {
  if (c.count() != 2) return std::nullopt;
  const std::size_t bi = largest(c.shapes());
  const PlacedShape& big = c.shapes()[bi];
  const PlacedShape& small = c.shapes()[1 - bi];
  if (measures::max_side(big) < 1.5 * measures::max_side(small) - 1e-6) return std::nullopt;
  const double dy = geometry::bounding_box(small).center().y - geometry::bounding_box(big).center().y;
  if (dy >= c.tol.separation) return 0;
  if (dy <= -c.tol.separation) return 1;
  return std::nullopt;
}

Derived derive_p10(const Context& c) {
  if (c.count() != 4) return std::nullopt;
  return by_threshold(measures::square_deviation(measures::centers(c.shapes())), c.tol.equality, c.tol.separation);
}

Derived derive_p12(const Context& c) {
  if (c.count() != 3) return std::nullopt;
  const std::size_t li = largest(c.shapes());
  const auto p = measures::centers(c.shapes());
  std::vector<Point> smalls;
  for (std::size_t i = 0; i < 3; ++i) {
    if (i == li) continue;
    if (measures::max_side(c.shapes()[i]) * 1.25 > measures::max_side(c.shapes()[li])) return std::nullopt;
    smalls.push_back(p[i]);
  }
  const double over = measures::projection_overshoot(p[li], smalls[0], smalls[1]);
  if (over <= -c.tol.equality) return 0;
  if (over >= c.tol.separation) return 1;
  return std::nullopt;
}

Derived derive_p14(const Context& c) {
  if (c.count() != 3) return std::nullopt;
  return by_threshold(measures::collinearity_deviation(measures::centers(c.shapes())), c.tol.collinearity,
                      c.tol.separation);
}

Derived derive_p15(const Context& c) {
  if (c.count() != 4) return std::nullopt;
  const auto sizes = group_sizes(identity_groups(c.shapes()));
  if (sizes == std::vector<int>{4}) return 0;
  if (sizes == std::vector<int>{1, 1, 1, 1}) return 1;
  return std::nullopt;
}

Derived derive_p16(const Context& c) {
  if (c.count() != 2) return std::nullopt;
  const auto p = measures::centers(c.shapes());
  const std::size_t li = p[0].x < p[1].x ? 0 : 1;
  const PlacedShape& left = c.shapes()[li];
  const PlacedShape& right = c.shapes()[1 - li];
  const double axis = (c.scene.canvas - 1) / 2.0;
  if (geometry::bounding_box(left).max_x >= axis || geometry::bounding_box(right).min_x <= axis) return std::nullopt;
  if (same_shape(left, right)) return 0;
  if (mirror_shape(left, right, Mirror::vertical_axis)) return 1;
  return std::nullopt;
}

Derived derive_p17(const Context& c) {
  if (c.count() != 4) return std::nullopt;
  const auto g = identity_groups(c.shapes());
  if (group_sizes(g) != std::vector<int>{1, 3}) return std::nullopt;
  const auto p = measures::centers(c.shapes());
  const auto sizes_by_group = [&](int grp) { return std::count(g.begin(), g.end(), grp); };
  const int triple = sizes_by_group(0) == 3 ? 0 : 1;
  std::vector<Point> members;
  for (int i = 0; i < 4; ++i)
    if (g[i] == triple) members.push_back(p[i]);
  return by_threshold(measures::triangle_spread(members), c.tol.equality, c.tol.separation);
}

Derived derive_p18(const Context& c) {
  if (c.count() != 6) return std::nullopt;
  const auto p = measures::centers(c.shapes());
  const double r = c.scene.canvas / 8.0;
  bool spread = true;
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j)
      if (distance(p[i], p[j]) <= r || distance(p[i], p[j]) >= 3 * r) spread = false;
  if (spread) return 1;
  // Every split into two triples that contains shape 0 in the first one.
  for (int a = 1; a < 6; ++a) {
    for (int b = a + 1; b < 6; ++b) {
      std::vector<Point> g0{p[0], p[a], p[b]}, g1;
      for (int i = 1; i < 6; ++i)
        if (i != a && i != b) g1.push_back(p[i]);
      const Point m0 = geometry::vertex_centroid(g0), m1 = geometry::vertex_centroid(g1);
      bool tight = distance(m0, m1) >= 3 * r;
      for (int i = 0; i < 3 && tight; ++i) tight = distance(g0[i], m0) <= r && distance(g1[i], m1) <= r;
      if (tight) return 0;
    }
  }
  return std::nullopt;
}

Derived derive_p19(const Context& c) {
  if (c.count() != 2) return std::nullopt;
  const std::size_t bi = largest(c.shapes());
  const double ratio = measures::max_side(c.shapes()[bi]) / measures::max_side(c.shapes()[1 - bi]);
  if (ratio < 1.5 - 1e-6 || ratio > 2.5 + 1e-6) return std::nullopt;
  return same_shape(c.shapes()[0], c.shapes()[1]) ? 0 : 1;
}

Derived derive_p20(const Context& c) {
  if (c.count() != 2) return std::nullopt;
  if (same_shape(c.shapes()[0], c.shapes()[1])) return 0;
  if (mirror_shape(c.shapes()[0], c.shapes()[1], Mirror::horizontal_axis)) return 1;
  return std::nullopt;
}

Derived derive_p21(const Context& c) {
  if (c.count() != 2) return std::nullopt;
  return same_shape(c.shapes()[0], c.shapes()[1], true) ? 0 : 1;
}

Derived derive_p22(const Context& c) {
  if (c.count() != 3) return std::nullopt;
  const auto sizes = group_sizes(identity_groups(c.shapes()));
  if (sizes == std::vector<int>{3}) return 0;
  if (sizes == std::vector<int>{1, 2}) return 1;
  return std::nullopt;
}

Derived derive_p23(const Context& c) {
  if (c.count() != 3) return std::nullopt;
  std::array<std::size_t, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return measures::max_side(c.shapes()[a]) < measures::max_side(c.shapes()[b]);
  });
  const PlacedShape& small = c.shapes()[order[0]];
  const PlacedShape& l1 = c.shapes()[order[1]];
  const PlacedShape& l2 = c.shapes()[order[2]];
  if (geometry::min_separation(l1, l2) <= 0.0 || geometry::contains(l1, l2) || geometry::contains(l2, l1))
    return std::nullopt;
  if (geometry::min_separation(small, l1) <= 0.0 || geometry::min_separation(small, l2) <= 0.0) return std::nullopt;
  if (geometry::contains(l1, small) || geometry::contains(l2, small)) return 0;
  return 1;
}

Derived derive(const Context& c) {
  switch (c.scene.problem.value()) {
    case 1: return derive_p1(c);
    case 2: return derive_p2(c);
    case 4: return derive_p4(c);
    case 5: return derive_p5(c);
    case 6: return derive_p6(c);
    case 7: return derive_p7(c);
    case 8: return derive_p8(c);
    case 9: return derive_p9(c);
    case 10: return derive_p10(c);
    case 12: return derive_p12(c);
    case 14: return derive_p14(c);
    case 15: return derive_p15(c);
    case 16: return derive_p16(c);
    case 17: return derive_p17(c);
    case 18: return derive_p18(c);
    case 19: return derive_p19(c);
    case 20: return derive_p20(c);
    case 21: return derive_p21(c);
    case 22: return derive_p22(c);
    case 23: return derive_p23(c);
  }
  return std::nullopt;
}

}  // namespace

bool verify_scene(const SceneSpec& scene) {
  if (scene.variant.kind == VariantKind::Kind::identical_control || scene.variant.kind == VariantKind::Kind::null)
    throw InvalidArgument("verify_scene: the " + scene.variant.name() + " variant has no class rule to verify");
  const double k = scene.canvas / 64.0;
  const Context c{scene, Tolerances{}.scaled(k), k};
  const Derived label = derive(c);
  return label.has_value() && *label == scene.label.value();
}

}  // namespace svrt::problems
