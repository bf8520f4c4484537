#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>

#include "measures.hpp"
#include "svrt/error.hpp"
#include "svrt/problems.hpp"

namespace svrt::problems {
namespace {

using geometry::Contour;
using geometry::Mirror;
using geometry::PlacedShape;
using geometry::Point;
using measures::distance;

constexpr int kSceneAttempts = 4000;
constexpr int kPlacementTries = 60;
constexpr int kInnerTries = 200;
constexpr double kMaxDifferentIou = 0.7;
constexpr double kIouReferenceSize = 24.0;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

Point direction(double angle) { return {std::cos(angle), std::sin(angle)}; }
Point add(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
Point scaled(Point a, double s) { return {a.x * s, a.y * s}; }

// One sampling attempt's state. All lengths passed to size()/px() are pixels
// at a 64 px canvas.
class SceneBuilder {
 public:
  SceneBuilder(const ProblemSpec& spec, int geometric_label, Rng& rng, int canvas)
      : rng(rng),
        label(geometric_label),
        canvas(canvas),
        k(canvas / 64.0),
        tol(spec.tolerances.scaled(canvas / 64.0)),
        gap(min_shape_gap(canvas)),
        min_side(min_shape_side(canvas)),
        control(spec.variant.kind == VariantKind::Kind::identical_control) {
    const double margin = canvas_margin(canvas);
    lo = margin;
    hi = canvas - 1 - margin;
    if (spec.variant.kind == VariantKind::Kind::leak) {
      if (spec.variant.leak == LeakKind::size_bias && label == 1) size_mult = spec.variant.magnitude;
      if (spec.variant.leak == LeakKind::position_bias) {
        shift = std::round(spec.variant.magnitude * k);
        lo += shift;
      }
    }
  }

  Rng& rng;
  int label;
  int canvas;
  double k;
  Tolerances tol;
  double gap;
  double min_side;
  bool control;
  double lo = 0.0, hi = 0.0;
  double size_mult = 1.0;
  double shift = 0.0;
  std::vector<PlacedShape> shapes;
  CueMetadata cue;
  std::string failure;

  double px(double v) const { return v * k; }
  double size(double base) const { return base * k * size_mult; }
  double uniform(double a, double b) { return rng.uniform(a, b); }
  double angle() { return rng.uniform(0.0, kTwoPi); }

  bool reject(std::string why) {
    failure = std::move(why);
    return false;
  }

  // Contour whose aspect ratio leaves the short side >= min_side at `base` size.
  Contour contour(double base) {
    if (control && shared_) return *shared_;
    const double need = min_side / (base * k) + 0.02;
    Contour c;
    for (int i = 0; i < 200; ++i) {
      c = geometry::random_contour(rng, static_cast<int>(rng.uniform_int(8, 16)));
      const auto box = geometry::bounding_box(c.points);
      if (std::min(box.width(), box.height()) / std::max(box.width(), box.height()) >= need) break;
    }
    if (control) shared_ = c;
    return c;
  }

  // Contour that is visibly different from every contour in `others`.
  Contour different(const std::vector<Contour>& others, double base) {
    if (control) return contour(base);
    std::vector<geometry::PixelRegion> masks;
    for (const auto& o : others) masks.push_back(reference_mask(o));
    for (int i = 0; i < 100; ++i) {
      Contour c = contour(base);
      const auto mask = reference_mask(c);
      bool ok = true;
      for (const auto& m : masks)
        if (geometry::centroid_aligned_iou(mask, m) > kMaxDifferentIou) ok = false;
      if (ok) return c;
    }
    throw GenerationError("could not draw a contour different from its siblings");
  }

  // Scale so that the longer bounding-box side equals size_px, center at
  // `center` rounded to an integer translation.
  PlacedShape place(const Contour& c, double size_px, Point center, Mirror mirror = Mirror::none,
                    double rotate = 0.0) const {
    geometry::Transform t;
    t.mirror = mirror;
    t.rotate = rotate;
    const auto box = geometry::bounding_box(geometry::apply_transform(c, t).points);
    t.scale = size_px / std::max(box.width(), box.height());
    const Point bc = box.center();
    t.dx = std::round(center.x - bc.x * t.scale);
    t.dy = std::round(center.y - bc.y * t.scale);
    return {c, t};
  }

  // Exact pixel copy moved to approximately `center`.
  PlacedShape copy_to(const PlacedShape& s, Point center) const {
    const Point c = geometry::bounding_box(s).center();
    PlacedShape out = s;
    out.transform.dx += std::round(center.x - c.x);
    out.transform.dy += std::round(center.y - c.y);
    return out;
  }

  bool fits(const PlacedShape& s) const {
    const auto box = geometry::bounding_box(s);
    return box.min_x >= lo && box.min_y >= lo && box.max_x <= hi && box.max_y <= hi &&
           std::min(box.width(), box.height()) >= min_side - 1e-9;
  }

  bool clear_of(const PlacedShape& s, std::span<const PlacedShape> others) const {
    for (const auto& o : others)
      if (geometry::min_separation(s, o) < gap) return false;
    return true;
  }

  bool fits_clear(const PlacedShape& s, std::span<const PlacedShape> others) const {
    return fits(s) && clear_of(s, others);
  }

  Point random_point() { return {uniform(lo, hi), uniform(lo, hi)}; }

  // Uniform point at least `inset` away from the placement limits.
  Point random_point(double inset) {
    if (lo + inset >= hi - inset) return {(lo + hi) / 2, (lo + hi) / 2};
    return {uniform(lo + inset, hi - inset), uniform(lo + inset, hi - inset)};
  }

  std::optional<PlacedShape> place_random(const Contour& c, double size_px, std::span<const PlacedShape> others,
                                          Mirror mirror = Mirror::none, double rotate = 0.0,
                                          const std::function<bool(const PlacedShape&)>& extra = {}) {
    const double half = size_px / 2.0;
    if (lo + half > hi - half) return std::nullopt;
    for (int i = 0; i < kPlacementTries; ++i) {
      const Point center{uniform(lo + half, hi - half), uniform(lo + half, hi - half)};
      PlacedShape s = place(c, size_px, center, mirror, rotate);
      if (fits_clear(s, others) && (!extra || extra(s))) return s;
    }
    return std::nullopt;
  }

  // Placement of `inner` strictly inside `outer` with the standard gap.
  std::optional<PlacedShape> place_inside(const PlacedShape& outer, const Contour& inner, double size_px) {
    const auto box = geometry::bounding_box(outer);
    for (int i = 0; i < kInnerTries; ++i) {
      const Point center{uniform(box.min_x, box.max_x), uniform(box.min_y, box.max_y)};
      PlacedShape s = place(inner, size_px, center);
      if (fits(s) && geometry::contains(outer, s) && geometry::min_separation(outer, s) >= gap) return s;
    }
    return std::nullopt;
  }

  // Places shapes at the given centers (all with the same rotation/mirror).
  bool place_at(const std::vector<Contour>& contours, double size_px, const std::vector<Point>& where) {
    for (std::size_t i = 0; i < contours.size(); ++i) {
      PlacedShape s = place(contours[i], size_px, where[i]);
      if (!fits_clear(s, shapes)) return reject("shape " + std::to_string(i) + " does not fit at its position");
      shapes.push_back(std::move(s));
    }
    return true;
  }

  bool place_all_random(const std::vector<Contour>& contours, double size_px) {
    for (std::size_t i = 0; i < contours.size(); ++i) {
      auto s = place_random(contours[i], size_px, shapes);
      if (!s) return reject("no room for shape " + std::to_string(i));
      shapes.push_back(std::move(*s));
    }
    return true;
  }

  std::vector<Point> realized_centers() const { return measures::centers(shapes); }

 private:
  geometry::PixelRegion reference_mask(const Contour& c) const {
    const PlacedShape s = place(c, kIouReferenceSize, {0.0, 0.0});
    return geometry::filled_region(geometry::placed_points(s));
  }

  std::optional<Contour> shared_;
};

// -- problem samplers: one attempt each ------------------------------------

bool sample_p1(SceneBuilder& b) {
  const double s = b.size(16);
  const Contour a = b.contour(16);
  const Contour c = b.label == 1 ? a : b.different({a}, 16);
  if (!b.place_all_random({a, c}, s)) return false;
  b.cue.source = {0, b.label == 1 ? 0 : 1};
  b.cue.relation = b.label == 1 ? "identical" : "different";
  return true;
}

bool sample_p2(SceneBuilder& b) {
  const Contour big = b.contour(40);
  const Contour small = b.contour(12);
  auto outer = b.place_random(big, b.size(40), {});
  if (!outer) return b.reject("p2: large shape does not fit");
  // Both classes condition on the large shape having room inside.
  auto inner = b.place_inside(*outer, small, b.size(12));
  if (!inner) return b.reject("p2: no room inside the large shape");
  b.shapes.push_back(*outer);
  if (b.label == 0) {
    b.shapes.push_back(*inner);
  } else {
    const PlacedShape o = *outer;
    auto out = b.place_random(small, b.size(12), b.shapes, Mirror::none, 0.0,
                              [&](const PlacedShape& s) { return !geometry::contains(o, s); });
    if (!out) return b.reject("p2: no room outside the large shape");
    b.shapes.push_back(*out);
  }
  b.cue.source = {0, 1};
  b.cue.relation = b.label == 0 ? "inside" : "outside";
  return true;
}

bool sample_p4(SceneBuilder& b) {
  const double s = b.size(14);
  const Contour a = b.contour(14);
  const Contour c = b.contour(14);
  const double along = b.px(b.uniform(18, 40)) * (b.rng.coin() ? 1.0 : -1.0);
  const double across = b.px(b.uniform(-2, 2));
  const Point delta = b.label == 0 ? Point{across, along} : Point{along, across};
  auto first = b.place_random(a, s, {});
  if (!first) return b.reject("p4: first shape does not fit");
  const Point c0 = geometry::bounding_box(*first).center();
  b.shapes.push_back(*first);
  if (!b.place_at({c}, s, {add(c0, delta)})) return b.reject("p4: second shape does not fit");
  const auto cs = b.realized_centers();
  double dx = std::abs(cs[1].x - cs[0].x), dy = std::abs(cs[1].y - cs[0].y);
  if (b.label == 1) std::swap(dx, dy);
  if (dx > b.px(3) || dy < b.px(16)) return b.reject("p4: alignment margin");
  b.cue.measures = {{"dx", cs[1].x - cs[0].x}, {"dy", cs[1].y - cs[0].y}};
  b.cue.relation = b.label == 0 ? "vertical" : "horizontal";
  return true;
}

bool sample_p5(SceneBuilder& b) {
  const double s = b.size(12);
  const Contour A = b.contour(12);
  const Contour B = b.different({A}, 12);
  std::vector<Point> where;
  for (int cluster = 0; cluster < 2; ++cluster) {
    const Point c = b.random_point();
    const double d = b.px(b.uniform(15, 20));
    const Point u = direction(b.angle());
    where.push_back(add(c, scaled(u, d / 2)));
    where.push_back(add(c, scaled(u, -d / 2)));
  }
  std::vector<int> src;
  if (b.label == 0) {
    src = {0, 0, 1, 1};
  } else {
    src = {0, 1, 0, 1};
    if (b.rng.coin()) std::swap(src[0], src[1]);
    if (b.rng.coin()) std::swap(src[2], src[3]);
  }
  std::vector<Contour> cs;
  for (int i : src) cs.push_back(i == 0 ? A : B);
  if (!b.place_at(cs, s, where)) return false;
  const auto p = b.realized_centers();
  for (int i = 0; i < 4; ++i) {
    const int mate = i ^ 1;
    for (int j = 0; j < 4; ++j)
      if (j != i && j != mate && distance(p[i], p[mate]) > distance(p[i], p[j]) - b.tol.separation)
        return b.reject("p5: nearest-neighbour margin");
  }
  b.cue.source = src;
  b.cue.relation = b.label == 0 ? "nearest is twin" : "nearest is non-twin";
  return true;
}

bool sample_p6(SceneBuilder& b) {
  const double s = b.size(12);
  const Contour A = b.contour(12);
  const Contour B = b.different({A}, 12);
  const double da = b.px(b.uniform(16, 34));
  double db = da;
  if (b.label == 1) db = da + (b.rng.coin() ? 1.0 : -1.0) * b.px(b.uniform(10, 20));
  if (db < b.px(16) || db > b.px(44)) return b.reject("p6: pair distance out of range");
  std::vector<Point> where;
  for (double d : {da, db}) {
    const Point c = b.random_point();
    const Point u = direction(b.angle());
    where.push_back(add(c, scaled(u, d / 2)));
    where.push_back(add(c, scaled(u, -d / 2)));
  }
  if (!b.place_at({A, A, B, B}, s, where)) return false;
  const auto p = b.realized_centers();
  const double ra = distance(p[0], p[1]), rb = distance(p[2], p[3]);
  const double diff = std::abs(ra - rb);
  if (b.label == 0 ? diff > b.tol.equality : diff < b.tol.separation) return b.reject("p6: distance margin");
  b.cue.source = {0, 0, 1, 1};
  b.cue.measures = {{"pair_distance_0", ra}, {"pair_distance_1", rb}};
  return true;
}

bool sample_p7(SceneBuilder& b) {
  const Contour A = b.contour(12);
  const Contour B = b.different({A}, 12);
  std::vector<int> src;
  std::vector<Contour> pool{A, B};
  if (b.label == 0) {
    pool.push_back(b.different({A, B}, 12));
    src = {0, 0, 1, 1, 2, 2};
  } else {
    src = {0, 0, 0, 1, 1, 1};
  }
  std::vector<Contour> cs;
  for (int i : src) cs.push_back(pool[i]);
  if (!b.place_all_random(cs, b.size(12))) return false;
  b.cue.source = src;
  b.cue.relation = b.label == 0 ? "three pairs" : "two triplets";
  return true;
}

bool sample_p8(SceneBuilder& b) {
  const Contour A = b.contour(12);
  const bool separate_copies = b.label == 1 && b.rng.coin();
  if (separate_copies) {
    if (!b.place_all_random({A, A}, b.size(12))) return false;
    b.cue.source = {0, 0};
    b.cue.relation = "identical, not nested";
    return true;
  }
  const Contour big = b.label == 0 ? A : b.different({A}, 40);
  auto outer = b.place_random(big, b.size(40), {});
  if (!outer) return b.reject("p8: large shape does not fit");
  auto inner = b.place_inside(*outer, A, b.size(12));
  if (!inner) return b.reject("p8: no room inside the large shape");
  b.shapes = {*outer, *inner};
  b.cue.source = {b.label == 0 ? 0 : 1, 0};
  b.cue.relation = b.label == 0 ? "nested in bigger copy" : "nested in different shape";
  return true;
}

bool sample_p9(SceneBuilder& b) {
  const double small_base = b.uniform(12, 14);
  const double large_base = small_base * b.uniform(1.5, 2.0);
  const Contour A = b.contour(small_base);
  const Contour B = b.contour(large_base);
  Point p = b.random_point(), q = b.random_point();
  if (p.y > q.y) std::swap(p, q);  // p is the upper slot
  const Point large_at = b.label == 0 ? p : q;
  const Point small_at = b.label == 0 ? q : p;
  PlacedShape large = b.place(B, b.size(large_base), large_at);
  PlacedShape small = b.place(A, b.size(small_base), small_at);
  if (!b.fits(large) || !b.fits_clear(small, std::span(&large, 1))) return b.reject("p9: shapes do not fit");
  const double dy = geometry::bounding_box(small).center().y - geometry::bounding_box(large).center().y;
  if (b.label == 0 ? dy < b.tol.separation : dy > -b.tol.separation) return b.reject("p9: vertical margin");
  b.shapes = {large, small};
  b.cue.source = {1, 0};
  b.cue.measures = {{"ratio", large_base / small_base}, {"dy", dy}};
  b.cue.relation = b.label == 0 ? "larger above" : "larger below";
  return true;
}

bool sample_p10(SceneBuilder& b) {
  std::vector<Contour> cs;
  for (int i = 0; i < 4; ++i) cs.push_back(b.contour(12));
  std::vector<Point> where;
  if (b.label == 0) {
    const double side = b.px(b.uniform(22, 34));
    const Point c = b.random_point();
    const double a0 = b.angle();
    for (int i = 0; i < 4; ++i)
      where.push_back(add(c, scaled(direction(a0 + i * std::numbers::pi / 2), side / std::numbers::sqrt2)));
  } else {
    for (int i = 0; i < 4; ++i) where.push_back(b.random_point());
  }
  if (!b.place_at(cs, b.size(12), where)) return false;
  const double dev = measures::square_deviation(b.realized_centers());
  if (b.label == 0 ? dev > b.tol.equality : dev < b.tol.separation) return b.reject("p10: square deviation margin");
  b.cue.source = {0, 1, 2, 3};
  b.cue.measures = {{"square_deviation", dev}};
  return true;
}

bool sample_p12(SceneBuilder& b) {
  const Contour A = b.contour(12), B = b.contour(12), C = b.contour(22);
  if (!b.place_all_random({A, B}, b.size(12))) return false;
  auto large = b.place_random(C, b.size(22), b.shapes);
  if (!large) return b.reject("p12: no room for the large shape");
  b.shapes.push_back(*large);
  const auto p = b.realized_centers();
  if (distance(p[0], p[1]) < b.px(16)) return b.reject("p12: small shapes too close");
  const double over = measures::projection_overshoot(p[2], p[0], p[1]);
  if (b.label == 0 ? over > -b.tol.equality : over < b.tol.separation) return b.reject("p12: projection margin");
  b.cue.source = {0, 1, 2};
  b.cue.measures = {{"overshoot", over}};
  b.cue.relation = b.label == 0 ? "large between" : "large outside";
  return true;
}

bool sample_p14(SceneBuilder& b) {
  std::vector<Contour> cs{b.contour(12), b.contour(12), b.contour(12)};
  std::vector<Point> where;
  if (b.label == 0) {
    const Point c = b.random_point();
    const Point u = direction(b.angle());
    const double t2 = b.px(b.uniform(16, 24));
    const double t3 = t2 + b.px(b.uniform(16, 24));
    for (double t : {0.0, t2, t3}) where.push_back(add(c, scaled(u, t - t3 / 2)));
  } else {
    for (int i = 0; i < 3; ++i) where.push_back(b.random_point());
  }
  if (!b.place_at(cs, b.size(12), where)) return false;
  const double dev = measures::collinearity_deviation(b.realized_centers());
  if (b.label == 0 ? dev > b.tol.collinearity : dev < b.tol.separation)
    return b.reject("p14: collinearity margin");
  b.cue.source = {0, 1, 2};
  b.cue.measures = {{"collinearity_deviation", dev}};
  return true;
}

bool sample_p15(SceneBuilder& b) {
  const Contour A = b.contour(12);
  std::vector<Contour> cs{A};
  std::vector<int> src{0, 0, 0, 0};
  if (b.label == 1) {
    for (int i = 1; i < 4; ++i) cs.push_back(b.different(cs, 12));
    src = {0, 1, 2, 3};
  } else {
    cs = {A, A, A, A};
  }
  if (!b.place_all_random(cs, b.size(12))) return false;
  b.cue.source = src;
  return true;
}

bool sample_p16(SceneBuilder& b) {
  const double s = b.size(16);
  const Contour A = b.contour(16);
  const double axis = (b.canvas - 1) / 2.0;
  const Point left_at{b.uniform(b.lo + s / 2, axis - b.gap / 2 - s / 2), b.uniform(b.lo + s / 2, b.hi - s / 2)};
  const PlacedShape left = b.place(A, s, left_at);
  const auto lbox = geometry::bounding_box(left);
  PlacedShape right = left;
  if (b.label == 0) {
    right.transform.dx += std::round(2.0 * (axis - lbox.center().x));
  } else {
    // Pixel-exact mirror image about the canvas midline.
    right.transform.mirror = Mirror::vertical_axis;
    right.transform.dx = 2.0 * axis - left.transform.dx;
  }
  const auto rbox = geometry::bounding_box(right);
  if (!b.fits(left) || !b.fits(right)) return b.reject("p16: shapes do not fit");
  if (lbox.max_x > axis - b.gap / 2 || rbox.min_x < axis + b.gap / 2) return b.reject("p16: shape crosses midline");
  b.shapes = {left, right};
  b.cue.source = {0, 0};
  b.cue.relation = b.label == 0 ? "copy" : "mirrored";
  return true;
}

bool sample_p17(SceneBuilder& b) {
  const Contour A = b.contour(12);
  const Contour B = b.different({A}, 12);
  std::vector<Point> where;
  if (b.label == 0) {
    const double side = b.px(b.uniform(20, 32));
    const Point c = b.random_point();
    const double a0 = b.angle();
    for (int i = 0; i < 3; ++i) where.push_back(add(c, scaled(direction(a0 + i * kTwoPi / 3), side / std::sqrt(3.0))));
  } else {
    for (int i = 0; i < 3; ++i) where.push_back(b.random_point());
  }
  if (!b.place_at({A, A, A}, b.size(12), where)) return false;
  const double spread = measures::triangle_spread(b.realized_centers());
  if (b.label == 0 ? spread > b.tol.equality : spread < b.tol.separation) return b.reject("p17: distance margin");
  auto odd = b.place_random(B, b.size(12), b.shapes);
  if (!odd) return b.reject("p17: no room for the odd shape");
  b.shapes.push_back(*odd);
  b.cue.source = {0, 0, 0, 1};
  b.cue.measures = {{"spread", spread}};
  return true;
}

bool sample_p18(SceneBuilder& b) {
  std::vector<Contour> cs;
  for (int i = 0; i < 6; ++i) cs.push_back(b.contour(11));
  const double r = b.canvas / 8.0;
  std::vector<Point> where;
  if (b.label == 0) {
    const double inset = b.px(7.5) + b.size(11) / 2;
    const Point c1 = b.random_point(inset), c2 = b.random_point(inset);
    if (distance(c1, c2) < 3 * r + b.px(3)) return b.reject("p18: clusters too close");
    for (Point c : {c1, c2}) {
      const double rad = b.px(b.uniform(6.5, 7.5));
      const double a0 = b.angle();
      for (int i = 0; i < 3; ++i) where.push_back(add(c, scaled(direction(a0 + i * kTwoPi / 3), rad)));
    }
  } else {
    const double rad = b.px(b.uniform(11.5, 12.3));
    const Point c = b.random_point(rad + b.size(11) / 2);
    const double a0 = b.angle();
    where.push_back(c);
    for (int i = 0; i < 5; ++i) where.push_back(add(c, scaled(direction(a0 + i * kTwoPi / 5), rad)));
  }
  if (!b.place_at(cs, b.size(11), where)) return false;
  const auto p = b.realized_centers();
  if (b.label == 0) {
    for (int g = 0; g < 2; ++g) {
      const Point m = geometry::vertex_centroid(std::span(p).subspan(3 * g, 3));
      for (int i = 0; i < 3; ++i)
        if (distance(p[3 * g + i], m) > r) return b.reject("p18: cluster radius");
    }
    const Point m0 = geometry::vertex_centroid(std::span(p).subspan(0, 3));
    const Point m1 = geometry::vertex_centroid(std::span(p).subspan(3, 3));
    if (distance(m0, m1) < 3 * r) return b.reject("p18: cluster distance");
  } else {
    for (int i = 0; i < 6; ++i)
      for (int j = i + 1; j < 6; ++j)
        if (distance(p[i], p[j]) <= r || distance(p[i], p[j]) >= 3 * r) return b.reject("p18: spread distances");
  }
  b.cue.source = {0, 1, 2, 3, 4, 5};
  b.cue.relation = b.label == 0 ? "two clusters" : "one group";
  return true;
}

bool sample_p19(SceneBuilder& b) {
  const double small_base = b.uniform(12, 14);
  const double ratio = b.uniform(1.5, 2.5);
  const Contour A = b.contour(small_base);
  const Contour B = b.label == 0 ? A : b.different({A}, small_base * ratio);
  auto large = b.place_random(B, b.size(small_base * ratio), {});
  if (!large) return b.reject("p19: large shape does not fit");
  b.shapes.push_back(*large);
  auto small = b.place_random(A, b.size(small_base), b.shapes);
  if (!small) return b.reject("p19: no room for the small shape");
  b.shapes.push_back(*small);
  b.cue.source = {b.label == 0 ? 0 : 1, 0};
  b.cue.measures = {{"ratio", ratio}};
  return true;
}

bool sample_p20(SceneBuilder& b) {
  const double s = b.size(16);
  const Contour A = b.contour(16);
  auto first = b.place_random(A, s, {});
  if (!first) return b.reject("p20: first shape does not fit");
  b.shapes.push_back(*first);
  const Point target{b.uniform(b.lo + s / 2, b.hi - s / 2), b.uniform(b.lo + s / 2, b.hi - s / 2)};
  const PlacedShape second =
      b.label == 0 ? b.copy_to(*first, target) : b.place(A, s, target, Mirror::horizontal_axis);
  if (!b.fits_clear(second, b.shapes)) return b.reject("p20: second shape does not fit");
  b.shapes.push_back(second);
  b.cue.source = {0, 0};
  b.cue.relation = b.label == 0 ? "identical" : "mirrored about horizontal axis";
  return true;
}

bool sample_p21(SceneBuilder& b) {
  const Contour A = b.contour(14);
  const Contour C = b.label == 0 ? A : b.different({A}, 14);
  for (const Contour& c : {A, C}) {
    auto s = b.place_random(c, b.size(b.uniform(14, 26)), b.shapes, Mirror::none, b.angle());
    if (!s) return b.reject("p21: no room for shape");
    b.shapes.push_back(*s);
  }
  b.cue.source = {0, b.label == 0 ? 0 : 1};
  return true;
}

bool sample_p22(SceneBuilder& b) {
  const Contour A = b.contour(14);
  std::vector<Contour> cs{A, A, A};
  std::vector<int> src{0, 0, 0};
  if (b.label == 1) {
    const auto odd = static_cast<std::size_t>(b.rng.uniform_int(0, 2));
    cs[odd] = b.different({A}, 14);
    src[odd] = 1;
  }
  if (!b.place_all_random(cs, b.size(14))) return false;
  b.cue.source = src;
  return true;
}

bool sample_p23(SceneBuilder& b) {
  const Contour L1 = b.contour(28), L2 = b.contour(28), S = b.contour(10);
  if (!b.place_all_random({L1, L2}, b.size(28))) return false;
  const int host = b.rng.coin() ? 1 : 0;
  auto inner = b.place_inside(b.shapes[host], S, b.size(10));
  if (!inner) return b.reject("p23: no room inside the large shape");
  if (b.label == 0) {
    if (!b.clear_of(*inner, std::span(&b.shapes[1 - host], 1))) return b.reject("p23: inner shape touches other");
    b.shapes.push_back(*inner);
  } else {
    const PlacedShape a = b.shapes[0], c = b.shapes[1];
    auto out = b.place_random(S, b.size(10), b.shapes, Mirror::none, 0.0, [&](const PlacedShape& s) {
      return !geometry::contains(a, s) && !geometry::contains(c, s);
    });
    if (!out) return b.reject("p23: no room outside the large shapes");
    b.shapes.push_back(*out);
  }
  b.cue.source = {0, 1, 2};
  b.cue.relation = b.label == 0 ? "small inside a large shape" : "small outside both";
  return true;
}

using Sampler = bool (*)(SceneBuilder&);

Sampler sampler_for(int id) {
  switch (id) {
    case 1: return sample_p1;
    case 2: return sample_p2;
    case 4: return sample_p4;
    case 5: return sample_p5;
    case 6: return sample_p6;
    case 7: return sample_p7;
    case 8: return sample_p8;
    case 9: return sample_p9;
    case 10: return sample_p10;
    case 12: return sample_p12;
    case 14: return sample_p14;
    case 15: return sample_p15;
    case 16: return sample_p16;
    case 17: return sample_p17;
    case 18: return sample_p18;
    case 19: return sample_p19;
    case 20: return sample_p20;
    case 21: return sample_p21;
    case 22: return sample_p22;
    case 23: return sample_p23;
  }
  throw InvalidArgument("no sampler for problem " + std::to_string(id));
}

}  // namespace

SceneSpec sample_scene(const ProblemSpec& spec, ClassLabel label, Rng& rng, int canvas) {
  if (canvas < kMinCanvas) throw InvalidArgument("canvas must be at least 48 px, got " + std::to_string(canvas));
  const Sampler sampler = sampler_for(spec.id.value());
  std::string last_failure = "none";
  for (int attempt = 0; attempt < kSceneAttempts; ++attempt) {
    const int geometric_label = spec.variant.kind == VariantKind::Kind::null ? (rng.coin() ? 1 : 0) : label.value();
    SceneBuilder b(spec, geometric_label, rng, canvas);
    if (!sampler(b)) {
      last_failure = b.failure;
      continue;
    }
    if (b.shift != 0.0 && label.value() == 1) {
      for (auto& s : b.shapes) {
        s.transform.dx -= b.shift;
        s.transform.dy -= b.shift;
      }
    }
    SceneSpec scene{spec.id, label, spec.variant, canvas, std::move(b.shapes), std::move(b.cue)};
    if (spec.variant.kind == VariantKind::Kind::null) scene.cue.measures["geometric_label"] = geometric_label;
    return scene;
  }
  throw GenerationError("problem " + std::to_string(spec.id.value()) + " label " + std::to_string(label.value()) +
                        ": rejection sampling exhausted after " + std::to_string(kSceneAttempts) +
                        " attempts; last violated constraint: " + last_failure);
}

geometry::Bitmap render(const SceneSpec& scene) { return geometry::rasterize(scene.shapes, scene.canvas, scene.canvas); }

}  // namespace svrt::problems
