#pragma once

// Geometric measurements that define the class rules. Shared by the samplers
// (to enforce margins) and the verifier (to re-derive labels).

#include <span>
#include <vector>

#include "svrt/geometry.hpp"

namespace svrt::problems::measures {

using geometry::Point;

double distance(Point a, Point b);

/// Bounding-box center of each placed shape.
std::vector<Point> centers(std::span<const geometry::PlacedShape> shapes);

double max_side(const geometry::PlacedShape& shape);

/// Largest deviation of four points from a square: side lengths against their
/// mean, diagonals against sqrt(2) times the mean side. Points are ordered by
/// angle around their centroid first.
double square_deviation(std::span<const Point> pts);

/// Distance of the middle point from the line through the two points that are
/// farthest apart.
double collinearity_deviation(std::span<const Point> pts);

/// max - min of the three pairwise distances.
double triangle_spread(std::span<const Point> pts);

/// How far the projection of `p` onto segment [a, b] lies beyond the nearest
/// endpoint, in length units; negative when it falls inside the segment.
double projection_overshoot(Point p, Point a, Point b);

}  // namespace svrt::problems::measures
