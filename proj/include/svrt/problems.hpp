#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "svrt/geometry.hpp"
#include "svrt/rng.hpp"

namespace svrt::problems {

/// Kind of class difference, as grouped in reference result tables.
enum class Category {
  compare,
  compare_grouping,
  compare_relative_position,
  relative_position,
  size_relative_position,
  alignment,
  grouping,
};

std::string_view to_string(Category c);

/// Comparison problems need a shape-identity judgement; the rest are solvable
/// from position, size, alignment or grouping.
bool is_comparison(Category c);

/// One of the 20 supported problem numbers (3, 11 and 13 are not available).
class ProblemId {
 public:
  explicit ProblemId(int value);
  int value() const { return value_; }
  auto operator<=>(const ProblemId&) const = default;

 private:
  int value_;
};

/// 0 is the first class of a problem, 1 the second.
class ClassLabel {
 public:
  explicit ClassLabel(int value);
  int value() const { return value_; }
  auto operator<=>(const ClassLabel&) const = default;

 private:
  int value_;
};

enum class LeakKind { size_bias, position_bias };

struct VariantKind {
  enum class Kind { original, identical_control, leak, null };

  Kind kind = Kind::original;
  LeakKind leak = LeakKind::size_bias;
  /// size_bias: scale factor for label-1 shapes. position_bias: shift in
  /// pixels (at 64 px) of label-1 scenes toward the top-left.
  double magnitude = 0.0;

  static VariantKind original() { return {}; }
  static VariantKind identical_control() { return {Kind::identical_control}; }
  static VariantKind null_labels() { return {Kind::null}; }
  static VariantKind leak_of(LeakKind k, double magnitude);
  static VariantKind leak_of(LeakKind k);

  /// Stable directory-safe name, e.g. "original", "leak_size_bias",
  /// "leak_size_bias_x1.4". parse() accepts every name produced here.
  std::string name() const;
  static VariantKind parse(std::string_view name);

  bool operator==(const VariantKind&) const = default;
};

inline constexpr double kDefaultSizeBias = 1.2;
inline constexpr double kDefaultPositionBias = 6.0;

/// Class-rule tolerances in pixels at a 64 px canvas; scaled with the canvas.
struct Tolerances {
  double equality = 2.0;      // equality-type cues hold within this
  double separation = 8.0;    // inequality-type cues differ by at least this
  double collinearity = 2.0;  // perpendicular deviation for alignment
  Tolerances scaled(double factor) const { return {equality * factor, separation * factor, collinearity * factor}; }
};

struct ProblemSpec {
  ProblemId id;
  Category category;
  VariantKind variant;
  Tolerances tolerances;
  bool verifier_enabled = true;
};

/// Per-scene record of how the sampler built the cue. Never read by the
/// verifier.
struct CueMetadata {
  std::vector<int> source;  // shape index -> index of the contour it was drawn from
  std::map<std::string, double> measures;
  std::string relation;
};

struct SceneSpec {
  ProblemId problem;
  ClassLabel label;
  VariantKind variant;
  int canvas = 64;
  std::vector<geometry::PlacedShape> shapes;
  CueMetadata cue;
};

std::vector<std::pair<ProblemId, Category>> list_problems();

/// Original-variant spec of a problem.
ProblemSpec problem_spec(ProblemId id);

bool has_control_variant(ProblemId id);

/// Every shape of a scene is drawn from one contour; positions are sampled as
/// in the original. Only problems 1, 6, 8 and 17.
ProblemSpec control_variant(const ProblemSpec& spec);

/// Adds a deliberate label-correlated bias on top of the cue rule.
ProblemSpec inject_leak(const ProblemSpec& spec, LeakKind kind);
ProblemSpec inject_leak(const ProblemSpec& spec, LeakKind kind, double magnitude);

/// Both labels are drawn from the same mixture of the problem's classes.
ProblemSpec null_variant(const ProblemSpec& spec);

ProblemSpec make_spec(ProblemId id, const VariantKind& variant);

inline constexpr int kMinCanvas = 48;

/// Samples one scene of the given class. Deterministic in the rng state.
/// Throws GenerationError naming the last violated constraint if rejection
/// sampling is exhausted.
SceneSpec sample_scene(const ProblemSpec& spec, ClassLabel label, Rng& rng, int canvas);

/// Re-derives the class from the shapes alone and compares with the label.
/// Throws InvalidArgument for control and null variants.
bool verify_scene(const SceneSpec& scene);

geometry::Bitmap render(const SceneSpec& scene);

/// Minimum bounding-box side and inter-shape separation used by the samplers.
double min_shape_side(int canvas);
double canvas_margin(int canvas);
double min_shape_gap(int canvas);

}  // namespace svrt::problems
