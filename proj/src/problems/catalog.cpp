#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <string>

#include "svrt/error.hpp"
#include "svrt/problems.hpp"

namespace svrt::problems {
namespace {

struct CatalogEntry {
  int id;
  Category category;
};

// Problem number -> category tag used in reference result tables.
constexpr std::array<CatalogEntry, 20> kCatalog{{
    {1, Category::compare},
    {2, Category::relative_position},
    {4, Category::relative_position},
    {5, Category::compare_grouping},
    {6, Category::compare_grouping},
    {7, Category::compare_grouping},
    {8, Category::compare_relative_position},
    {9, Category::size_relative_position},
    {10, Category::relative_position},
    {12, Category::size_relative_position},
    {14, Category::alignment},
    {15, Category::compare},
    {16, Category::compare},
    {17, Category::compare_relative_position},
    {18, Category::grouping},
    {19, Category::compare},
    {20, Category::compare},
    {21, Category::compare},
    {22, Category::compare},
    {23, Category::relative_position},
}};

const CatalogEntry* find_entry(int id) {
  for (const auto& e : kCatalog)
    if (e.id == id) return &e;
  return nullptr;
}

std::string format_magnitude(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

double parse_magnitude(std::string_view text, std::string_view whole) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !(value > 0.0))
    throw InvalidArgument("bad variant magnitude in '" + std::string(whole) + "'");
  return value;
}

}  // namespace

std::string_view to_string(Category c) {
  switch (c) {
    case Category::compare: return "compare";
    case Category::compare_grouping: return "compare+grouping";
    case Category::compare_relative_position: return "compare+relative-position";
    case Category::relative_position: return "relative-position";
    case Category::size_relative_position: return "size+relative-position";
    case Category::alignment: return "alignment";
    case Category::grouping: return "grouping";
  }
  return "unknown";
}

bool is_comparison(Category c) {
  return c == Category::compare || c == Category::compare_grouping || c == Category::compare_relative_position;
}

ProblemId::ProblemId(int value) : value_(value) {
  if (find_entry(value) == nullptr)
    throw InvalidArgument("problem " + std::to_string(value) + " is not available (valid: 1-23 except 3, 11, 13)");
}

ClassLabel::ClassLabel(int value) : value_(value) {
  if (value != 0 && value != 1) throw InvalidArgument("class label must be 0 or 1, got " + std::to_string(value));
}

VariantKind VariantKind::leak_of(LeakKind k, double magnitude) {
  if (!(magnitude > 0.0)) throw InvalidArgument("leak magnitude must be positive");
  VariantKind v;
  v.kind = Kind::leak;
  v.leak = k;
  v.magnitude = magnitude;
  return v;
}

VariantKind VariantKind::leak_of(LeakKind k) {
  return leak_of(k, k == LeakKind::size_bias ? kDefaultSizeBias : kDefaultPositionBias);
}

std::string VariantKind::name() const {
  switch (kind) {
    case Kind::original: return "original";
    case Kind::identical_control: return "identical_control";
    case Kind::null: return "null";
    case Kind::leak:
      if (leak == LeakKind::size_bias)
        return magnitude == kDefaultSizeBias ? "leak_size_bias" : "leak_size_bias_x" + format_magnitude(magnitude);
      return magnitude == kDefaultPositionBias ? "leak_position_bias"
                                               : "leak_position_bias_" + format_magnitude(magnitude) + "px";
  }
  return "unknown";
}

VariantKind VariantKind::parse(std::string_view name) {
  if (name == "original") return original();
  if (name == "identical_control" || name == "control") return identical_control();
  if (name == "null") return null_labels();
  constexpr std::string_view size_prefix = "leak_size_bias";
  constexpr std::string_view pos_prefix = "leak_position_bias";
  if (name.starts_with(size_prefix)) {
    auto rest = name.substr(size_prefix.size());
    if (rest.empty()) return leak_of(LeakKind::size_bias);
    if (rest.starts_with("_x")) return leak_of(LeakKind::size_bias, parse_magnitude(rest.substr(2), name));
  }
  if (name.starts_with(pos_prefix)) {
    auto rest = name.substr(pos_prefix.size());
    if (rest.empty()) return leak_of(LeakKind::position_bias);
    if (rest.starts_with("_") && rest.ends_with("px"))
      return leak_of(LeakKind::position_bias, parse_magnitude(rest.substr(1, rest.size() - 3), name));
  }
  throw InvalidArgument("unknown variant '" + std::string(name) + "'");
}

std::vector<std::pair<ProblemId, Category>> list_problems() {
  std::vector<std::pair<ProblemId, Category>> out;
  for (const auto& e : kCatalog) out.emplace_back(ProblemId(e.id), e.category);
  return out;
}

ProblemSpec problem_spec(ProblemId id) {
  return ProblemSpec{id, find_entry(id.value())->category, VariantKind::original(), Tolerances{}, true};
}

bool has_control_variant(ProblemId id) {
  const int v = id.value();
  return v == 1 || v == 6 || v == 8 || v == 17;
}

ProblemSpec control_variant(const ProblemSpec& spec) {
  const int id = spec.id.value();
  if (!has_control_variant(spec.id))
    throw InvalidArgument("identical_control is only defined for problems 1, 6, 8, 17 (got " + std::to_string(id) +
                          ")");
  ProblemSpec out = spec;
  out.variant = VariantKind::identical_control();
  out.verifier_enabled = false;
  return out;
}

ProblemSpec inject_leak(const ProblemSpec& spec, LeakKind kind, double magnitude) {
  ProblemSpec out = spec;
  out.variant = VariantKind::leak_of(kind, magnitude);
  return out;
}

ProblemSpec inject_leak(const ProblemSpec& spec, LeakKind kind) {
  ProblemSpec out = spec;
  out.variant = VariantKind::leak_of(kind);
  return out;
}

ProblemSpec null_variant(const ProblemSpec& spec) {
  ProblemSpec out = spec;
  out.variant = VariantKind::null_labels();
  out.verifier_enabled = false;
  return out;
}

ProblemSpec make_spec(ProblemId id, const VariantKind& variant) {
  const ProblemSpec base = problem_spec(id);
  switch (variant.kind) {
    case VariantKind::Kind::original: return base;
    case VariantKind::Kind::identical_control: return control_variant(base);
    case VariantKind::Kind::null: return null_variant(base);
    case VariantKind::Kind::leak: return inject_leak(base, variant.leak, variant.magnitude);
  }
  return base;
}

double min_shape_side(int canvas) { return 8.0 * canvas / 64.0; }
double canvas_margin(int canvas) { return 2.0 * canvas / 64.0; }
double min_shape_gap(int canvas) { return 2.0 * canvas / 64.0; }

}  // namespace svrt::problems
