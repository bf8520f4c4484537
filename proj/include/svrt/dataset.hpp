#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "svrt/geometry.hpp"
#include "svrt/problems.hpp"

namespace svrt::dataset {

enum class Split { train, test };

std::string_view to_string(Split s);
Split parse_split(std::string_view s);

struct DatasetConfig {
  problems::ProblemId problem{1};
  problems::VariantKind variant;
  int n_train = 2000;  // per class
  int n_test = 1000;   // per class
  int image_size = 64;
  std::uint64_t master_seed = 0;
  std::filesystem::path output_path = "data";

  /// Throws InvalidArgument on counts < 1 or unsupported image size.
  void validate() const;
};

struct ManifestRecord {
  std::string file_name;  // relative to the variant directory
  int problem = 0;
  std::string variant;
  int label = 0;
  std::uint64_t per_image_seed = 0;
  Split split = Split::train;
  bool operator==(const ManifestRecord&) const = default;
};

struct Example {
  geometry::Bitmap image;
  problems::ClassLabel label{0};
};

/// `<out>/p<ID>/<variant>`
std::filesystem::path dataset_dir(const DatasetConfig& config);

std::uint64_t per_image_seed(std::uint64_t master_seed, Split split, int label, int index);

std::string to_json_line(const ManifestRecord& record);
ManifestRecord parse_json_line(std::string_view line);
std::vector<ManifestRecord> read_manifest(const std::filesystem::path& variant_dir);

/// Writes every image plus manifest.jsonl and dataset.json into
/// dataset_dir(config), replacing any previous generation there. Records are
/// ordered split-major, then index, then label. Byte-identical for equal
/// configs regardless of thread count.
std::vector<ManifestRecord> generate_dataset(const DatasetConfig& config);

/// True if `dataset_dir(config)` holds a finished generation of exactly this
/// config.
bool dataset_matches(const DatasetConfig& config);

/// Images of one split in manifest order.
std::vector<Example> load_dataset(const std::filesystem::path& variant_dir, Split split);

}  // namespace svrt::dataset
