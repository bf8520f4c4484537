#include "svrt/dataset.hpp"

#include <exception>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "svrt/error.hpp"
#include "svrt/pgm.hpp"

namespace svrt::dataset {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

json describe(const DatasetConfig& c) {
  return json{{"problem", c.problem.value()},
              {"variant", c.variant.name()},
              {"n_train", c.n_train},
              {"n_test", c.n_test},
              {"image_size", c.image_size},
              {"master_seed", c.master_seed},
              {"format", "pgm-p5"},
              {"label_mapping", {{"0", "class 1 of the problem"}, {"1", "class 2 of the problem"}}}};
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("short write to " + path.string());
}

}  // namespace

std::string_view to_string(Split s) { return s == Split::train ? "train" : "test"; }

Split parse_split(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "test") return Split::test;
  throw InvalidArgument("split must be 'train' or 'test', got '" + std::string(s) + "'");
}

void DatasetConfig::validate() const {
  if (n_train < 1 || n_test < 1) throw InvalidArgument("n_train and n_test must be >= 1");
  if (image_size != 64 && image_size != 128 && image_size != 224)
    throw InvalidArgument("image_size must be 64, 128 or 224, got " + std::to_string(image_size));
}

fs::path dataset_dir(const DatasetConfig& config) {
  return config.output_path / ("p" + std::to_string(config.problem.value())) / config.variant.name();
}

std::uint64_t per_image_seed(std::uint64_t master_seed, Split split, int label, int index) {
  std::uint64_t h = hash_combine(master_seed, split == Split::train ? 0x7472616eULL : 0x74657374ULL);
  h = hash_combine(h, static_cast<std::uint64_t>(label));
  return hash_combine(h, static_cast<std::uint64_t>(index));
}

std::string to_json_line(const ManifestRecord& r) {
  return json{{"file_name", r.file_name},
              {"problem", r.problem},
              {"variant", r.variant},
              {"label", r.label},
              {"per_image_seed", r.per_image_seed},
              {"split", to_string(r.split)}}
      .dump();
}

ManifestRecord parse_json_line(std::string_view line) {
  try {
    const json j = json::parse(line);
    ManifestRecord r;
    r.file_name = j.at("file_name").get<std::string>();
    r.problem = j.at("problem").get<int>();
    r.variant = j.at("variant").get<std::string>();
    r.label = j.at("label").get<int>();
    r.per_image_seed = j.at("per_image_seed").get<std::uint64_t>();
    r.split = parse_split(j.at("split").get<std::string>());
    return r;
  } catch (const json::exception& e) {
    throw IoError(std::string("bad manifest line: ") + e.what());
  }
}

std::vector<ManifestRecord> read_manifest(const fs::path& variant_dir) {
  const fs::path path = variant_dir / "manifest.jsonl";
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<ManifestRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(parse_json_line(line));
    } catch (const IoError& e) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<ManifestRecord> generate_dataset(const DatasetConfig& config) {
  config.validate();
  const problems::ProblemSpec spec = problems::make_spec(config.problem, config.variant);
  const fs::path dir = dataset_dir(config);

  std::error_code ec;
  fs::remove(dir / "dataset.json", ec);
  fs::remove(dir / "manifest.jsonl", ec);
  fs::remove_all(dir / "train", ec);
  fs::remove_all(dir / "test", ec);
  fs::create_directories(dir / "train");
  fs::create_directories(dir / "test");

  std::vector<ManifestRecord> records;
  for (Split split : {Split::train, Split::test}) {
    const int n = split == Split::train ? config.n_train : config.n_test;
    for (int index = 0; index < n; ++index)
      for (int label = 0; label < 2; ++label)
        records.push_back({std::string(to_string(split)) + "/" + std::to_string(label) + "_" + std::to_string(index) +
                               ".pgm",
                           config.problem.value(), config.variant.name(), label,
                           per_image_seed(config.master_seed, split, label, index), split});
  }

  // Each image is a pure function of its seed, so records are independent.
  std::vector<std::optional<std::string>> failures(records.size());
  const auto count = static_cast<std::int64_t>(records.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < count; ++i) {
    const ManifestRecord& r = records[static_cast<std::size_t>(i)];
    try {
      Rng rng(r.per_image_seed);
      const auto scene = problems::sample_scene(spec, problems::ClassLabel(r.label), rng, config.image_size);
      pgm::write(dir / r.file_name, problems::render(scene));
    } catch (const std::exception& e) {
      failures[static_cast<std::size_t>(i)] = e.what();
    }
  }
  for (std::size_t i = 0; i < records.size(); ++i)
    if (failures[i])
      throw GenerationError("problem " + std::to_string(config.problem.value()) + " " +
                            std::string(to_string(records[i].split)) + " label " + std::to_string(records[i].label) +
                            " index " + records[i].file_name + ": " + *failures[i]);

  std::string manifest;
  for (const auto& r : records) manifest += to_json_line(r) + "\n";
  write_text(dir / "manifest.jsonl", manifest);
  write_text(dir / "dataset.json", describe(config).dump(2) + "\n");
  return records;
}

bool dataset_matches(const DatasetConfig& config) {
  const fs::path dir = dataset_dir(config);
  if (!fs::exists(dir / "dataset.json") || !fs::exists(dir / "manifest.jsonl")) return false;
  try {
    return json::parse(read_text(dir / "dataset.json")) == describe(config);
  } catch (const std::exception&) {
    return false;
  }
}

std::vector<Example> load_dataset(const fs::path& variant_dir, Split split) {
  std::vector<Example> out;
  for (const auto& r : read_manifest(variant_dir)) {
    if (r.split != split) continue;
    try {
      out.push_back({pgm::read(variant_dir / r.file_name), problems::ClassLabel(r.label)});
    } catch (const Error& e) {
      throw IoError("record " + r.file_name + ": " + e.what());
    }
  }
  return out;
}

}  // namespace svrt::dataset
