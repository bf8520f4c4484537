#include "svrt/pgm.hpp"

#include <cctype>
#include <fstream>
#include <iterator>

#include "svrt/error.hpp"

namespace svrt::pgm {
namespace {

// Next whitespace-delimited header token; skips '#' comments.
std::string_view next_token(std::string_view bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    if (bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
      ++pos;
    } else {
      break;
    }
  }
  const std::size_t start = pos;
  while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
  return bytes.substr(start, pos - start);
}

int parse_int(std::string_view token) {
  if (token.empty() || token.size() > 6) throw IoError("pgm: bad header field");
  int v = 0;
  for (char c : token) {
    if (c < '0' || c > '9') throw IoError("pgm: bad header field '" + std::string(token) + "'");
    v = v * 10 + (c - '0');
  }
  return v;
}

}  // namespace

std::string encode(const geometry::Bitmap& bitmap) {
  std::string out = "P5\n" + std::to_string(bitmap.width) + " " + std::to_string(bitmap.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(bitmap.pixels.data()), bitmap.pixels.size());
  return out;
}

geometry::Bitmap decode(std::string_view bytes) {
  std::size_t pos = 0;
  if (next_token(bytes, pos) != "P5") throw IoError("pgm: not a binary PGM (P5) file");
  const int width = parse_int(next_token(bytes, pos));
  const int height = parse_int(next_token(bytes, pos));
  const int maxval = parse_int(next_token(bytes, pos));
  if (width <= 0 || height <= 0) throw IoError("pgm: empty image");
  if (maxval != 255) throw IoError("pgm: only maxval 255 is supported");
  ++pos;  // single whitespace byte after maxval
  const auto n = static_cast<std::size_t>(width) * height;
  if (pos + n != bytes.size()) throw IoError("pgm: pixel payload has the wrong length");
  geometry::Bitmap bitmap(width, height);
  std::copy(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end(), bitmap.pixels.begin());
  return bitmap;
}

void write(const std::filesystem::path& path, const geometry::Bitmap& bitmap) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const std::string bytes = encode(bitmap);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path.string());
}

geometry::Bitmap read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  try {
    return decode(bytes);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace svrt::pgm
