#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "svrt/geometry.hpp"

namespace svrt::pgm {

/// Binary PGM (P5), maxval 255.
std::string encode(const geometry::Bitmap& bitmap);
geometry::Bitmap decode(std::string_view bytes);

void write(const std::filesystem::path& path, const geometry::Bitmap& bitmap);
geometry::Bitmap read(const std::filesystem::path& path);

}  // namespace svrt::pgm
