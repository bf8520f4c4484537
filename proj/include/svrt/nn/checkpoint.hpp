#pragma once

// Binary checkpoint layout (all integers little-endian):
//   u8  format version (1)
//   4   magic "SVNN"
//   u8  scalar width in bytes (4 = float, 8 = double)
//   u32 architecture name length, then the name bytes
//   u32 input height, u32 input width
//   u32 layer count, then per layer: u8 kind, i32 units, i32 kernel, i32 stride
//   u32 tensor count, then per tensor: u32 rank, u32 dims..., values
// Tensors follow Network::parameters() order.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "svrt/nn/network.hpp"

namespace svrt::nn {

inline constexpr std::uint8_t kCheckpointVersion = 1;

template <typename T>
std::vector<std::uint8_t> serialize(const Network<T>& net);

/// Parses a checkpoint of either scalar width and converts to T. Throws IoError on malformed input.
template <typename T>
Network<T> deserialize(const std::vector<std::uint8_t>& bytes);

template <typename T>
void save_checkpoint(const Network<T>& net, const std::filesystem::path& path);

template <typename T>
Network<T> load_checkpoint(const std::filesystem::path& path);

}  // namespace svrt::nn
