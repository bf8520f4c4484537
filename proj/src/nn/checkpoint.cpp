#include "svrt/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "svrt/error.hpp"

namespace svrt::nn {

namespace {

constexpr char kMagic[4] = {'S', 'V', 'N', 'N'};

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) { le(v, 4); }
  void i32(std::int32_t v) { le(static_cast<std::uint32_t>(v), 4); }
  void f32(float v) { le(std::bit_cast<std::uint32_t>(v), 4); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  void le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& in) : in_(in) {}
  std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::int32_t i32() { return static_cast<std::int32_t>(static_cast<std::uint32_t>(le(4))); }
  float f32() { return std::bit_cast<float>(static_cast<std::uint32_t>(le(4))); }
  double f64() { return std::bit_cast<double>(le(8)); }
  std::string string(std::size_t n) {
    need(n);
    std::string s(in_.begin() + pos_, in_.begin() + pos_ + n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw IoError("checkpoint truncated at byte " + std::to_string(pos_));
  }
  std::uint64_t le(int n) {
    need(n);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t(in_[pos_ + i]) << (8 * i);
    pos_ += n;
    return v;
  }
  const std::vector<std::uint8_t>& in_;
  std::size_t pos_ = 0;
};

}  // namespace

template <typename T>
std::vector<std::uint8_t> serialize(const Network<T>& net) {
  Writer w;
  w.u8(kCheckpointVersion);
  w.bytes(kMagic, 4);
  w.u8(sizeof(T));
  w.u32(static_cast<std::uint32_t>(net.architecture().size()));
  w.bytes(net.architecture().data(), net.architecture().size());
  w.u32(static_cast<std::uint32_t>(net.input_h()));
  w.u32(static_cast<std::uint32_t>(net.input_w()));
  w.u32(static_cast<std::uint32_t>(net.layers().size()));
  for (const auto& l : net.layers()) {
    w.u8(static_cast<std::uint8_t>(l.kind));
    w.i32(l.units);
    w.i32(l.kernel);
    w.i32(l.stride);
  }
  w.u32(static_cast<std::uint32_t>(net.parameters().size()));
  for (const auto& t : net.parameters()) {
    w.u32(static_cast<std::uint32_t>(t.rank()));
    for (auto d : t.shape()) w.u32(static_cast<std::uint32_t>(d));
    for (T v : t.values()) {
      if constexpr (sizeof(T) == 4)
        w.f32(v);
      else
        w.f64(v);
    }
  }
  return w.take();
}

template <typename T>
Network<T> deserialize(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  const auto version = r.u8();
  if (version != kCheckpointVersion) throw IoError("unsupported checkpoint version " + std::to_string(version));
  if (r.string(4) != std::string(kMagic, 4)) throw IoError("not a network checkpoint");
  const auto width = r.u8();
  if (width != 4 && width != 8) throw IoError("bad scalar width " + std::to_string(width));
  const std::string arch = r.string(r.u32());
  const int h = static_cast<int>(r.u32()), w = static_cast<int>(r.u32());
  std::vector<LayerSpec> layers(r.u32());
  for (auto& l : layers) {
    const auto kind = r.u8();
    if (kind < 1 || kind > 5) throw IoError("bad layer kind " + std::to_string(kind));
    l.kind = static_cast<LayerKind>(kind);
    l.units = r.i32();
    l.kernel = r.i32();
    l.stride = r.i32();
  }
  Network<T> net = [&] {
    try {
      return Network<T>(arch, h, w, layers);
    } catch (const Error& e) {
      throw IoError(std::string("checkpoint describes an invalid network: ") + e.what());
    }
  }();
  auto& params = net.mutable_parameters();
  if (r.u32() != params.size()) throw IoError("checkpoint tensor count does not match its layer list");
  for (auto& t : params) {
    std::vector<std::size_t> shape(r.u32());
    for (auto& d : shape) d = r.u32();
    if (shape != t.shape()) throw IoError("checkpoint tensor shape " + shape_string(shape) + ", expected " +
                                          shape_string(t.shape()));
    for (auto& v : t.values()) v = static_cast<T>(width == 4 ? double(r.f32()) : r.f64());
  }
  if (!r.done()) throw IoError("trailing bytes after checkpoint");
  return net;
}

template <typename T>
void save_checkpoint(const Network<T>& net, const std::filesystem::path& path) {
  const auto bytes = serialize(net);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

template <typename T>
Network<T> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return deserialize<T>(bytes);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

template std::vector<std::uint8_t> serialize<float>(const Network<float>&);
template std::vector<std::uint8_t> serialize<double>(const Network<double>&);
template Network<float> deserialize<float>(const std::vector<std::uint8_t>&);
template Network<double> deserialize<double>(const std::vector<std::uint8_t>&);
template void save_checkpoint<float>(const Network<float>&, const std::filesystem::path&);
template void save_checkpoint<double>(const Network<double>&, const std::filesystem::path&);
template Network<float> load_checkpoint<float>(const std::filesystem::path&);
template Network<double> load_checkpoint<double>(const std::filesystem::path&);

}  // namespace svrt::nn
