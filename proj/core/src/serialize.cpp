#include "tncirc/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace tncirc {

namespace {

constexpr char kMagic[4] = {'T', 'N', 'C', 'B'};
constexpr std::uint8_t kKindMps = 0;
constexpr std::uint8_t kKindMpo = 1;

static_assert(std::endian::native == std::endian::little,
              "container I/O assumes a little-endian host");

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("container: truncated stream");
  return v;
}

void write_tensor(std::ostream& os, const DenseTensor& t) {
  write_pod<std::uint8_t>(os, static_cast<std::uint8_t>(t.rank()));
  for (Index d : t.shape()) write_pod<std::int64_t>(os, d);
  os.write(reinterpret_cast<const char*>(t.data().data()),
           static_cast<std::streamsize>(t.size() * sizeof(Complex)));
}

DenseTensor read_tensor(std::istream& is) {
  const auto rank = read_pod<std::uint8_t>(is);
  std::vector<Index> shape;
  for (int i = 0; i < rank; ++i) shape.push_back(read_pod<std::int64_t>(is));
  DenseTensor t(shape);
  is.read(reinterpret_cast<char*>(t.data().data()),
          static_cast<std::streamsize>(t.size() * sizeof(Complex)));
  if (!is) throw std::runtime_error("container: truncated tensor payload");
  return t;
}

void write_header(std::ostream& os, std::uint8_t kind, const std::string& meta) {
  os.write(kMagic, 4);
  write_pod<std::uint32_t>(os, kContainerVersion);
  write_pod<std::uint8_t>(os, kind);
  write_pod<std::uint64_t>(os, meta.size());
  os.write(meta.data(), static_cast<std::streamsize>(meta.size()));
}

std::uint8_t read_header(std::istream& is, std::string* meta) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("container: bad magic");
  }
  const auto version = read_pod<std::uint32_t>(is);
  if (version != kContainerVersion) {
    throw std::runtime_error("container: unsupported format version " + std::to_string(version));
  }
  const auto kind = read_pod<std::uint8_t>(is);
  const auto meta_len = read_pod<std::uint64_t>(is);
  std::string m(meta_len, '\0');
  is.read(m.data(), static_cast<std::streamsize>(meta_len));
  if (!is) throw std::runtime_error("container: truncated metadata");
  if (meta) *meta = std::move(m);
  return kind;
}

}  // namespace

void save_mps(std::ostream& os, const BundledMps& state, const std::string& meta_json) {
  write_header(os, kKindMps, meta_json);
  write_pod<std::int32_t>(os, state.center);
  write_pod<std::int32_t>(os, state.excitation_count);
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(state.tensors.size()));
  for (const auto& t : state.tensors) write_tensor(os, t);
}

BundledMps load_mps(std::istream& is, std::string* meta_json) {
  if (read_header(is, meta_json) != kKindMps) {
    throw std::runtime_error("container: not an MPS payload");
  }
  BundledMps s;
  s.center = read_pod<std::int32_t>(is);
  s.excitation_count = read_pod<std::int32_t>(is);
  const auto count = read_pod<std::uint32_t>(is);
  for (std::uint32_t i = 0; i < count; ++i) s.tensors.push_back(read_tensor(is));
  s.check_valid();
  return s;
}

void save_mpo(std::ostream& os, const Mpo& op, const std::string& meta_json) {
  write_header(os, kKindMpo, meta_json);
  write_pod<double>(os, op.energy_offset);
  write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(op.tensors.size()));
  for (const auto& t : op.tensors) write_tensor(os, t);
}

Mpo load_mpo(std::istream& is, std::string* meta_json) {
  if (read_header(is, meta_json) != kKindMpo) {
    throw std::runtime_error("container: not an MPO payload");
  }
  Mpo op;
  op.energy_offset = read_pod<double>(is);
  const auto count = read_pod<std::uint32_t>(is);
  for (std::uint32_t i = 0; i < count; ++i) op.tensors.push_back(read_tensor(is));
  op.check_valid();
  return op;
}

void save_mps_file(const std::string& path, const BundledMps& state, const std::string& meta_json) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  save_mps(os, state, meta_json);
}

BundledMps load_mps_file(const std::string& path, std::string* meta_json) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return load_mps(is, meta_json);
}

}  // namespace tncirc
