#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "geodesc/error.hpp"
#include "geodesc/geobit.hpp"
#include "geodesc/matching.hpp"
#include "geodesc/patch.hpp"

namespace geodesc::io {

inline constexpr std::uint32_t kDumpVersion = 1;
inline constexpr std::uint32_t kFloatDescriptorDim = 128;

/// Patch plus the keypoint it was built for.
struct PatchRecord {
  std::uint32_t id = 0;
  float x = 0.0f;
  float y = 0.0f;
  GeodesicPatch patch;
};

struct GeoBitRecord {
  float x = 0.0f;
  float y = 0.0f;
  GeoBitDescriptor descriptor;  // keypoint id lives in the descriptor
};

struct FloatRecord {
  float x = 0.0f;
  float y = 0.0f;
  FloatDescriptor descriptor;
};

namespace detail {

static_assert(std::endian::native == std::endian::little, "dump I/O assumes a little-endian host");

class Writer {
 public:
  explicit Writer(const std::string& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw InputError("cannot write " + path);
  }
  void magic(const char (&tag)[5]) { out_.write(tag, 4); }
  void u32(std::uint32_t v) { raw(&v, 4); }
  void f32(float v) { raw(&v, 4); }
  void raw(const void* data, std::size_t bytes) { out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes)); }
  void finish() {
    out_.flush();
    if (!out_) throw Error("write failed: " + path_);
  }

 private:
  std::string path_;
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw InputError("cannot read " + path);
  }
  void expect_magic(const char (&tag)[5]) {
    char got[4];
    raw(got, 4);
    if (std::memcmp(got, tag, 4) != 0) throw InputError(path_ + ": expected " + std::string(tag, 4) + " file");
  }
  std::uint32_t u32() {
    std::uint32_t v;
    raw(&v, 4);
    return v;
  }
  float f32() {
    float v;
    raw(&v, 4);
    return v;
  }
  void raw(void* data, std::size_t bytes) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(bytes));
    if (!in_) throw InputError(path_ + ": truncated file");
  }
  void expect_end() {
    if (in_.peek() != std::char_traits<char>::eof()) throw InputError(path_ + ": trailing bytes");
  }
  void expect_version() {
    const auto v = u32();
    if (v != kDumpVersion) throw InputError(path_ + ": unsupported version " + std::to_string(v));
  }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ifstream in_;
};

}  // namespace detail

/// GPAT: all patches must share m and n.
inline void write_patches(const std::string& path, const std::vector<PatchRecord>& records, int m, int n) {
  detail::Writer w(path);
  w.magic("GPAT");
  w.u32(kDumpVersion);
  w.u32(static_cast<std::uint32_t>(m));
  w.u32(static_cast<std::uint32_t>(n));
  w.u32(static_cast<std::uint32_t>(records.size()));
  for (const auto& r : records) {
    if (r.patch.m != m || r.patch.n != n) throw InputError("patch dump: inconsistent patch dimensions");
    w.u32(r.id);
    w.f32(r.x);
    w.f32(r.y);
    w.raw(r.patch.values.data(), r.patch.values.size() * sizeof(float));
    w.raw(r.patch.mask.data(), r.patch.mask.size());
  }
  w.finish();
}

struct PatchDump {
  int m = 0;
  int n = 0;
  std::vector<PatchRecord> records;
};

inline PatchDump read_patches(const std::string& path) {
  detail::Reader r(path);
  r.expect_magic("GPAT");
  r.expect_version();
  PatchDump dump;
  dump.m = static_cast<int>(r.u32());
  dump.n = static_cast<int>(r.u32());
  const auto count = r.u32();
  if (dump.m <= 0 || dump.n <= 0 || dump.m > 4096 || dump.n > 4096) throw InputError(path + ": bad patch size");
  for (std::uint32_t i = 0; i < count; ++i) {
    PatchRecord rec;
    rec.id = r.u32();
    rec.x = r.f32();
    rec.y = r.f32();
    rec.patch = GeodesicPatch(dump.m, dump.n, 0.0);
    r.raw(rec.patch.values.data(), rec.patch.values.size() * sizeof(float));
    r.raw(rec.patch.mask.data(), rec.patch.mask.size());
    dump.records.push_back(std::move(rec));
  }
  r.expect_end();
  return dump;
}

inline void write_geobit(const std::string& path, const std::vector<GeoBitRecord>& records) {
  detail::Writer w(path);
  w.magic("GBIT");
  w.u32(kDumpVersion);
  w.u32(static_cast<std::uint32_t>(records.size()));
  for (const auto& r : records) {
    w.u32(r.descriptor.keypoint_id);
    w.f32(r.x);
    w.f32(r.y);
    w.raw(r.descriptor.bits.data(), sizeof(r.descriptor.bits));
  }
  w.finish();
}

inline std::vector<GeoBitRecord> read_geobit(const std::string& path) {
  detail::Reader r(path);
  r.expect_magic("GBIT");
  r.expect_version();
  const auto count = r.u32();
  std::vector<GeoBitRecord> out;
  for (std::uint32_t i = 0; i < count; ++i) {
    GeoBitRecord rec;
    rec.descriptor.keypoint_id = r.u32();
    rec.x = r.f32();
    rec.y = r.f32();
    r.raw(rec.descriptor.bits.data(), sizeof(rec.descriptor.bits));
    out.push_back(rec);
  }
  r.expect_end();
  return out;
}

inline void write_float_descriptors(const std::string& path, const std::vector<FloatRecord>& records,
                                    std::uint32_t dim = kFloatDescriptorDim) {
  detail::Writer w(path);
  w.magic("GFLT");
  w.u32(kDumpVersion);
  w.u32(static_cast<std::uint32_t>(records.size()));
  w.u32(dim);
  for (const auto& r : records) {
    if (r.descriptor.values.size() != dim) throw InputError("float dump: descriptor dimension mismatch");
    w.u32(r.descriptor.keypoint_id);
    w.f32(r.x);
    w.f32(r.y);
    w.raw(r.descriptor.values.data(), dim * sizeof(float));
  }
  w.finish();
}

inline std::vector<FloatRecord> read_float_descriptors(const std::string& path) {
  detail::Reader r(path);
  r.expect_magic("GFLT");
  r.expect_version();
  const auto count = r.u32();
  const auto dim = r.u32();
  if (dim == 0 || dim > 65536) throw InputError(path + ": bad descriptor dimension");
  std::vector<FloatRecord> out;
  for (std::uint32_t i = 0; i < count; ++i) {
    FloatRecord rec;
    rec.descriptor.keypoint_id = r.u32();
    rec.x = r.f32();
    rec.y = r.f32();
    rec.descriptor.values.resize(dim);
    r.raw(rec.descriptor.values.data(), dim * sizeof(float));
    out.push_back(std::move(rec));
  }
  r.expect_end();
  return out;
}

/// Descriptors plus the keypoints they describe, read from either a GBIT or
/// a GFLT file (sniffed by magic).
struct DescriptorFile {
  DescriptorList descriptors;
  std::vector<Keypoint> keypoints;
};

inline DescriptorFile read_descriptors(const std::string& path) {
  char tag[4] = {};
  {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path);
    in.read(tag, 4);
    if (!in) throw InputError(path + ": truncated file");
  }
  DescriptorFile file;
  auto keypoint = [](std::uint32_t id, float x, float y) {
    Keypoint k;
    k.id = id;
    k.position = {x, y};
    return k;
  };
  if (std::memcmp(tag, "GBIT", 4) == 0) {
    std::vector<GeoBitDescriptor> d;
    for (const auto& rec : read_geobit(path)) {
      d.push_back(rec.descriptor);
      file.keypoints.push_back(keypoint(rec.descriptor.keypoint_id, rec.x, rec.y));
    }
    file.descriptors = std::move(d);
  } else if (std::memcmp(tag, "GFLT", 4) == 0) {
    std::vector<FloatDescriptor> d;
    for (auto& rec : read_float_descriptors(path)) {
      file.keypoints.push_back(keypoint(rec.descriptor.keypoint_id, rec.x, rec.y));
      d.push_back(std::move(rec.descriptor));
    }
    file.descriptors = std::move(d);
  } else {
    throw InputError(path + ": unknown descriptor file");
  }
  return file;
}

}  // namespace geodesc::io
