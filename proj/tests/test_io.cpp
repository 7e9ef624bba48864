#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "support.hpp"

using namespace geodesc;
using namespace geodesc::testing;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("geodesc_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

void write_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out << bytes;
}

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

// ---- images --------------------------------------------------------------------

TEST(Png, IntensityRoundTripAt8Bit) {
  TempDir dir;
  IntensityImage img(37, 21);
  for (int y = 0; y < 21; ++y) {
    for (int x = 0; x < 37; ++x) img(x, y) = ((x * 7 + y * 13) % 256) / 255.0;
  }
  io::write_intensity_png(dir.file("a.png"), img);
  const auto back = io::read_intensity_png(dir.file("a.png"));
  ASSERT_EQ(back.width(), 37);
  ASSERT_EQ(back.height(), 21);
  for (int y = 0; y < 21; ++y) {
    for (int x = 0; x < 37; ++x) EXPECT_NEAR(back(x, y), img(x, y), 1e-12);
  }
}

TEST(Png, DepthRoundTripIsExactInMillimeters) {
  TempDir dir;
  DepthImage d(20, 10);
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 20; ++x) d(x, y) = (x + y) % 7 == 0 ? kInvalidDepth : 400 + 311 * x + 97 * y;
  }
  d(0, 1) = 65535;
  io::write_depth_png(dir.file("d.png"), d);
  EXPECT_EQ(io::read_depth_png(dir.file("d.png")), d);
  // The bytes are big-endian 16-bit: rewriting gives the same file.
  io::write_depth_png(dir.file("e.png"), io::read_depth_png(dir.file("d.png")));
  EXPECT_EQ(read_bytes(dir.file("d.png")), read_bytes(dir.file("e.png")));
}

TEST(Png, DepthRejectsEightBit) {
  TempDir dir;
  io::write_intensity_png(dir.file("a.png"), IntensityImage(4, 4, 0.5));
  EXPECT_THROW(io::read_depth_png(dir.file("a.png")), InputError);
}

TEST(Png, DepthOutOfRangeRejected) {
  TempDir dir;
  DepthImage d(2, 2, 70000.0);
  EXPECT_THROW(io::write_depth_png(dir.file("d.png"), d), InputError);
}

TEST(Png, MissingAndCorruptFilesAreInputErrors) {
  TempDir dir;
  EXPECT_THROW(io::read_intensity_png(dir.file("none.png")), InputError);
  write_bytes(dir.file("bad.png"), "\x89PNG\r\n\x1a\n garbage");
  EXPECT_THROW(io::read_intensity_png(dir.file("bad.png")), InputError);
  write_bytes(dir.file("txt.png"), "hello");
  EXPECT_THROW(io::read_depth_png(dir.file("txt.png")), InputError);
}

TEST(Pgm, EightAndSixteenBit) {
  TempDir dir;
  write_bytes(dir.file("a.pgm"), std::string("P5\n# c\n3 2\n255\n") + std::string("\x00\x80\xff\x10\x20\x30", 6));
  const auto a = io::read_pgm(dir.file("a.pgm"));
  ASSERT_EQ(a.width(), 3);
  EXPECT_DOUBLE_EQ(a(1, 0), 128.0 / 255.0);
  EXPECT_DOUBLE_EQ(a(2, 0), 1.0);
  write_bytes(dir.file("b.pgm"), std::string("P5 2 1 65535\n") + std::string("\xff\xff\x80\x00", 4));
  const auto b = io::read_pgm(dir.file("b.pgm"));
  EXPECT_DOUBLE_EQ(b(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(b(1, 0), 32768.0 / 65535.0);
  write_bytes(dir.file("c.pgm"), std::string("P5\n3 2\n255\n") + "ab");
  EXPECT_THROW(io::read_pgm(dir.file("c.pgm")), InputError);
  EXPECT_EQ(io::read_intensity(dir.file("a.pgm")), a);
}

TEST(Intrinsics, FileRoundTrip) {
  TempDir dir;
  const CameraIntrinsics k{517.3, 516.5, 318.6, 255.3};
  {
    std::ofstream out(dir.file("k.txt"));
    out << format_intrinsics(k);
  }
  EXPECT_EQ(load_intrinsics(dir.file("k.txt")), k);
  EXPECT_THROW(load_intrinsics(dir.file("missing.txt")), InputError);
}

// ---- dumps ---------------------------------------------------------------------

TEST(Dumps, PatchRoundTripAndLayout) {
  TempDir dir;
  std::vector<io::PatchRecord> records;
  Rng rng(1);
  for (std::uint32_t i = 0; i < 3; ++i) {
    io::PatchRecord r;
    r.id = 10 + i;
    r.x = 1.5f * i;
    r.y = 2.25f;
    r.patch = GeodesicPatch(4, 3, 1.0);
    for (int k = 0; k < 12; ++k) {
      if (k % 5 != 0) r.patch.set(k / 3, k % 3, rng.uniform());
    }
    records.push_back(r);
  }
  io::write_patches(dir.file("p.gpat"), records, 4, 3);
  const auto bytes = read_bytes(dir.file("p.gpat"));
  EXPECT_EQ(bytes.substr(0, 4), "GPAT");
  EXPECT_EQ(bytes.size(), 4u + 16u + 3u * (12u + 12u * 4u + 12u));
  std::uint32_t header[4];
  std::memcpy(header, bytes.data() + 4, 16);
  EXPECT_EQ(header[0], 1u);
  EXPECT_EQ(header[1], 4u);
  EXPECT_EQ(header[2], 3u);
  EXPECT_EQ(header[3], 3u);

  const auto dump = io::read_patches(dir.file("p.gpat"));
  EXPECT_EQ(dump.m, 4);
  EXPECT_EQ(dump.n, 3);
  ASSERT_EQ(dump.records.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(dump.records[i].id, records[i].id);
    EXPECT_EQ(dump.records[i].x, records[i].x);
    EXPECT_EQ(dump.records[i].patch.values, records[i].patch.values);
    EXPECT_EQ(dump.records[i].patch.mask, records[i].patch.mask);
  }
}

TEST(Dumps, GeoBitRoundTripAndSize) {
  TempDir dir;
  const auto pattern = generate_test_pattern(kCanonicalPatternSeed, 32);
  std::vector<io::GeoBitRecord> records;
  for (int i = 0; i < 5; ++i) {
    GeodesicPatch p(32, 32, 1.0);
    Rng rng(i);
    for (int k = 0; k < 1024; ++k) p.set(k / 32, k % 32, rng.uniform());
    io::GeoBitRecord r{static_cast<float>(i), 3.0f, geobit_describe(p, pattern)};
    r.descriptor.keypoint_id = 100 + i;
    records.push_back(r);
  }
  io::write_geobit(dir.file("d.gbit"), records);
  EXPECT_EQ(fs::file_size(dir.file("d.gbit")), 4u + 8u + 5u * (12u + 1024u));
  const auto back = io::read_geobit(dir.file("d.gbit"));
  ASSERT_EQ(back.size(), 5u);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(back[i].descriptor, records[i].descriptor);
    EXPECT_EQ(back[i].x, records[i].x);
  }
}

TEST(Dumps, CorruptFilesRejected) {
  TempDir dir;
  io::write_geobit(dir.file("d.gbit"), {io::GeoBitRecord{}});
  auto bytes = read_bytes(dir.file("d.gbit"));
  write_bytes(dir.file("short.gbit"), bytes.substr(0, bytes.size() - 1));
  EXPECT_THROW(io::read_geobit(dir.file("short.gbit")), InputError);
  write_bytes(dir.file("long.gbit"), bytes + "x");
  EXPECT_THROW(io::read_geobit(dir.file("long.gbit")), InputError);
  auto wrong = bytes;
  wrong[0] = 'X';
  write_bytes(dir.file("magic.gbit"), wrong);
  EXPECT_THROW(io::read_geobit(dir.file("magic.gbit")), InputError);
  EXPECT_THROW(io::read_descriptors(dir.file("magic.gbit")), InputError);
  auto version = bytes;
  version[4] = 2;
  write_bytes(dir.file("v.gbit"), version);
  EXPECT_THROW(io::read_geobit(dir.file("v.gbit")), InputError);
  EXPECT_THROW(io::read_patches(dir.file("d.gbit")), InputError);
}

TEST(Dumps, PatchDimensionMismatchRejected) {
  TempDir dir;
  io::PatchRecord r;
  r.patch = GeodesicPatch(4, 4, 1.0);
  EXPECT_THROW(io::write_patches(dir.file("p.gpat"), {r}, 4, 3), InputError);
}

TEST(Dumps, FloatDescriptorsSelfMatchPerfectly) {
  TempDir dir;
  Rng rng(3);
  std::vector<io::FloatRecord> records;
  for (int i = 0; i < 40; ++i) {
    io::FloatRecord r;
    r.x = static_cast<float>(rng.uniform(0, 640));
    r.y = static_cast<float>(rng.uniform(0, 480));
    r.descriptor.keypoint_id = static_cast<std::uint32_t>(i);
    r.descriptor.values.resize(io::kFloatDescriptorDim);
    double norm = 0.0;
    for (auto& v : r.descriptor.values) {
      v = static_cast<float>(rng.normal());
      norm += v * v;
    }
    for (auto& v : r.descriptor.values) v = static_cast<float>(v / std::sqrt(norm));
    records.push_back(r);
  }
  io::write_float_descriptors(dir.file("d.gflt"), records);
  const auto file = io::read_descriptors(dir.file("d.gflt"));
  ASSERT_TRUE(std::holds_alternative<std::vector<FloatDescriptor>>(file.descriptors));
  const auto& d = std::get<std::vector<FloatDescriptor>>(file.descriptors);
  for (int i = 0; i < 40; ++i) EXPECT_EQ(d[i], records[i].descriptor);
  const auto matches = match_nn(file.descriptors, file.descriptors);
  EXPECT_EQ(matches.metric, Metric::Euclidean);
  const auto eval = matching_score(matches, TpsModel::identity(), file.keypoints, file.keypoints, 3.0);
  EXPECT_DOUBLE_EQ(eval.score, 1.0);
}

TEST(Dumps, FloatDimensionMustBeConsistent) {
  TempDir dir;
  io::FloatRecord a, b;
  a.descriptor.values.resize(4);
  b.descriptor.values.resize(5);
  EXPECT_THROW(io::write_float_descriptors(dir.file("d.gflt"), {a, b}), InputError);
}

TEST(Dumps, SniffGeoBit) {
  TempDir dir;
  io::GeoBitRecord r;
  r.x = 5;
  r.y = 6;
  r.descriptor.keypoint_id = 9;
  io::write_geobit(dir.file("d.gbit"), {r});
  const auto file = io::read_descriptors(dir.file("d.gbit"));
  ASSERT_TRUE(std::holds_alternative<std::vector<GeoBitDescriptor>>(file.descriptors));
  ASSERT_EQ(file.keypoints.size(), 1u);
  EXPECT_EQ(file.keypoints[0].id, 9u);
  EXPECT_EQ(file.keypoints[0].position, Eigen::Vector2d(5, 6));
}

// ---- CSV -----------------------------------------------------------------------

TEST(Csv, KeypointRoundTrip) {
  TempDir dir;
  std::vector<Keypoint> kps(3);
  for (int i = 0; i < 3; ++i) {
    kps[i].id = 7 * i;
    kps[i].position = {0.1 * i + 1.0 / 3.0, 100.0 - i};
    kps[i].response = 1e-7 * (i + 1);
  }
  io::write_keypoints_csv(dir.file("k.csv"), kps);
  const auto back = io::read_keypoints_csv(dir.file("k.csv"));
  ASSERT_EQ(back.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(back[i].id, kps[i].id);
    EXPECT_EQ(back[i].position, kps[i].position);
    EXPECT_EQ(back[i].response, kps[i].response);
  }
}

TEST(Csv, HeaderAndResponseOptional) {
  TempDir dir;
  write_bytes(dir.file("k.csv"), "1, 10.5, 20\n2,30,40,0.5\r\n\n# note\n");
  const auto k = io::read_keypoints_csv(dir.file("k.csv"));
  ASSERT_EQ(k.size(), 2u);
  EXPECT_EQ(k[0].position, Eigen::Vector2d(10.5, 20));
  EXPECT_EQ(k[0].response, 0.0);
  EXPECT_EQ(k[1].response, 0.5);
  write_bytes(dir.file("bad.csv"), "id,x,y,response\n1,abc,2,3\n");
  EXPECT_THROW(io::read_keypoints_csv(dir.file("bad.csv")), InputError);
  write_bytes(dir.file("short.csv"), "1,2\n");
  EXPECT_THROW(io::read_keypoints_csv(dir.file("short.csv")), InputError);
  write_bytes(dir.file("neg.csv"), "-1,2,3\n");
  EXPECT_THROW(io::read_keypoints_csv(dir.file("neg.csv")), InputError);
}

TEST(Csv, MatchReportWithAndWithoutEvaluation) {
  TempDir dir;
  std::vector<Keypoint> q(2), t(2);
  q[0].id = 5;
  q[1].id = 6;
  t[0].id = 8;
  t[1].id = 9;
  t[1].position = {10, 0};
  MatchSet m;
  m.matches = {{0, 1, 12.0}, {1, 0, 3.0}};
  const auto eval = matching_score(m, TpsModel::identity(), q, t, 3.0);
  io::write_match_csv(dir.file("m.csv"), m, q, t, &eval);
  EXPECT_EQ(read_bytes(dir.file("m.csv")), "query_id,target_id,distance,correct\n5,9,12,0\n6,8,3,1\n");
  io::write_match_csv(dir.file("n.csv"), m, q, t, nullptr);
  EXPECT_EQ(read_bytes(dir.file("n.csv")), "query_id,target_id,distance\n5,9,12\n6,8,3\n");
  const auto summary = io::match_summary(m, 2, 2, &eval, 3.0);
  EXPECT_EQ(summary["matching_score"].get<double>(), 0.5);
  EXPECT_EQ(summary["inliers"].get<int>(), 1);
  EXPECT_EQ(summary["counts"]["queries"].get<int>(), 2);
  EXPECT_EQ(summary["tau"].get<double>(), 3.0);
  EXPECT_TRUE(io::match_summary(m, 2, 2, nullptr, 3.0)["matching_score"].is_null());
}

// ---- configuration ----------------------------------------------------------------

TEST(Config, DefaultsAndOverrides) {
  const auto c = config_from_json(nlohmann::json::parse(R"({
    "patch": {"m": 16, "n": 24, "support_mm": 60},
    "sampling": "cartesian", "tau": 2.5, "threads": 3,
    "paths": {"intensity": "a.png"}, "depth": {"pyramid_levels": 1}
  })"));
  EXPECT_EQ(c.patch.angular_bins, 16);
  EXPECT_EQ(c.patch.radial_bins, 24);
  EXPECT_EQ(c.patch.support_mm, 60.0);
  EXPECT_EQ(c.sampling, PatchSampling::Cartesian);
  EXPECT_EQ(c.tau, 2.5);
  EXPECT_EQ(c.threads, 3);
  EXPECT_EQ(c.intensity_path, "a.png");
  EXPECT_EQ(c.depth.pyramid_levels, 1);
  EXPECT_EQ(c.descriptor, DescriptorKind::GeoBit);
  EXPECT_EQ(c.pattern_seed, kCanonicalPatternSeed);
}

TEST(Config, InvalidRangesRejected) {
  for (const char* text : {R"({"tau": 0})", R"({"tau": -1})", R"({"patch": {"m": 0}})", R"({"patch": {"support_mm": -2}})",
                           R"({"harris_count": 0})", R"({"threads": -1})", R"({"max_masked_fraction": 1.5})",
                           R"({"sampling": "polar"})", R"({"descriptor": "orb"})", R"({"tau": "three"})",
                           R"({"depth": {"pyramid_levels": 12}})"}) {
    EXPECT_THROW(config_from_json(nlohmann::json::parse(text)), InputError) << text;
  }
}

TEST(Config, LoadFromFile) {
  TempDir dir;
  write_bytes(dir.file("c.json"), R"({"harris_count": 64})");
  EXPECT_EQ(load_config(dir.file("c.json")).harris_count, 64);
  write_bytes(dir.file("bad.json"), "{not json");
  EXPECT_THROW(load_config(dir.file("bad.json")), InputError);
  EXPECT_THROW(load_config(dir.file("missing.json")), InputError);
}
