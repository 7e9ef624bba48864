#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "geodesc/error.hpp"
#include "geodesc/patch.hpp"
#include "geodesc/random.hpp"

namespace geodesc {

inline constexpr int kGeoBitTests = 512;
inline constexpr int kGeoBitCandidates = 16;
inline constexpr int kGeoBitWordsPerCandidate = kGeoBitTests / 64;

/// Seed of the pattern shipped with the library ("GEOBIT" -> 0x6E0B17).
inline constexpr std::uint64_t kCanonicalPatternSeed = 0x6E0B17;

/// Polar test location: angle alpha (radians, [0, 2 pi)) and isocurve index
/// l in [1, n].
struct PolarPoint {
  double angle = 0.0;
  int isocurve = 1;

  bool operator==(const PolarPoint&) const = default;
};

struct TestPattern {
  std::array<std::array<PolarPoint, 2>, kGeoBitTests> tests{};
  int radial_bins = 0;
  std::uint64_t seed = 0;

  bool operator==(const TestPattern&) const = default;
};

/// Radius of the virtual disc the Gaussian pattern is drawn in; it maps
/// linearly onto the n radial bins of a patch.
inline constexpr double kPatternDiscRadius = 30.0;
inline constexpr double kPatternStddev = 3.0;  // variance 30^2 / 100

/// Draws 1024 points with each coordinate ~ N(0, 30^2/100), clipped to the
/// 30-unit disc, rescaled to `radial_bins` isocurves and paired sequentially.
inline TestPattern generate_test_pattern(std::uint64_t seed, int radial_bins) {
  if (radial_bins < 1) throw InputError("test pattern: radial_bins must be >= 1");
  TestPattern pattern;
  pattern.radial_bins = radial_bins;
  pattern.seed = seed;
  Rng rng(seed);
  for (auto& test : pattern.tests) {
    for (auto& point : test) {
      const double x = kPatternStddev * rng.normal();
      const double y = kPatternStddev * rng.normal();
      const double rho = std::min(std::hypot(x, y), kPatternDiscRadius);
      double angle = std::atan2(y, x);
      if (angle < 0.0) angle += 2.0 * std::numbers::pi;
      const int l = static_cast<int>(std::lround(rho * radial_bins / kPatternDiscRadius));
      point = {angle, std::clamp(l, 1, radial_bins)};
    }
  }
  return pattern;
}

/// 16 orientation candidates x 512 bits. Candidate c occupies words
/// [8c, 8c + 8); test t is bit t % 64 of word t / 64 (LSB first).
struct GeoBitDescriptor {
  std::array<std::uint64_t, kGeoBitCandidates * kGeoBitWordsPerCandidate> bits{};
  std::uint32_t keypoint_id = 0;

  bool bit(int candidate, int test) const {
    return (bits[candidate * kGeoBitWordsPerCandidate + test / 64] >> (test % 64)) & 1u;
  }

  bool operator==(const GeoBitDescriptor&) const = default;
};

static_assert(sizeof(GeoBitDescriptor{}.bits) == 1024, "GeoBit storage must be 1,024 bytes");

namespace detail {

/// Nearest angular bin of angle `alpha` rotated by candidate c, using exact
/// integer shifts whenever the candidate step is a whole number of bins.
inline int candidate_bin(double alpha, int candidate, int m) {
  const double bin_width = 2.0 * std::numbers::pi / m;
  const double shift = candidate * m / static_cast<double>(kGeoBitCandidates);
  const double base = alpha / bin_width;
  long bin = 0;
  if (shift == std::floor(shift)) {
    bin = std::lround(std::floor(base + 0.5)) + static_cast<long>(shift);
  } else {
    bin = std::lround(std::floor(base + shift + 0.5));
  }
  return static_cast<int>(((bin % m) + m) % m);
}

}  // namespace detail

/// Bit t of candidate c is [P(alpha_x + c*pi/8, l_x) < P(alpha_y + c*pi/8, l_y)]
/// with nearest-bin lookup; masked entries read as 0.
inline GeoBitDescriptor geobit_describe(const GeodesicPatch& patch, const TestPattern& pattern,
                                        double max_masked_fraction = 0.5) {
  if (pattern.radial_bins != patch.n) throw InputError("geobit: pattern and patch radial bins differ");
  if (patch.masked_fraction() > max_masked_fraction) throw GeometryError("insufficient surface support");

  auto read = [&](int bin, int isocurve) -> float {
    const std::size_t idx = static_cast<std::size_t>(bin) * patch.n + (isocurve - 1);
    return patch.mask[idx] ? patch.values[idx] : 0.0f;
  };

  GeoBitDescriptor desc;
  for (int c = 0; c < kGeoBitCandidates; ++c) {
    for (int t = 0; t < kGeoBitTests; ++t) {
      const auto& [x, y] = pattern.tests[t];
      const float vx = read(detail::candidate_bin(x.angle, c, patch.m), x.isocurve);
      const float vy = read(detail::candidate_bin(y.angle, c, patch.m), y.isocurve);
      if (vx < vy) desc.bits[c * kGeoBitWordsPerCandidate + t / 64] |= std::uint64_t{1} << (t % 64);
    }
  }
  return desc;
}

/// Hamming distance between candidate `ca` of `a` and candidate `cb` of `b`.
inline int candidate_distance(const GeoBitDescriptor& a, int ca, const GeoBitDescriptor& b, int cb) {
  int d = 0;
  const auto* wa = &a.bits[ca * kGeoBitWordsPerCandidate];
  const auto* wb = &b.bits[cb * kGeoBitWordsPerCandidate];
  for (int w = 0; w < kGeoBitWordsPerCandidate; ++w) d += std::popcount(wa[w] ^ wb[w]);
  return d;
}

/// Smallest Hamming distance between the reference candidate of one
/// descriptor and any candidate of the other, taken in both directions so the
/// result is symmetric.
inline int geobit_distance(const GeoBitDescriptor& a, const GeoBitDescriptor& b) {
  int best = kGeoBitTests;
  for (int c = 0; c < kGeoBitCandidates && best > 0; ++c) {
    best = std::min(best, candidate_distance(a, 0, b, c));
    best = std::min(best, candidate_distance(b, 0, a, c));
  }
  return best;
}

}  // namespace geodesc
