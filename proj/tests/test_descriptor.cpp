#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <numbers>

#include "support.hpp"

using namespace geodesc;
using namespace geodesc::testing;

namespace {

GeodesicPatch random_patch(int m, int n, std::uint64_t seed) {
  Rng rng(seed);
  GeodesicPatch p(m, n, 75.0 / n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) p.set(i, j, rng.uniform());
  }
  return p;
}

/// Rows identical: every rotation candidate is the same bit string.
GeodesicPatch radial_patch(int m, int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> column(n);
  for (auto& v : column) v = rng.uniform();
  GeodesicPatch p(m, n, 75.0 / n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) p.set(i, j, column[j]);
  }
  return p;
}

GeoBitDescriptor complement(GeoBitDescriptor d) {
  for (auto& w : d.bits) w = ~w;
  return d;
}

int popcount_all(const GeoBitDescriptor& d) {
  int total = 0;
  for (auto w : d.bits) total += std::popcount(w);
  return total;
}

}  // namespace

// ---- test pattern --------------------------------------------------------------

TEST(Pattern, DeterministicForSeed) {
  EXPECT_EQ(generate_test_pattern(kCanonicalPatternSeed, 32), generate_test_pattern(kCanonicalPatternSeed, 32));
  EXPECT_FALSE(generate_test_pattern(1, 32) == generate_test_pattern(2, 32));
}

TEST(Pattern, CanonicalSeedValue) { EXPECT_EQ(kCanonicalPatternSeed, 0x6E0B17u); }

TEST(Pattern, IsocurvesAndAnglesInRange) {
  for (int n : {1, 8, 32}) {
    const auto p = generate_test_pattern(99, n);
    EXPECT_EQ(p.tests.size(), 512u);
    for (const auto& t : p.tests) {
      for (const auto& q : t) {
        EXPECT_GE(q.isocurve, 1);
        EXPECT_LE(q.isocurve, n);
        EXPECT_GE(q.angle, 0.0);
        EXPECT_LT(q.angle, 2 * std::numbers::pi);
      }
    }
  }
}

TEST(Pattern, RadialSpreadMatchesGaussian) {
  // Each coordinate ~ N(0, 3^2) in disc units, so E[rho^2] = 2 * 9.
  const int n = 256;
  const auto p = generate_test_pattern(kCanonicalPatternSeed, n);
  double sum2 = 0.0;
  for (const auto& t : p.tests) {
    for (const auto& q : t) {
      const double rho = q.isocurve * kPatternDiscRadius / n;
      sum2 += rho * rho;
    }
  }
  const double rms = std::sqrt(sum2 / 1024.0);
  EXPECT_NEAR(rms, 3.0 * std::sqrt(2.0), 0.3);
}

TEST(Pattern, RejectsBadBins) { EXPECT_THROW(generate_test_pattern(1, 0), InputError); }

// ---- GeoBit --------------------------------------------------------------------

TEST(GeoBit, StorageIsOneKilobyte) {
  EXPECT_EQ(sizeof(GeoBitDescriptor{}.bits), 1024u);
  EXPECT_EQ(kGeoBitCandidates * kGeoBitTests / 8, 1024);
}

TEST(GeoBit, ConstantPatchGivesZeroBits) {
  GeodesicPatch p(32, 32, 1.0);
  for (int i = 0; i < 32; ++i) {
    for (int j = 0; j < 32; ++j) p.set(i, j, 0.6);
  }
  const auto d = geobit_describe(p, generate_test_pattern(kCanonicalPatternSeed, 32));
  EXPECT_EQ(popcount_all(d), 0);
}

TEST(GeoBit, ShiftEquivarianceOnAngleRamp) {
  const int m = 32;
  GeodesicPatch a(m, 32, 1.0);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < 32; ++j) a.set(i, j, static_cast<double>(i) / m);
  }
  const auto pattern = generate_test_pattern(kCanonicalPatternSeed, 32);
  const auto da = geobit_describe(a, pattern);
  const auto db = geobit_describe(a.shifted(m / kGeoBitCandidates), pattern);
  for (int q = 0; q + 1 < kGeoBitCandidates; ++q) EXPECT_EQ(candidate_distance(da, q, db, q + 1), 0) << q;
  EXPECT_GT(popcount_all(da), 0);
}

TEST(GeoBit, ShiftEquivarianceOracleBitByBit) {
  // Independent construction: bit t of candidate q reads the bins nearest to
  // alpha + q pi/8 directly.
  const int m = 32;
  const auto patch = random_patch(m, 32, 12);
  const auto pattern = generate_test_pattern(5, 32);
  const auto d = geobit_describe(patch, pattern);
  auto bin = [&](double angle) {
    const int b = static_cast<int>(std::floor(angle / (2 * std::numbers::pi / m) + 0.5));
    return ((b % m) + m) % m;
  };
  for (int q = 0; q < kGeoBitCandidates; ++q) {
    for (int t = 0; t < kGeoBitTests; ++t) {
      const auto& [x, y] = pattern.tests[t];
      const float vx = patch.value((bin(x.angle) + 2 * q) % m, x.isocurve - 1);
      const float vy = patch.value((bin(y.angle) + 2 * q) % m, y.isocurve - 1);
      ASSERT_EQ(d.bit(q, t), vx < vy) << q << " " << t;
    }
  }
}

TEST(GeoBit, RotationCandidatesCoverEighthTurns) {
  const auto pattern = generate_test_pattern(kCanonicalPatternSeed, 32);
  for (int m : {32, 64, 16}) {
    const auto patch = random_patch(m, 32, 40 + m);
    const auto base = geobit_describe(patch, pattern);
    const int step = m / 16;
    for (int k = 0; k < 16; ++k) {
      const auto rotated = geobit_describe(patch.shifted(k * step), pattern);
      EXPECT_LE(geobit_distance(base, rotated), 8) << "m=" << m << " k=" << k;
    }
  }
}

TEST(GeoBit, IdenticalDescriptorsHaveZeroDistance) {
  const auto d = geobit_describe(random_patch(32, 32, 1), generate_test_pattern(kCanonicalPatternSeed, 32));
  EXPECT_EQ(geobit_distance(d, d), 0);
}

TEST(GeoBit, ComplementIsMaximallyDistant) {
  const auto d = geobit_describe(radial_patch(32, 32, 3), generate_test_pattern(kCanonicalPatternSeed, 32));
  EXPECT_EQ(geobit_distance(d, complement(d)), 512);
}

TEST(GeoBit, DistanceIsSymmetric) {
  const auto pattern = generate_test_pattern(kCanonicalPatternSeed, 32);
  for (int i = 0; i < 30; ++i) {
    const auto a = geobit_describe(random_patch(32, 32, 100 + i), pattern);
    const auto b = geobit_describe(random_patch(32, 32, 200 + i), pattern);
    EXPECT_EQ(geobit_distance(a, b), geobit_distance(b, a));
    // Oracle: both reference directions over all candidates.
    int oracle = 512;
    for (int c = 0; c < 16; ++c) {
      oracle = std::min(oracle, candidate_distance(a, 0, b, c));
      oracle = std::min(oracle, candidate_distance(b, 0, a, c));
    }
    EXPECT_EQ(geobit_distance(a, b), oracle);
  }
}

TEST(GeoBit, MaskedEntriesReadAsZero) {
  auto p = random_patch(32, 32, 9);
  auto q = p;
  for (int i = 0; i < 32; ++i) {
    for (int j = 20; j < 32; ++j) {
      p.mask[i * 32 + j] = 0;
      q.mask[i * 32 + j] = 0;
      q.values[i * 32 + j] = 0.9f;  // garbage under the mask
    }
  }
  const auto pattern = generate_test_pattern(kCanonicalPatternSeed, 32);
  EXPECT_EQ(geobit_describe(p, pattern), geobit_describe(q, pattern));
}

TEST(GeoBit, TooMuchMaskRejected) {
  auto p = random_patch(32, 32, 9);
  for (int i = 0; i < 32 * 17; ++i) p.mask[i] = 0;
  EXPECT_THROW(geobit_describe(p, generate_test_pattern(1, 32)), GeometryError);
  auto ok = random_patch(32, 32, 9);
  for (int i = 0; i < 32 * 16; ++i) ok.mask[i] = 0;
  EXPECT_NO_THROW(geobit_describe(ok, generate_test_pattern(1, 32)));
}

TEST(GeoBit, PatternBinsMustMatchPatch) {
  EXPECT_THROW(geobit_describe(random_patch(32, 32, 1), generate_test_pattern(1, 16)), InputError);
}

// ---- Harris --------------------------------------------------------------------

TEST(Harris, ConstantImageHasNoCorners) {
  EXPECT_TRUE(detect_harris(IntensityImage(64, 48, 0.4), 100).empty());
}

TEST(Harris, CheckerboardCornersOnGrid) {
  const auto img = checkerboard(100, 80, 10);
  const auto corners = detect_harris(img, 1000);
  ASSERT_FALSE(corners.empty());
  int interior = 0;
  for (const auto& k : corners) {
    // Intersections sit between pixels 10s - 1 and 10s.
    const double gx = std::round((k.position.x() + 0.5) / 10.0) * 10.0 - 0.5;
    const double gy = std::round((k.position.y() + 0.5) / 10.0) * 10.0 - 0.5;
    EXPECT_LE(std::abs(k.position.x() - gx), 1.0);
    EXPECT_LE(std::abs(k.position.y() - gy), 1.0);
    ++interior;
  }
  // Every interior intersection (9 x 7 of them) is found.
  EXPECT_GE(interior, 9 * 7);
}

TEST(Harris, BudgetAndOrdering) {
  const auto img = smooth_texture(200, 150, 17, 1.0);
  const auto corners = detect_harris(img, 100);
  ASSERT_EQ(corners.size(), 100u);
  for (std::size_t i = 1; i < corners.size(); ++i) {
    EXPECT_GE(corners[i - 1].response, corners[i].response);
    EXPECT_EQ(corners[i].id, i);
  }
}

TEST(Harris, TranslationEquivariant) {
  const auto big = smooth_texture(220, 170, 23, 1.2);
  const int dx = 7, dy = 4;
  IntensityImage a(180, 130), b(180, 130);
  for (int y = 0; y < 130; ++y) {
    for (int x = 0; x < 180; ++x) {
      a(x, y) = big(x + 20, y + 20);
      b(x, y) = big(x + 20 - dx, y + 20 - dy);
    }
  }
  const auto ka = detect_harris(a, 60);
  const auto kb = detect_harris(b, 200);
  int matched = 0, considered = 0;
  for (const auto& k : ka) {
    const Eigen::Vector2d p = k.position + Eigen::Vector2d(dx, dy);
    if (p.x() < 12 || p.y() < 12 || p.x() > 167 || p.y() > 117) continue;
    ++considered;
    for (const auto& q : kb) {
      if ((q.position - p).norm() < 1e-9) {
        ++matched;
        break;
      }
    }
  }
  ASSERT_GT(considered, 30);
  EXPECT_EQ(matched, considered);
}

// ---- matching ------------------------------------------------------------------

TEST(Match, IdenticalSetsMatchThemselves) {
  const auto pattern = generate_test_pattern(kCanonicalPatternSeed, 32);
  std::vector<GeoBitDescriptor> ds;
  for (int i = 0; i < 20; ++i) ds.push_back(geobit_describe(random_patch(32, 32, 500 + i), pattern));
  const auto m = match_nn(ds, ds);
  ASSERT_EQ(m.matches.size(), 20u);
  EXPECT_EQ(m.metric, Metric::Hamming);
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(m.matches[i].query, i);
    EXPECT_EQ(m.matches[i].target, i);
    EXPECT_EQ(m.matches[i].distance, 0.0);
  }
}

TEST(Match, AgreesWithFullScanOracle) {
  Rng rng(31);
  std::vector<FloatDescriptor> targets(57);
  for (auto& t : targets) {
    t.values.resize(16);
    for (auto& v : t.values) v = static_cast<float>(rng.normal());
  }
  std::vector<FloatDescriptor> queries(12);
  for (auto& q : queries) {
    q.values.resize(16);
    for (auto& v : q.values) v = static_cast<float>(rng.normal());
  }
  const auto m = match_nn(queries, targets, 3);
  EXPECT_EQ(m.metric, Metric::Euclidean);
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    int best = -1;
    double best_d = 1e300;
    for (std::size_t ti = 0; ti < targets.size(); ++ti) {
      double acc = 0.0;
      for (int k = 0; k < 16; ++k) {
        const double d = static_cast<double>(queries[qi].values[k]) - targets[ti].values[k];
        acc += d * d;
      }
      if (std::sqrt(acc) < best_d) {
        best_d = std::sqrt(acc);
        best = static_cast<int>(ti);
      }
    }
    EXPECT_EQ(m.matches[qi].target, best);
    EXPECT_NEAR(m.matches[qi].distance, best_d, 1e-9);
  }
}

TEST(Match, PermutationInvariantUpToTies) {
  const auto pattern = generate_test_pattern(kCanonicalPatternSeed, 32);
  std::vector<GeoBitDescriptor> q, t;
  for (int i = 0; i < 10; ++i) q.push_back(geobit_describe(random_patch(32, 32, 700 + i), pattern));
  for (int i = 0; i < 25; ++i) t.push_back(geobit_describe(random_patch(32, 32, 800 + i), pattern));
  std::vector<int> perm(t.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  std::vector<GeoBitDescriptor> tp;
  for (int i : perm) tp.push_back(t[i]);
  const auto a = match_nn(q, t);
  const auto b = match_nn(q, tp);
  for (std::size_t i = 0; i < q.size(); ++i) {
    EXPECT_EQ(a.matches[i].distance, b.matches[i].distance);
    const auto ties = std::count_if(t.begin(), t.end(), [&](const GeoBitDescriptor& d) {
      return geobit_distance(q[i], d) == a.matches[i].distance;
    });
    if (ties == 1) EXPECT_EQ(perm[b.matches[i].target], a.matches[i].target);
  }
}

TEST(Match, ThreadCountDoesNotChangeResult) {
  const auto pattern = generate_test_pattern(kCanonicalPatternSeed, 32);
  std::vector<GeoBitDescriptor> q, t;
  for (int i = 0; i < 40; ++i) q.push_back(geobit_describe(random_patch(32, 32, 900 + i), pattern));
  for (int i = 0; i < 40; ++i) t.push_back(geobit_describe(random_patch(32, 32, 1900 + i), pattern));
  EXPECT_EQ(match_nn(q, t, 1).matches, match_nn(q, t, 4).matches);
}

TEST(Match, EmptyInputThrows) {
  std::vector<GeoBitDescriptor> empty;
  std::vector<GeoBitDescriptor> one(1);
  EXPECT_THROW(match_nn(one, empty), InputError);
  EXPECT_THROW(match_nn(empty, one), InputError);
}

TEST(Match, MixedKindsThrow) {
  DescriptorList a = std::vector<GeoBitDescriptor>(2);
  DescriptorList b = std::vector<FloatDescriptor>(2, FloatDescriptor{{1.0f}, 0});
  EXPECT_THROW(match_nn(a, b), InputError);
}

TEST(Match, TieGoesToLowestIndex) {
  std::vector<FloatDescriptor> q{{{0.0f}, 0}};
  std::vector<FloatDescriptor> t{{{1.0f}, 0}, {{-1.0f}, 1}, {{1.0f}, 2}};
  EXPECT_EQ(match_nn(q, t).matches[0].target, 0);
}

// ---- TPS -----------------------------------------------------------------------

namespace {

std::vector<Eigen::Vector2d> grid25() {
  std::vector<Eigen::Vector2d> pts;
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 5; ++x) pts.emplace_back(40.0 * x + 10, 35.0 * y + 5);
  }
  return pts;
}

}  // namespace

TEST(Tps, IdentityFitFixesControls) {
  const auto src = grid25();
  for (double lambda : {0.0, 1e-6, 1.0, 100.0}) {
    const auto model = tps_fit(src, src, lambda);
    for (const auto& p : src) EXPECT_LT((tps_warp(model, p) - p).norm(), 1e-8);
  }
}

TEST(Tps, IdentityModelLeavesPoints) {
  const auto model = TpsModel::identity();
  EXPECT_EQ(tps_warp(model, {12.5, -3.0}), Eigen::Vector2d(12.5, -3.0));
}

TEST(Tps, ThreePointsAreAffine) {
  const std::vector<Eigen::Vector2d> src{{0, 0}, {100, 10}, {30, 80}};
  const std::vector<Eigen::Vector2d> dst{{5, 7}, {90, 40}, {-20, 60}};
  const auto model = tps_fit(src, dst, 0.0);
  for (const auto& w : model.weights) EXPECT_LT(w.norm(), 1e-8);
  for (int i = 0; i < 3; ++i) EXPECT_LT((tps_warp(model, src[i]) - dst[i]).norm(), 1e-8);
}

TEST(Tps, DisplacedGridMatchesDenseSolve) {
  const auto src = grid25();
  auto dst = src;
  dst[12] += Eigen::Vector2d(6.0, -4.0);
  const auto model = tps_fit(src, dst, 0.0);
  // Oracle: assemble and solve the bordered system independently.
  const int n = 25;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + 3, n + 3);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n + 3, 2);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double r2 = (src[i] - src[j]).squaredNorm();
      a(i, j) = r2 > 0 ? r2 * std::log(r2) : 0.0;
    }
    a(i, n) = a(n, i) = 1;
    a(i, n + 1) = a(n + 1, i) = src[i].x();
    a(i, n + 2) = a(n + 2, i) = src[i].y();
    b(i, 0) = dst[i].x();
    b(i, 1) = dst[i].y();
  }
  const Eigen::MatrixXd sol = a.fullPivLu().solve(b);
  Rng rng(2);
  for (int k = 0; k < 50; ++k) {
    const Eigen::Vector2d p(rng.uniform(0, 180), rng.uniform(0, 150));
    Eigen::Vector2d oracle(sol(n, 0) + sol(n + 1, 0) * p.x() + sol(n + 2, 0) * p.y(),
                           sol(n, 1) + sol(n + 1, 1) * p.x() + sol(n + 2, 1) * p.y());
    for (int i = 0; i < n; ++i) {
      const double r2 = (p - src[i]).squaredNorm();
      oracle += Eigen::Vector2d(sol(i, 0), sol(i, 1)) * (r2 > 0 ? r2 * std::log(r2) : 0.0);
    }
    EXPECT_LT((tps_warp(model, p) - oracle).norm(), 1e-6);
  }
  for (int i = 0; i < n; ++i) EXPECT_LT((tps_warp(model, src[i]) - dst[i]).norm(), 1e-6);
}

TEST(Tps, SideConditionsHold) {
  const auto src = grid25();
  Rng rng(4);
  auto dst = src;
  for (auto& p : dst) p += Eigen::Vector2d(rng.normal(0, 3), rng.normal(0, 3));
  const auto model = tps_fit(src, dst, 1e-6);
  Eigen::Vector2d sw = Eigen::Vector2d::Zero(), sx = sw, sy = sw;
  for (std::size_t i = 0; i < src.size(); ++i) {
    sw += model.weights[i];
    sx += model.weights[i] * src[i].x();
    sy += model.weights[i] * src[i].y();
  }
  EXPECT_LT(sw.norm(), 1e-8);
  EXPECT_LT(sx.norm(), 1e-8 * 200);
  EXPECT_LT(sy.norm(), 1e-8 * 200);
}

TEST(Tps, TranslationIsExact) {
  const auto src = grid25();
  const Eigen::Vector2d t(13.25, -7.5);
  auto dst = src;
  for (auto& p : dst) p += t;
  const auto model = tps_fit(src, dst, 1e-6);
  Rng rng(6);
  for (int k = 0; k < 50; ++k) {
    const Eigen::Vector2d p(rng.uniform(-50, 250), rng.uniform(-50, 250));
    EXPECT_LT((tps_warp(model, p) - (p + t)).norm(), 1e-8);
  }
}

TEST(Tps, LambdaShrinksKernelWeights) {
  const auto src = grid25();
  Rng rng(8);
  auto dst = src;
  for (auto& p : dst) p += Eigen::Vector2d(rng.normal(0, 4), rng.normal(0, 4));
  double prev = std::numeric_limits<double>::infinity();
  for (double lambda : {0.0, 1e-3, 1e-1, 1.0, 10.0, 1e3, 1e5}) {
    const auto model = tps_fit(src, dst, lambda);
    double norm = 0.0;
    for (const auto& w : model.weights) norm += w.squaredNorm();
    norm = std::sqrt(norm);
    EXPECT_LE(norm, prev * (1 + 1e-9)) << lambda;
    prev = norm;
  }
}

TEST(Tps, DegenerateControlsRejected) {
  const std::vector<Eigen::Vector2d> line{{0, 0}, {1, 1}, {2, 2}, {3, 3}};
  EXPECT_THROW(tps_fit(line, line, 0.0), GeometryError);
  const std::vector<Eigen::Vector2d> dup{{0, 0}, {0, 0}, {1, 0}, {0, 1}};
  EXPECT_THROW(tps_fit(dup, dup, 0.0), GeometryError);
  EXPECT_THROW(tps_fit({{0, 0}, {1, 0}}, {{0, 0}, {1, 0}}, 0.0), GeometryError);
  EXPECT_THROW(tps_fit(grid25(), grid25(), -1.0), InputError);
}

TEST(Tps, JsonRoundTrip) {
  const auto src = grid25();
  auto dst = src;
  dst[3] += Eigen::Vector2d(1, 2);
  const auto model = tps_fit(src, dst, 1e-6);
  const auto back = tps_from_json(nlohmann::json::parse(tps_to_json(model).dump()));
  EXPECT_EQ(back.controls, model.controls);
  EXPECT_EQ(back.weights, model.weights);
  EXPECT_EQ(back.affine, model.affine);
  EXPECT_EQ(back.lambda, model.lambda);
  EXPECT_THROW(tps_from_json(nlohmann::json::parse(R"({"lambda": 0})")), InputError);
}

// ---- matching score ------------------------------------------------------------

TEST(Score, TenOfFortyIsAQuarter) {
  std::vector<Keypoint> queries(50), targets(40);
  for (int i = 0; i < 50; ++i) queries[i].position = {i * 10.0, 0.0};
  for (int i = 0; i < 40; ++i) targets[i].position = {i * 10.0, 0.0};
  MatchSet m;
  for (int i = 0; i < 50; ++i) m.matches.push_back({i, i < 10 ? i : (i + 5) % 40, 0.0});
  const auto e = matching_score(m, TpsModel::identity(), queries, targets, 3.0);
  EXPECT_EQ(e.correct, 10);
  EXPECT_DOUBLE_EQ(e.score, 0.25);
}

TEST(Score, ToleranceIsInclusiveAndPositive) {
  std::vector<Keypoint> q(1), t(1);
  t[0].position = {3.0, 0.0};
  MatchSet m;
  m.matches.push_back({0, 0, 0.0});
  EXPECT_EQ(matching_score(m, TpsModel::identity(), q, t, 3.0).correct, 1);
  EXPECT_EQ(matching_score(m, TpsModel::identity(), q, t, 2.9).correct, 0);
  EXPECT_THROW(matching_score(m, TpsModel::identity(), q, t, 0.0), InputError);
  EXPECT_THROW(matching_score(m, TpsModel::identity(), q, t, -1.0), InputError);
}

TEST(Score, IdentityCaseIsOne) {
  const auto pattern = generate_test_pattern(kCanonicalPatternSeed, 32);
  std::vector<GeoBitDescriptor> ds;
  std::vector<Keypoint> kps(30);
  for (int i = 0; i < 30; ++i) {
    ds.push_back(geobit_describe(random_patch(32, 32, 60 + i), pattern));
    kps[i].position = {i * 7.0, i * 3.0};
  }
  const auto e = matching_score(match_nn(ds, ds), TpsModel::identity(), kps, kps, 3.0);
  EXPECT_DOUBLE_EQ(e.score, 1.0);
}

TEST(Score, WarpedGroundTruthUsed) {
  std::vector<Eigen::Vector2d> src{{0, 0}, {100, 0}, {0, 100}, {100, 100}};
  std::vector<Eigen::Vector2d> dst;
  for (const auto& p : src) dst.push_back(p + Eigen::Vector2d(20, 0));
  const auto gt = tps_fit(src, dst, 0.0);
  std::vector<Keypoint> q(2), t(2);
  q[0].position = {50, 50};
  q[1].position = {10, 10};
  t[0].position = {70, 51};
  t[1].position = {10, 10};
  MatchSet m;
  m.matches = {{0, 0, 0.0}, {1, 1, 0.0}};
  const auto e = matching_score(m, gt, q, t, 3.0);
  EXPECT_EQ(e.is_correct, (std::vector<bool>{true, false}));
  EXPECT_DOUBLE_EQ(e.score, 0.5);
}
