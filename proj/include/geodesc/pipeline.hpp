#pragma once

#include <chrono>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "geodesc/camera.hpp"
#include "geodesc/depth.hpp"
#include "geodesc/evaluation.hpp"
#include "geodesc/geobit.hpp"
#include "geodesc/harris.hpp"
#include "geodesc/matching.hpp"
#include "geodesc/mesh.hpp"
#include "geodesc/parallel.hpp"
#include "geodesc/patch.hpp"
#include "geodesc/render.hpp"

namespace geodesc {

enum class DescriptorKind { GeoBit, ExternalPatchDump };
enum class PatchSampling { Geodesic, Cartesian };

struct PipelineConfig {
  std::string intensity_path;
  std::string depth_path;
  std::string intrinsics_path;  // empty: default intrinsics
  std::string keypoints_path;   // empty: run Harris
  std::string output_prefix;
  PatchParams patch;
  DescriptorKind descriptor = DescriptorKind::GeoBit;
  PatchSampling sampling = PatchSampling::Geodesic;
  int harris_count = 512;
  double tau = kDefaultMatchTolerance;
  int threads = 1;
  std::uint64_t pattern_seed = kCanonicalPatternSeed;
  double max_masked_fraction = 0.5;
  DepthPreprocessOptions depth;

  void validate() const {
    patch.validate();
    if (patch.angular_bins > 4096 || patch.radial_bins > 4096) throw InputError("config: patch too large");
    if (harris_count < 1) throw InputError("config: harris_count must be >= 1");
    if (!(tau > 0.0)) throw InputError("config: tau must be positive");
    if (threads < 0) throw InputError("config: threads must be >= 0");
    if (!(max_masked_fraction >= 0.0 && max_masked_fraction <= 1.0)) {
      throw InputError("config: max_masked_fraction must be in [0, 1]");
    }
    if (depth.pyramid_levels < 0 || depth.pyramid_levels > 8) throw InputError("config: pyramid_levels out of range");
    if (depth.smoothing_sigma < 0.0) throw InputError("config: smoothing_sigma must be >= 0");
    if (depth.max_hole_perimeter < 0) throw InputError("config: max_hole_perimeter must be >= 0");
  }
};

inline PipelineConfig config_from_json(const nlohmann::json& j, PipelineConfig c = {}) {
  try {
    auto get = [](const nlohmann::json& obj, const char* key, auto& field) {
      if (obj.contains(key)) field = obj.at(key).get<std::decay_t<decltype(field)>>();
    };
    if (j.contains("paths")) {
      const auto& p = j.at("paths");
      get(p, "intensity", c.intensity_path);
      get(p, "depth", c.depth_path);
      get(p, "intrinsics", c.intrinsics_path);
      get(p, "keypoints", c.keypoints_path);
      get(p, "output", c.output_prefix);
    }
    if (j.contains("patch")) {
      const auto& p = j.at("patch");
      get(p, "m", c.patch.angular_bins);
      get(p, "n", c.patch.radial_bins);
      get(p, "support_mm", c.patch.support_mm);
    }
    if (j.contains("descriptor")) {
      const auto d = j.at("descriptor").get<std::string>();
      if (d == "geobit") {
        c.descriptor = DescriptorKind::GeoBit;
      } else if (d == "external-patch-dump") {
        c.descriptor = DescriptorKind::ExternalPatchDump;
      } else {
        throw InputError("config: unknown descriptor '" + d + "'");
      }
    }
    if (j.contains("sampling")) {
      const auto s = j.at("sampling").get<std::string>();
      if (s == "geodesic") {
        c.sampling = PatchSampling::Geodesic;
      } else if (s == "cartesian") {
        c.sampling = PatchSampling::Cartesian;
      } else {
        throw InputError("config: unknown sampling '" + s + "'");
      }
    }
    get(j, "harris_count", c.harris_count);
    get(j, "tau", c.tau);
    get(j, "threads", c.threads);
    get(j, "pattern_seed", c.pattern_seed);
    get(j, "max_masked_fraction", c.max_masked_fraction);
    if (j.contains("depth")) {
      const auto& d = j.at("depth");
      get(d, "pyramid_levels", c.depth.pyramid_levels);
      get(d, "smoothing_sigma", c.depth.smoothing_sigma);
      get(d, "max_hole_perimeter", c.depth.max_hole_perimeter);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

inline PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  try {
    return config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw InputError("config " + path + ": " + e.what());
  }
}

struct StageTimings {
  double preprocess_ms = 0.0;
  double mesh_ms = 0.0;
  double patches_ms = 0.0;
  double describe_ms = 0.0;
};

struct Rejection {
  std::uint32_t keypoint_id = 0;
  std::string reason;
};

struct Extraction {
  /// Keypoints that produced a patch (and a descriptor when requested), in
  /// input order.
  std::vector<Keypoint> keypoints;
  std::vector<GeodesicPatch> patches;
  std::vector<GeoBitDescriptor> descriptors;
  std::vector<Rejection> rejections;
  StageTimings timings;
};

struct PreparedSurface {
  SurfaceMesh mesh;
  PreprocessResult depth;
};

inline PreparedSurface prepare_surface(const DepthImage& depth, const CameraIntrinsics& intrinsics,
                                       const DepthPreprocessOptions& options, StageTimings* timings = nullptr) {
  using clock = std::chrono::steady_clock;
  auto ms = [](clock::duration d) { return std::chrono::duration<double, std::milli>(d).count(); };
  PreparedSurface s;
  auto t0 = clock::now();
  s.depth = preprocess_depth(depth, options);
  auto t1 = clock::now();
  s.mesh = triangulate_depth(s.depth.depth, intrinsics.scaled(s.depth.scale));
  auto t2 = clock::now();
  if (timings) {
    timings->preprocess_ms = ms(t1 - t0);
    timings->mesh_ms = ms(t2 - t1);
  }
  return s;
}

/// depth -> mesh -> per-keypoint patch -> GeoBit. Keypoints whose patch
/// cannot be built or has too little support are rejected with a reason.
inline Extraction extract_features(const RgbdFrame& frame, const std::vector<Keypoint>& keypoints,
                                   const PipelineConfig& config, const TestPattern& pattern) {
  using clock = std::chrono::steady_clock;
  auto ms = [](clock::duration d) { return std::chrono::duration<double, std::milli>(d).count(); };
  config.validate();
  frame.validate();
  if (pattern.radial_bins != config.patch.radial_bins) throw InputError("pattern and patch radial bins differ");

  Extraction out;
  const PreparedSurface surface = prepare_surface(frame.depth, frame.intrinsics, config.depth, &out.timings);

  std::vector<std::optional<GeodesicPatch>> patches(keypoints.size());
  std::vector<std::string> reasons(keypoints.size());
  auto t0 = clock::now();
  parallel_for(keypoints.size(), config.threads, [&](std::size_t i) {
    try {
      patches[i] = config.sampling == PatchSampling::Geodesic
                       ? build_patch(surface.mesh, frame.intensity, keypoints[i], config.patch, frame.intrinsics)
                       : build_cartesian_patch(surface.mesh, frame.intensity, keypoints[i], config.patch,
                                               frame.intrinsics);
      if (patches[i]->masked_fraction() > config.max_masked_fraction) {
        patches[i].reset();
        reasons[i] = "insufficient surface support";
      }
    } catch (const GeometryError& e) {
      reasons[i] = e.what();
    }
  });
  auto t1 = clock::now();
  out.timings.patches_ms = ms(t1 - t0);

  for (std::size_t i = 0; i < keypoints.size(); ++i) {
    if (patches[i]) {
      out.keypoints.push_back(keypoints[i]);
      out.patches.push_back(std::move(*patches[i]));
    } else {
      out.rejections.push_back({keypoints[i].id, reasons[i]});
    }
  }

  if (config.descriptor == DescriptorKind::GeoBit) {
    auto t2 = clock::now();
    out.descriptors.resize(out.patches.size());
    parallel_for(out.patches.size(), config.threads, [&](std::size_t i) {
      out.descriptors[i] = geobit_describe(out.patches[i], pattern, config.max_masked_fraction);
      out.descriptors[i].keypoint_id = out.keypoints[i].id;
    });
    out.timings.describe_ms = ms(clock::now() - t2);
  }
  return out;
}

inline Extraction extract_features(const RgbdFrame& frame, const std::vector<Keypoint>& keypoints,
                                   const PipelineConfig& config) {
  return extract_features(frame, keypoints, config,
                          generate_test_pattern(config.pattern_seed, config.patch.radial_bins));
}

struct PairResult {
  MatchSet matches;
  MatchEvaluation evaluation;
};

/// Matches frame A's descriptors to frame B's and scores them against `gt`
/// (A pixels to B pixels).
inline PairResult evaluate_pair(const Extraction& a, const Extraction& b, const TpsModel& gt, double tau,
                                int threads = 1) {
  PairResult r;
  if (a.descriptors.empty() || b.descriptors.empty()) return r;
  r.matches = match_nn(a.descriptors, b.descriptors, threads);
  r.evaluation = matching_score(r.matches, gt, a.keypoints, b.keypoints, tau);
  return r;
}

}  // namespace geodesc
