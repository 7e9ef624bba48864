#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "geodesc/camera.hpp"
#include "geodesc/geodesic.hpp"
#include "geodesc/image.hpp"
#include "geodesc/mesh.hpp"

namespace geodesc {

struct PatchParams {
  int angular_bins = 32;  // m
  int radial_bins = 32;   // n
  double support_mm = 75.0;

  /// Walking distance step sigma in mm.
  double step() const { return support_mm / radial_bins; }

  void validate() const {
    if (angular_bins < 1 || radial_bins < 1) throw InputError("patch: bin counts must be positive");
    if (!(support_mm > 0.0)) throw InputError("patch: support must be positive");
  }
};

/// m x n intensities sampled on a polar grid: row i is the angle 2*pi*i/m,
/// column j the radius (j + 1) * sigma. Masked entries hold 0.
struct GeodesicPatch {
  int m = 0;
  int n = 0;
  double sigma = 0.0;
  std::vector<float> values;
  std::vector<std::uint8_t> mask;  // 1 = valid

  GeodesicPatch() = default;
  GeodesicPatch(int angular, int radial, double step)
      : m(angular), n(radial), sigma(step),
        values(static_cast<std::size_t>(angular) * radial, 0.0f),
        mask(static_cast<std::size_t>(angular) * radial, 0) {}

  float value(int i, int j) const { return values[static_cast<std::size_t>(i) * n + j]; }
  bool valid(int i, int j) const { return mask[static_cast<std::size_t>(i) * n + j] != 0; }

  void set(int i, int j, double v) {
    values[static_cast<std::size_t>(i) * n + j] = static_cast<float>(v);
    mask[static_cast<std::size_t>(i) * n + j] = 1;
  }

  double masked_fraction() const {
    if (mask.empty()) return 1.0;
    std::size_t invalid = 0;
    for (auto v : mask) invalid += v == 0;
    return static_cast<double>(invalid) / static_cast<double>(mask.size());
  }

  /// Patch rotated by `bins` angular bins: row i of the result is row
  /// (i - bins) mod m of this patch.
  GeodesicPatch shifted(int bins) const {
    GeodesicPatch out(m, n, sigma);
    for (int i = 0; i < m; ++i) {
      const int src = ((i - bins) % m + m) % m;
      for (int j = 0; j < n; ++j) {
        out.values[static_cast<std::size_t>(i) * n + j] = value(src, j);
        out.mask[static_cast<std::size_t>(i) * n + j] = mask[static_cast<std::size_t>(src) * n + j];
      }
    }
    return out;
  }

  bool operator==(const GeodesicPatch&) const = default;
};

/// Where the walks of a keypoint start: the surface point under the keypoint
/// when its viewing ray hits a face, otherwise the nearest vertex.
struct PatchOrigin {
  Eigen::Vector3d position;
  int face = -1;
  int vertex = -1;
};

inline PatchOrigin locate_keypoint(const SurfaceMesh& mesh, const Eigen::Vector2d& pixel,
                                   const CameraIntrinsics& image_intrinsics) {
  if (auto hit = locate_surface_point(mesh, pixel, image_intrinsics)) return {hit->position, hit->face, -1};
  if (auto v = nearest_vertex(mesh, pixel, image_intrinsics, 3)) return {mesh.vertices[*v], -1, *v};
  throw GeometryError("keypoint not on surface");
}

/// Geodesic polar patch around `keypoint`: m walks of length n*sigma over the
/// mesh, resampled at equal arc length, projected with the image intrinsics
/// and read from `image` by bilinear interpolation.
inline GeodesicPatch build_patch(const SurfaceMesh& mesh, const IntensityImage& image, const Keypoint& keypoint,
                                 const PatchParams& params, const CameraIntrinsics& image_intrinsics) {
  params.validate();
  const PatchOrigin origin = locate_keypoint(mesh, keypoint.position, image_intrinsics);
  const int m = params.angular_bins;
  const int n = params.radial_bins;
  const double sigma = params.step();

  const auto dirs = origin.face >= 0 ? initial_directions(mesh, SurfacePoint{origin.face, origin.position}, m)
                                     : initial_directions(mesh, origin.vertex, m);
  GeodesicPatch patch(m, n, sigma);
  for (int i = 0; i < m; ++i) {
    if (!dirs[i].valid) continue;
    const auto line = trace_geodesic(mesh, WalkState{dirs[i].face, origin.position, dirs[i].direction, 0.0, -1},
                                     n * sigma);
    const auto samples = resample_polyline(line, n, sigma);
    for (int j = 0; j < n; ++j) {
      if (!samples[j] || !((*samples[j]).z() > 0.0)) continue;
      if (auto v = try_bilinear_sample(image, project(*samples[j], image_intrinsics))) patch.set(i, j, *v);
    }
  }
  return patch;
}

/// Polar patch sampled directly in the image around `center`, with radial
/// pixel steps `step_x`, `step_y` along the image axes.
inline GeodesicPatch build_image_polar_patch(const IntensityImage& image, const Eigen::Vector2d& center, int m, int n,
                                             double step_x, double step_y, double sigma = 0.0) {
  GeodesicPatch patch(m, n, sigma);
  for (int i = 0; i < m; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / m;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    for (int j = 0; j < n; ++j) {
      const Eigen::Vector2d p(center.x() + (j + 1) * step_x * c, center.y() + (j + 1) * step_y * s);
      if (auto v = try_bilinear_sample(image, p)) patch.set(i, j, *v);
    }
  }
  return patch;
}

/// Control patch with the same layout and metric support as build_patch but
/// sampled on a flat image-space polar grid scaled by the keypoint depth.
inline GeodesicPatch build_cartesian_patch(const SurfaceMesh& mesh, const IntensityImage& image,
                                           const Keypoint& keypoint, const PatchParams& params,
                                           const CameraIntrinsics& image_intrinsics) {
  params.validate();
  const PatchOrigin origin = locate_keypoint(mesh, keypoint.position, image_intrinsics);
  const double z = origin.position.z();
  const double sigma = params.step();
  return build_image_polar_patch(image, keypoint.position, params.angular_bins, params.radial_bins,
                                 sigma * image_intrinsics.fx / z, sigma * image_intrinsics.fy / z, sigma);
}

}  // namespace geodesc
