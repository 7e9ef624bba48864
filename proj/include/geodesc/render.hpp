#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "geodesc/camera.hpp"
#include "geodesc/image.hpp"

namespace geodesc {

/// Registered intensity + depth pair with the camera that produced it.
struct RgbdFrame {
  IntensityImage intensity;
  DepthImage depth;
  CameraIntrinsics intrinsics;

  void validate() const {
    if (intensity.width() != depth.width() || intensity.height() != depth.height()) {
      throw InputError("frame: intensity and depth dimensions differ");
    }
    intrinsics.validate(intensity.width(), intensity.height());
  }
};

struct RenderCamera {
  CameraIntrinsics intrinsics;
  int width = 640;
  int height = 480;
  Eigen::Isometry3d world_to_camera = Eigen::Isometry3d::Identity();
};

/// Point light at `position`, or a directional light shining from
/// `position` (interpreted as a direction towards the light) when
/// `directional` is set. Coordinates are in the world frame.
struct Light {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double strength = 1.0;
  bool directional = false;
};

struct RenderOutput {
  IntensityImage intensity;
  /// Depth rounded to whole millimeters; kInvalidDepth on background.
  DepthImage depth;
  /// Unquantized camera-space z; +inf on background.
  Image<double> zbuffer;
};

/// Scanline rasterization of a textured triangle mesh with a z-buffer, a
/// top-left fill rule, perspective-correct texture lookup and Lambertian
/// shading I = texture * sum(strength * max(0, n . l)) clamped to [0, 1].
/// Shading normals are interpolated vertex normals oriented towards the
/// camera. `uv` holds texture pixel coordinates per vertex.
inline RenderOutput rasterize(std::span<const Eigen::Vector3d> world_vertices, std::span<const Eigen::Vector2d> uv,
                              std::span<const std::array<int, 3>> triangles, const IntensityImage& texture,
                              const RenderCamera& camera, std::span<const Light> lights, double background = 0.0) {
  const int w = camera.width;
  const int h = camera.height;
  const CameraIntrinsics& k = camera.intrinsics;
  RenderOutput out{IntensityImage(w, h, background), DepthImage(w, h, kInvalidDepth),
                   Image<double>(w, h, std::numeric_limits<double>::infinity())};

  std::vector<Eigen::Vector3d> cam(world_vertices.size());
  for (std::size_t i = 0; i < cam.size(); ++i) cam[i] = camera.world_to_camera * world_vertices[i];

  std::vector<Eigen::Vector3d> normals(cam.size(), Eigen::Vector3d::Zero());
  for (const auto& t : triangles) {
    const Eigen::Vector3d n = (cam[t[1]] - cam[t[0]]).cross(cam[t[2]] - cam[t[0]]);
    for (int v : t) normals[v] += n;
  }
  for (auto& n : normals) {
    if (n.norm() > 0.0) n.normalize();
  }

  struct CamLight {
    Eigen::Vector3d vec;
    double strength;
    bool directional;
  };
  std::vector<CamLight> cam_lights;
  for (const auto& l : lights) {
    if (l.directional) {
      cam_lights.push_back({(camera.world_to_camera.linear() * l.position).normalized(), l.strength, true});
    } else {
      cam_lights.push_back({camera.world_to_camera * l.position, l.strength, false});
    }
  }

  constexpr double kNear = 1e-3;
  for (const auto& t : triangles) {
    std::array<int, 3> idx = t;
    if (cam[idx[0]].z() <= kNear || cam[idx[1]].z() <= kNear || cam[idx[2]].z() <= kNear) continue;
    std::array<Eigen::Vector2d, 3> s;
    for (int i = 0; i < 3; ++i) s[i] = project(cam[idx[i]], k);
    auto edge_fn = [](const Eigen::Vector2d& a, const Eigen::Vector2d& b, double px, double py) {
      return (b.x() - a.x()) * (py - a.y()) - (b.y() - a.y()) * (px - a.x());
    };
    double area = edge_fn(s[0], s[1], s[2].x(), s[2].y());
    if (area == 0.0) continue;
    if (area < 0.0) {
      std::swap(idx[1], idx[2]);
      std::swap(s[1], s[2]);
      area = -area;
    }
    // Edge i is opposite vertex i and runs from vertex (i+1) to (i+2).
    std::array<bool, 3> top_left{};
    for (int i = 0; i < 3; ++i) {
      const Eigen::Vector2d& a = s[(i + 1) % 3];
      const Eigen::Vector2d& b = s[(i + 2) % 3];
      const double dx = b.x() - a.x();
      const double dy = b.y() - a.y();
      top_left[i] = (dy == 0.0 && dx > 0.0) || dy < 0.0;
    }
    const int y0 = std::max(0, static_cast<int>(std::ceil(std::min({s[0].y(), s[1].y(), s[2].y()}))));
    const int y1 = std::min(h - 1, static_cast<int>(std::floor(std::max({s[0].y(), s[1].y(), s[2].y()}))));
    const int x0 = std::max(0, static_cast<int>(std::ceil(std::min({s[0].x(), s[1].x(), s[2].x()}))));
    const int x1 = std::min(w - 1, static_cast<int>(std::floor(std::max({s[0].x(), s[1].x(), s[2].x()}))));
    const std::array<double, 3> inv_z{1.0 / cam[idx[0]].z(), 1.0 / cam[idx[1]].z(), 1.0 / cam[idx[2]].z()};

    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        std::array<double, 3> bary{};
        bool inside = true;
        for (int i = 0; i < 3 && inside; ++i) {
          const double e = edge_fn(s[(i + 1) % 3], s[(i + 2) % 3], x, y);
          inside = e > 0.0 || (e == 0.0 && top_left[i]);
          bary[i] = e / area;
        }
        if (!inside) continue;
        double wsum = 0.0;
        std::array<double, 3> pc{};
        for (int i = 0; i < 3; ++i) {
          pc[i] = bary[i] * inv_z[i];
          wsum += pc[i];
        }
        const double z = 1.0 / wsum;
        if (z >= out.zbuffer(x, y)) continue;
        for (auto& p : pc) p *= z;  // perspective-correct barycentrics

        Eigen::Vector2d tex = Eigen::Vector2d::Zero();
        Eigen::Vector3d pos = Eigen::Vector3d::Zero();
        Eigen::Vector3d n = Eigen::Vector3d::Zero();
        for (int i = 0; i < 3; ++i) {
          tex += pc[i] * uv[idx[i]];
          pos += pc[i] * cam[idx[i]];
          n += pc[i] * normals[idx[i]];
        }
        if (n.norm() > 0.0) n.normalize();
        if (n.dot(-pos) < 0.0) n = -n;

        double shade = 0.0;
        for (const auto& l : cam_lights) {
          const Eigen::Vector3d dir = l.directional ? l.vec : (l.vec - pos).normalized();
          shade += l.strength * std::max(0.0, n.dot(dir));
        }
        tex.x() = std::clamp(tex.x(), 0.0, texture.width() - 1.0);
        tex.y() = std::clamp(tex.y(), 0.0, texture.height() - 1.0);
        out.zbuffer(x, y) = z;
        out.depth(x, y) = std::max(1.0, std::round(z));
        out.intensity(x, y) = std::clamp(bilinear_sample(texture, tex) * shade, 0.0, 1.0);
      }
    }
  }
  return out;
}

}  // namespace geodesc
