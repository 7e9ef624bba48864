#pragma once

// Shared scene builders for the test suites.

#include <cmath>
#include <numbers>
#include <optional>
#include <queue>
#include <vector>

#include "geodesc/geodesc.hpp"

namespace geodesc::testing {

inline DepthImage constant_depth(int w, int h, double d) { return DepthImage(w, h, d); }

/// Depth of a vertical cylinder (axis parallel to the image y-axis) of radius
/// `radius` whose axis passes through (0, *, axis_z), seen from the origin.
inline DepthImage cylinder_depth(int w, int h, const CameraIntrinsics& k, double radius, double axis_z) {
  DepthImage depth(w, h, kInvalidDepth);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double rx = (x - k.cx) / k.fx;
      // Ray (rx t, ry t, t) meets x^2 + (z - axis_z)^2 = R^2.
      const double a = rx * rx + 1.0;
      const double b = -2.0 * axis_z;
      const double c = axis_z * axis_z - radius * radius;
      const double disc = b * b - 4.0 * a * c;
      if (disc < 0.0) continue;
      const double t = (-b - std::sqrt(disc)) / (2.0 * a);
      if (t > 0.0) depth(x, y) = t;
    }
  }
  return depth;
}

/// Radially symmetric intensity pattern centered at `c`.
inline IntensityImage radial_image(int w, int h, const Eigen::Vector2d& c, double period) {
  IntensityImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double r = (Eigen::Vector2d(x, y) - c).norm();
      img(x, y) = 0.5 + 0.4 * std::cos(2.0 * std::numbers::pi * r / period);
    }
  }
  return img;
}

/// Smooth random texture in [0, 1].
inline IntensityImage smooth_texture(int w, int h, std::uint64_t seed, double blur = 2.0) {
  Rng rng(seed);
  IntensityImage img(w, h);
  for (auto& v : img.pixels()) v = rng.uniform();
  return gaussian_blur(img, blur);
}

inline IntensityImage checkerboard(int w, int h, int square, int offset = 0) {
  IntensityImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) img(x, y) = (((x + offset) / square + (y + offset) / square) % 2) ? 1.0 : 0.0;
  }
  return img;
}

/// Mesh with a single triangle (and no neighbours).
inline SurfaceMesh triangle_mesh(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
  SurfaceMesh mesh;
  mesh.vertices = {a, b, c};
  mesh.faces = {{0, 1, 2}};
  mesh.normals = {(b - a).cross(c - a).normalized()};
  mesh.neighbor_face = {{-1, -1, -1}};
  mesh.neighbor_edge = {{-1, -1, -1}};
  mesh.vertex_faces = {{0}, {0}, {0}};
  return mesh;
}

/// Shortest edge-graph distances from `source` over the mesh.
inline std::vector<double> dijkstra(const SurfaceMesh& mesh, int source) {
  std::vector<std::vector<std::pair<int, double>>> adj(mesh.vertices.size());
  for (const auto& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      const int a = f[k];
      const int b = f[(k + 1) % 3];
      const double len = (mesh.vertices[a] - mesh.vertices[b]).norm();
      adj[a].push_back({b, len});
      adj[b].push_back({a, len});
    }
  }
  std::vector<double> dist(mesh.vertices.size(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[source] = 0.0;
  queue.push({0.0, source});
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[v]) continue;
    for (const auto& [w, len] : adj[v]) {
      if (d + len < dist[w]) {
        dist[w] = d + len;
        queue.push({dist[w], w});
      }
    }
  }
  return dist;
}

/// Face of `mesh` containing `p` (within tolerance), by brute force.
inline int face_containing(const SurfaceMesh& mesh, const Eigen::Vector3d& p, double tol = 1e-6) {
  for (int f = 0; f < mesh.face_count(); ++f) {
    const Eigen::Vector3d a = mesh.corner(f, 0);
    const Eigen::Vector3d b = mesh.corner(f, 1);
    const Eigen::Vector3d c = mesh.corner(f, 2);
    const Eigen::Vector3d n = (b - a).cross(c - a);
    const double area2 = n.squaredNorm();
    if (area2 <= 0.0) continue;
    if (std::abs((p - a).dot(n.normalized())) > tol) continue;
    const double u = (c - b).cross(p - b).dot(n) / area2;
    const double v = (a - c).cross(p - c).dot(n) / area2;
    const double w = 1.0 - u - v;
    if (u >= -tol && v >= -tol && w >= -tol) return f;
  }
  return -1;
}

/// Normalized cross-correlation over entries valid in both patches.
inline std::optional<double> patch_ncc(const GeodesicPatch& a, const GeodesicPatch& b) {
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  int count = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    if (!a.mask[i] || !b.mask[i]) continue;
    const double x = a.values[i];
    const double y = b.values[i];
    sa += x;
    sb += y;
    saa += x * x;
    sbb += y * y;
    sab += x * y;
    ++count;
  }
  if (count < 2) return std::nullopt;
  const double va = saa - sa * sa / count;
  const double vb = sbb - sb * sb / count;
  if (va <= 1e-12 || vb <= 1e-12) return std::nullopt;
  return (sab - sa * sb / count) / std::sqrt(va * vb);
}

/// Small, quick simulation settings for tests.
inline SimulationParams quick_params(std::uint64_t seed, int frames) {
  SimulationParams p;
  p.seed = seed;
  p.frames = frames;
  p.sweeps.enabled = false;
  return p;
}

}  // namespace geodesc::testing
