#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "geodesc/camera.hpp"
#include "geodesc/image.hpp"

namespace geodesc {

/// Triangulated depth surface. Face `f` has corners faces[f][0..2]; local edge
/// k runs from corner k to corner (k + 1) % 3. Normals face the camera.
struct SurfaceMesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<Eigen::Vector2i> vertex_pixels;
  std::vector<std::array<int, 3>> faces;
  std::vector<Eigen::Vector3d> normals;
  /// Face across local edge k, or -1 on a boundary.
  std::vector<std::array<int, 3>> neighbor_face;
  /// Local edge index of the shared edge as seen from the neighbor face.
  std::vector<std::array<std::int8_t, 3>> neighbor_edge;
  /// Faces incident to each vertex.
  std::vector<std::vector<int>> vertex_faces;
  /// Vertex index per mesh-resolution pixel, -1 where depth is INVALID.
  Image<int> pixel_vertex;
  /// The two faces of the quad whose top-left pixel is (x, y); -1 if absent.
  /// Slot 0 is the upper-right triangle (TL, BR, TR), slot 1 the lower-left
  /// one (TL, BL, BR).
  Image<std::array<int, 2>> quad_faces;
  CameraIntrinsics intrinsics;

  int face_count() const { return static_cast<int>(faces.size()); }
  int vertex_count() const { return static_cast<int>(vertices.size()); }

  Eigen::Vector3d corner(int face, int k) const { return vertices[faces[face][k]]; }

  /// Endpoints of local edge k of `face`.
  std::pair<Eigen::Vector3d, Eigen::Vector3d> edge(int face, int k) const {
    return {vertices[faces[face][k]], vertices[faces[face][(k + 1) % 3]]};
  }
};

struct TriangulationOptions {
  /// Skip faces whose longest edge exceeds this multiple of the local pixel
  /// footprint (depth / fx). Zero disables the check.
  double max_edge_pixel_ratio = 0.0;
};

namespace detail {

inline void build_adjacency(SurfaceMesh& mesh) {
  const auto nf = mesh.faces.size();
  mesh.neighbor_face.assign(nf, {-1, -1, -1});
  mesh.neighbor_edge.assign(nf, {-1, -1, -1});
  mesh.vertex_faces.assign(mesh.vertices.size(), {});

  struct Slot {
    int face = -1;
    int edge = -1;
    int uses = 0;
  };
  std::unordered_map<std::uint64_t, Slot> edges;
  edges.reserve(nf * 2);
  std::vector<std::uint64_t> non_manifold;
  for (int f = 0; f < static_cast<int>(nf); ++f) {
    for (int k = 0; k < 3; ++k) {
      mesh.vertex_faces[mesh.faces[f][k]].push_back(f);
      const auto a = static_cast<std::uint32_t>(mesh.faces[f][k]);
      const auto b = static_cast<std::uint32_t>(mesh.faces[f][(k + 1) % 3]);
      const std::uint64_t key = (static_cast<std::uint64_t>(std::min(a, b)) << 32) | std::max(a, b);
      auto& slot = edges[key];
      ++slot.uses;
      if (slot.uses == 1) {
        slot.face = f;
        slot.edge = k;
      } else if (slot.uses == 2) {
        mesh.neighbor_face[f][k] = slot.face;
        mesh.neighbor_edge[f][k] = static_cast<std::int8_t>(slot.edge);
        mesh.neighbor_face[slot.face][slot.edge] = f;
        mesh.neighbor_edge[slot.face][slot.edge] = static_cast<std::int8_t>(k);
      } else {
        non_manifold.push_back(key);
      }
    }
  }
  // Edges shared by more than two faces are treated as boundaries.
  for (auto key : non_manifold) {
    const auto& slot = edges[key];
    const int f = slot.face;
    const int k = slot.edge;
    const int g = mesh.neighbor_face[f][k];
    if (g >= 0) {
      mesh.neighbor_face[g][mesh.neighbor_edge[f][k]] = -1;
      mesh.neighbor_edge[g][mesh.neighbor_edge[f][k]] = -1;
    }
    mesh.neighbor_face[f][k] = -1;
    mesh.neighbor_edge[f][k] = -1;
  }
}

}  // namespace detail

/// Connects 4-neighboring valid pixels into triangles. Every 2x2 quad of
/// valid pixels is split along its top-left to bottom-right diagonal;
/// vertices are the backprojected valid pixels.
inline SurfaceMesh triangulate_depth(const DepthImage& depth, const CameraIntrinsics& intrinsics,
                                     const TriangulationOptions& options = {}) {
  SurfaceMesh mesh;
  mesh.intrinsics = intrinsics;
  mesh.pixel_vertex = Image<int>(depth.width(), depth.height(), -1);
  mesh.quad_faces = Image<std::array<int, 2>>(std::max(depth.width() - 1, 0), std::max(depth.height() - 1, 0),
                                               std::array<int, 2>{-1, -1});

  for (int y = 0; y < depth.height(); ++y) {
    for (int x = 0; x < depth.width(); ++x) {
      const double d = depth(x, y);
      if (!is_valid_depth(d)) continue;
      mesh.pixel_vertex(x, y) = static_cast<int>(mesh.vertices.size());
      mesh.vertices.push_back(backproject(Eigen::Vector2d(x, y), d, intrinsics));
      mesh.vertex_pixels.emplace_back(x, y);
    }
  }
  if (mesh.vertices.size() < 3) throw GeometryError("degenerate mesh");

  auto try_add = [&](int a, int b, int c) -> int {
    const Eigen::Vector3d& pa = mesh.vertices[a];
    const Eigen::Vector3d& pb = mesh.vertices[b];
    const Eigen::Vector3d& pc = mesh.vertices[c];
    const Eigen::Vector3d cross = (pb - pa).cross(pc - pa);
    const double norm = cross.norm();
    const double scale = std::max({(pb - pa).squaredNorm(), (pc - pa).squaredNorm(), (pc - pb).squaredNorm()});
    if (!(norm > 1e-12 * scale) || scale == 0.0) return -1;
    if (options.max_edge_pixel_ratio > 0.0) {
      const double footprint = std::max({pa.z(), pb.z(), pc.z()}) / intrinsics.fx;
      if (std::sqrt(scale) > options.max_edge_pixel_ratio * footprint) return -1;
    }
    Eigen::Vector3d n = cross / norm;
    if (n.dot(-pa) < 0.0) return -1;  // back-facing: only possible on degenerate geometry
    mesh.faces.push_back({a, b, c});
    mesh.normals.push_back(n);
    return static_cast<int>(mesh.faces.size()) - 1;
  };

  for (int y = 0; y + 1 < depth.height(); ++y) {
    for (int x = 0; x + 1 < depth.width(); ++x) {
      const int tl = mesh.pixel_vertex(x, y);
      const int tr = mesh.pixel_vertex(x + 1, y);
      const int bl = mesh.pixel_vertex(x, y + 1);
      const int br = mesh.pixel_vertex(x + 1, y + 1);
      if (tl < 0 || tr < 0 || bl < 0 || br < 0) continue;
      mesh.quad_faces(x, y) = {try_add(tl, br, tr), try_add(tl, bl, br)};
    }
  }
  detail::build_adjacency(mesh);
  return mesh;
}

/// A point on the surface together with the face containing it.
struct SurfacePoint {
  int face = -1;
  Eigen::Vector3d position;
};

/// Intersects the viewing ray through `pixel` (given in the coordinates of
/// `image_intrinsics`) with the mesh face under it.
inline std::optional<SurfacePoint> locate_surface_point(const SurfaceMesh& mesh, const Eigen::Vector2d& pixel,
                                                        const CameraIntrinsics& image_intrinsics) {
  const Eigen::Vector3d ray = pixel_ray(pixel, image_intrinsics);
  const double mx = mesh.intrinsics.fx * ray.x() + mesh.intrinsics.cx;
  const double my = mesh.intrinsics.fy * ray.y() + mesh.intrinsics.cy;
  const int qx = static_cast<int>(std::floor(mx));
  const int qy = static_cast<int>(std::floor(my));
  if (!mesh.quad_faces.contains(qx, qy)) return std::nullopt;
  const double fx = mx - qx;
  const double fy = my - qy;
  const int face = mesh.quad_faces(qx, qy)[fx >= fy ? 0 : 1];
  if (face < 0) return std::nullopt;
  const Eigen::Vector3d& n = mesh.normals[face];
  const double denom = n.dot(ray);
  if (std::abs(denom) < 1e-15) return std::nullopt;
  const double t = n.dot(mesh.corner(face, 0)) / denom;
  if (!(t > 0.0)) return std::nullopt;
  return SurfacePoint{face, t * ray};
}

/// Nearest vertex (by image distance) within `radius` mesh pixels of `pixel`.
inline std::optional<int> nearest_vertex(const SurfaceMesh& mesh, const Eigen::Vector2d& pixel,
                                         const CameraIntrinsics& image_intrinsics, int radius = 3) {
  const Eigen::Vector3d ray = pixel_ray(pixel, image_intrinsics);
  const double mx = mesh.intrinsics.fx * ray.x() + mesh.intrinsics.cx;
  const double my = mesh.intrinsics.fy * ray.y() + mesh.intrinsics.cy;
  const int cx = static_cast<int>(std::lround(mx));
  const int cy = static_cast<int>(std::lround(my));
  std::optional<int> best;
  double best_d2 = static_cast<double>(radius) * radius + 1e-9;
  for (int y = cy - radius; y <= cy + radius; ++y) {
    for (int x = cx - radius; x <= cx + radius; ++x) {
      if (!mesh.pixel_vertex.contains(x, y)) continue;
      const int v = mesh.pixel_vertex(x, y);
      if (v < 0 || mesh.vertex_faces[v].empty()) continue;
      const double d2 = (x - mx) * (x - mx) + (y - my) * (y - my);
      if (d2 < best_d2) {
        best_d2 = d2;
        best = v;
      }
    }
  }
  return best;
}

}  // namespace geodesc
