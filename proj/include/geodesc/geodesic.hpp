#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "geodesc/camera.hpp"
#include "geodesc/error.hpp"
#include "geodesc/mesh.hpp"

namespace geodesc {

struct Keypoint {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  double response = 0.0;
  std::uint32_t id = 0;
  std::optional<double> orientation;
  std::optional<double> scale;
};

/// Position of a geodesic walk: a point on `face`, a unit direction tangent to
/// that face, and the arc length travelled so far. `entry_edge` is the local
/// edge the walk came through (-1 at the start).
struct WalkState {
  int face = -1;
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
  Eigen::Vector3d direction = Eigen::Vector3d::UnitX();
  double arc_length = 0.0;
  int entry_edge = -1;
};

struct EdgeCrossing {
  Eigen::Vector3d point;
  int exit_edge = -1;
  double distance = 0.0;
};

struct GeodesicPolyline {
  std::vector<Eigen::Vector3d> points;
  std::vector<double> arc_lengths;
  bool hit_boundary = false;
  bool stalled = false;

  double length() const { return arc_lengths.empty() ? 0.0 : arc_lengths.back(); }
};

/// Starting direction of one angular bin; `valid` is false when the direction
/// leaves the surface right at the origin (boundary vertex).
struct InitialDirection {
  int face = -1;
  Eigen::Vector3d direction = Eigen::Vector3d::Zero();
  bool valid = false;
};

/// Unit vector in the plane (point, normal) that projects onto the image +x
/// direction at `point`. Falls back to the projection of the camera x-axis
/// when the plane is seen edge-on.
inline Eigen::Vector3d image_x_on_plane(const Eigen::Vector3d& point, const Eigen::Vector3d& normal,
                                        const CameraIntrinsics& intrinsics) {
  const Eigen::Vector3d ray = pixel_ray(project(point, intrinsics) + Eigen::Vector2d(1.0, 0.0), intrinsics);
  const double denom = normal.dot(ray);
  if (std::abs(denom) > 1e-9 * ray.norm()) {
    const double t = normal.dot(point) / denom;
    if (t > 0.0) {
      Eigen::Vector3d along = t * ray - point;
      along -= along.dot(normal) * normal;
      if (along.norm() > 1e-12) return along.normalized();
    }
  }
  Eigen::Vector3d fallback = Eigen::Vector3d::UnitX() - normal.x() * normal;
  if (fallback.norm() < 1e-12) fallback = Eigen::Vector3d::UnitY() - normal.y() * normal;
  return fallback.normalized();
}

/// Directions at angles 2*pi*i/m in the tangent frame (e1, e1 x n) of a face,
/// where e1 is the image x-axis carried onto the face plane.
inline std::vector<InitialDirection> initial_directions(const SurfaceMesh& mesh, const SurfacePoint& origin, int m) {
  const Eigen::Vector3d& n = mesh.normals[origin.face];
  const Eigen::Vector3d e1 = image_x_on_plane(origin.position, n, mesh.intrinsics);
  const Eigen::Vector3d e2 = e1.cross(n);
  std::vector<InitialDirection> out(m);
  for (int i = 0; i < m; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / m;
    out[i] = {origin.face, (std::cos(theta) * e1 + std::sin(theta) * e2).normalized(), true};
  }
  return out;
}

/// Directions at angles 2*pi*i/m around a vertex. The tangent plane uses the
/// area-weighted normal of the one-ring; each direction is assigned to the
/// incident face whose corner wedge contains it and then projected onto that
/// face's plane.
inline std::vector<InitialDirection> initial_directions(const SurfaceMesh& mesh, int vertex, int m) {
  if (vertex < 0 || vertex >= mesh.vertex_count()) throw InputError("vertex index out of range");
  const auto& ring = mesh.vertex_faces[vertex];
  if (ring.empty()) throw GeometryError("no incident faces");

  const Eigen::Vector3d& p = mesh.vertices[vertex];
  Eigen::Vector3d normal = Eigen::Vector3d::Zero();
  for (int f : ring) {
    normal += (mesh.corner(f, 1) - mesh.corner(f, 0)).cross(mesh.corner(f, 2) - mesh.corner(f, 0));
  }
  normal.normalize();
  const Eigen::Vector3d e1 = image_x_on_plane(p, normal, mesh.intrinsics);
  const Eigen::Vector3d e2 = e1.cross(normal);

  struct Wedge {
    int face;
    Eigen::Vector2d a;  // first edge leaving the vertex in winding order
    Eigen::Vector2d b;
  };
  std::vector<Wedge> wedges;
  wedges.reserve(ring.size());
  for (int f : ring) {
    int k = 0;
    while (mesh.faces[f][k] != vertex) ++k;
    const Eigen::Vector3d ea = mesh.corner(f, (k + 1) % 3) - p;
    const Eigen::Vector3d eb = mesh.corner(f, (k + 2) % 3) - p;
    wedges.push_back({f, Eigen::Vector2d(ea.dot(e1), ea.dot(e2)).normalized(),
                      Eigen::Vector2d(eb.dot(e1), eb.dot(e2)).normalized()});
  }
  auto cross2 = [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); };

  std::vector<InitialDirection> out(m);
  for (int i = 0; i < m; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / m;
    const Eigen::Vector2d d(std::cos(theta), std::sin(theta));
    // In the (e1, e2) frame the face winding runs clockwise, so the wedge
    // spans from b counter-clockwise to a.
    int best_face = -1;
    double best_margin = -1e-9;
    for (const auto& w : wedges) {
      if (w.a.dot(d) < -0.5 && w.b.dot(d) < -0.5) continue;
      const double margin = std::min(-cross2(w.a, d), -cross2(d, w.b));
      if (margin > best_margin) {
        best_margin = margin;
        best_face = w.face;
      }
    }
    if (best_face < 0) continue;
    const Eigen::Vector3d& fn = mesh.normals[best_face];
    Eigen::Vector3d dir = std::cos(theta) * e1 + std::sin(theta) * e2;
    dir -= dir.dot(fn) * fn;
    if (dir.norm() < 1e-12) continue;
    out[i] = {best_face, dir.normalized(), true};
  }
  return out;
}

/// First crossing of the ray (state.point, state.direction) with an edge of
/// state.face, from the line-plane intersection against the plane spanned by
/// the face normal and each candidate edge. Crossings within 1e-6 mm of an
/// edge endpoint are moved 1e-6 mm into the edge so that the walk continues
/// into a well-defined neighbor.
inline EdgeCrossing edge_intersect(const SurfaceMesh& mesh, const WalkState& state) {
  constexpr double kParallel = 1e-12;
  constexpr double kVertexGap = 1e-6;
  const Eigen::Vector3d& n = mesh.normals[state.face];
  const Eigen::Vector3d& u = state.direction;

  int best_edge = -1;
  double best_d = std::numeric_limits<double>::infinity();
  double best_alignment = 0.0;
  for (int k = 0; k < 3; ++k) {
    if (k == state.entry_edge) continue;
    const auto [v_out, v_end] = mesh.edge(state.face, k);
    const Eigen::Vector3d edge = v_end - v_out;
    const Eigen::Vector3d n_p = n.cross(edge).normalized();  // points into the face
    const double approach = u.dot(n_p);
    if (approach > -kParallel) continue;  // parallel or moving inward
    const double d = std::max(0.0, (v_out - state.point).dot(n_p) / approach);
    // Ties happen when the ray hits a vertex exactly; prefer the edge that is
    // crossed most squarely.
    const bool tie = std::abs(d - best_d) <= 1e-12 * std::max(1.0, d);
    if (d < best_d && !tie) {
      best_d = d;
      best_edge = k;
      best_alignment = -approach;
    } else if (tie && -approach > best_alignment) {
      best_d = std::min(best_d, d);
      best_edge = k;
      best_alignment = -approach;
    }
  }
  if (best_edge < 0 || !std::isfinite(best_d)) throw GeometryError("walk stalled");

  const auto [a, b] = mesh.edge(state.face, best_edge);
  const Eigen::Vector3d hit = state.point + best_d * u;
  const Eigen::Vector3d ab = b - a;
  const double len = ab.norm();
  double t = std::clamp((hit - a).dot(ab) / (len * len), 0.0, 1.0);
  const double gap = std::min(kVertexGap / len, 0.5);
  t = std::clamp(t, gap, 1.0 - gap);
  const Eigen::Vector3d on_edge = a + t * ab;
  return {on_edge, best_edge, (on_edge - state.point).norm()};
}

/// Rotates `u` about n1 x n2 by the angle between the two face normals
/// (Rodrigues' formula), carrying a direction on face 1 onto face 2 as if the
/// two faces were unfolded into one plane.
inline Eigen::Vector3d unfold_direction(const Eigen::Vector3d& u, const Eigen::Vector3d& n1, const Eigen::Vector3d& n2) {
  const Eigen::Vector3d axis = n1.cross(n2);
  const double sin_phi = axis.norm();
  const double cos_phi = n1.dot(n2);
  if (sin_phi < 1e-12 && cos_phi > 0.0) return u;
  Eigen::Vector3d k;
  if (sin_phi < 1e-12) {
    // Antiparallel normals: fold back about any axis orthogonal to n1 and u.
    k = n1.cross(u);
    if (k.norm() < 1e-12) return -u;
    k.normalize();
  } else {
    k = axis / sin_phi;
  }
  const double phi = std::atan2(sin_phi, cos_phi);
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  return u * c + k.cross(u) * s + k * k.dot(u) * (1.0 - c);
}

/// Straightest walk from `start` until at least `max_dist` mm of arc length
/// has been covered, the mesh boundary is reached, or the walk stalls.
inline GeodesicPolyline trace_geodesic(const SurfaceMesh& mesh, WalkState state, double max_dist) {
  constexpr int kMaxSteps = 1 << 20;
  GeodesicPolyline line;
  line.points.push_back(state.point);
  line.arc_lengths.push_back(state.arc_length);

  for (int step = 0; state.arc_length < max_dist; ++step) {
    if (step >= kMaxSteps) {
      line.stalled = true;
      break;
    }
    EdgeCrossing crossing;
    try {
      crossing = edge_intersect(mesh, state);
    } catch (const GeometryError&) {
      line.stalled = true;
      break;
    }
    if (crossing.distance > 0.0) {
      state.arc_length += crossing.distance;
      line.points.push_back(crossing.point);
      line.arc_lengths.push_back(state.arc_length);
    }
    state.point = crossing.point;

    const int next = mesh.neighbor_face[state.face][crossing.exit_edge];
    if (next < 0) {
      line.hit_boundary = true;
      break;
    }
    const Eigen::Vector3d& n1 = mesh.normals[state.face];
    const Eigen::Vector3d& n2 = mesh.normals[next];
    Eigen::Vector3d u = unfold_direction(state.direction, n1, n2);
    u -= u.dot(n2) * n2;
    const double norm = u.norm();
    if (norm < 1e-12) {
      line.stalled = true;
      break;
    }
    state.direction = u / norm;
    state.entry_edge = mesh.neighbor_edge[state.face][crossing.exit_edge];
    state.face = next;
  }
  return line;
}

/// Walk along the i-th of m initial directions around `vertex`.
inline GeodesicPolyline trace_geodesic(const SurfaceMesh& mesh, int vertex, int m, int i, double max_dist) {
  const auto dirs = initial_directions(mesh, vertex, m);
  const auto& dir = dirs.at(static_cast<std::size_t>(i));
  if (!dir.valid) {
    GeodesicPolyline line;
    line.points.push_back(mesh.vertices[vertex]);
    line.arc_lengths.push_back(0.0);
    line.hit_boundary = true;
    return line;
  }
  return trace_geodesic(mesh, WalkState{dir.face, mesh.vertices[vertex], dir.direction, 0.0, -1}, max_dist);
}

/// Points at arc lengths sigma, 2 sigma, ..., n sigma along the polyline,
/// linearly interpolated between crossings; nullopt past the polyline's end.
inline std::vector<std::optional<Eigen::Vector3d>> resample_polyline(const GeodesicPolyline& line, int n,
                                                                     double sigma) {
  std::vector<std::optional<Eigen::Vector3d>> out(static_cast<std::size_t>(std::max(n, 0)));
  if (line.points.empty()) return out;
  const double start = line.arc_lengths.front();
  std::size_t seg = 0;
  for (int j = 1; j <= n; ++j) {
    const double target = start + j * sigma;
    if (target > line.length() + 1e-9) break;
    while (seg + 1 < line.points.size() && line.arc_lengths[seg + 1] < target) ++seg;
    if (seg + 1 >= line.points.size()) {
      out[j - 1] = line.points.back();
      continue;
    }
    const double l0 = line.arc_lengths[seg];
    const double l1 = line.arc_lengths[seg + 1];
    const double t = l1 > l0 ? std::clamp((target - l0) / (l1 - l0), 0.0, 1.0) : 0.0;
    out[j - 1] = line.points[seg] + t * (line.points[seg + 1] - line.points[seg]);
  }
  return out;
}

}  // namespace geodesc
