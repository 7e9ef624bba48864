#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "geodesc/error.hpp"

namespace geodesc {

struct DistanceConstraint {
  int a = 0;
  int b = 0;
  double rest = 0.0;

  bool operator==(const DistanceConstraint&) const = default;
};

/// Grid of particles integrated with damped Verlet steps. Particle (col, row)
/// is stored at row * cols + col; row 0 is the top edge.
struct ClothState {
  int cols = 0;
  int rows = 0;
  std::vector<Eigen::Vector3d> position;
  std::vector<Eigen::Vector3d> previous;
  std::vector<Eigen::Vector3d> acceleration;
  std::vector<std::uint8_t> pinned;
  std::vector<DistanceConstraint> constraints;
  double mass = 1.0;
  double damping = 0.01;
  double dt2 = 0.175;

  int index(int col, int row) const { return row * cols + col; }
  int particle_count() const { return cols * rows; }

  bool operator==(const ClothState&) const = default;
};

struct ClothOptions {
  int cols = 80;
  int rows = 60;
  double width_mm = 500.0;
  /// Center of the initially flat, fronto-parallel sheet.
  Eigen::Vector3d center{0.0, 0.0, 800.0};
  bool pin_top_row = true;
  double mass = 1.0;
  double damping = 0.01;
  double dt2 = 0.175;
};

/// Flat sheet in the z = center.z plane with square spacing. Constraints link
/// horizontal, vertical and top-left to bottom-right diagonal neighbours, the
/// edges of the rendered triangle mesh.
inline ClothState make_cloth(const ClothOptions& options = {}) {
  if (options.cols < 2 || options.rows < 2) throw InputError("cloth: need at least 2x2 particles");
  if (!(options.mass > 0.0)) throw InputError("cloth: mass must be positive");
  ClothState s;
  s.cols = options.cols;
  s.rows = options.rows;
  s.mass = options.mass;
  s.damping = options.damping;
  s.dt2 = options.dt2;
  const double spacing = options.width_mm / (options.cols - 1);
  const double height = spacing * (options.rows - 1);
  const auto count = static_cast<std::size_t>(s.particle_count());
  s.position.resize(count);
  s.acceleration.assign(count, Eigen::Vector3d::Zero());
  s.pinned.assign(count, 0);
  for (int r = 0; r < s.rows; ++r) {
    for (int c = 0; c < s.cols; ++c) {
      s.position[s.index(c, r)] = options.center + Eigen::Vector3d(-0.5 * options.width_mm + c * spacing,
                                                                   -0.5 * height + r * spacing, 0.0);
    }
  }
  s.previous = s.position;
  if (options.pin_top_row) {
    for (int c = 0; c < s.cols; ++c) s.pinned[s.index(c, 0)] = 1;
  }
  auto link = [&](int a, int b) { s.constraints.push_back({a, b, (s.position[a] - s.position[b]).norm()}); };
  for (int r = 0; r < s.rows; ++r) {
    for (int c = 0; c < s.cols; ++c) {
      if (c + 1 < s.cols) link(s.index(c, r), s.index(c + 1, r));
      if (r + 1 < s.rows) link(s.index(c, r), s.index(c, r + 1));
      if (c + 1 < s.cols && r + 1 < s.rows) link(s.index(c, r), s.index(c + 1, r + 1));
    }
  }
  return s;
}

/// Newton's second law: a += f / m for every free particle.
inline ClothState accumulate_force(ClothState state, std::span<const Eigen::Vector3d> forces) {
  if (!(state.mass > 0.0)) throw InputError("cloth: mass must be positive");
  if (forces.size() != state.position.size()) throw InputError("cloth: one force per particle expected");
  for (std::size_t i = 0; i < forces.size(); ++i) {
    if (!state.pinned[i]) state.acceleration[i] += forces[i] / state.mass;
  }
  return state;
}

inline ClothState accumulate_force(ClothState state, const Eigen::Vector3d& force) {
  if (!(state.mass > 0.0)) throw InputError("cloth: mass must be positive");
  for (std::size_t i = 0; i < state.position.size(); ++i) {
    if (!state.pinned[i]) state.acceleration[i] += force / state.mass;
  }
  return state;
}

/// p_next = p + (p - p_prev)(1 - damping) + a dt^2; the acceleration is then
/// cleared.
inline ClothState verlet_step(ClothState state) {
  for (std::size_t i = 0; i < state.position.size(); ++i) {
    if (!state.pinned[i]) {
      const Eigen::Vector3d current = state.position[i];
      state.position[i] += (current - state.previous[i]) * (1.0 - state.damping) + state.acceleration[i] * state.dt2;
      state.previous[i] = current;
    }
    state.acceleration[i].setZero();
  }
  return state;
}

/// Gauss-Seidel sweeps moving both ends of each constraint by half of the
/// correction (p_b - p_a)(1 - rest / |p_b - p_a|). A pinned end stays put and
/// its partner takes the full correction.
inline ClothState satisfy_constraints(ClothState state, int iterations = 25) {
  for (int it = 0; it < iterations; ++it) {
    for (const auto& c : state.constraints) {
      Eigen::Vector3d& pa = state.position[c.a];
      Eigen::Vector3d& pb = state.position[c.b];
      const Eigen::Vector3d delta = pb - pa;
      const double dist = delta.norm();
      if (dist <= 0.0) continue;
      const Eigen::Vector3d correction = delta * (1.0 - c.rest / dist);
      const bool fa = state.pinned[c.a] != 0;
      const bool fb = state.pinned[c.b] != 0;
      if (!fa && !fb) {
        pa += 0.5 * correction;
        pb -= 0.5 * correction;
      } else if (fa && !fb) {
        pb -= correction;
      } else if (!fa && fb) {
        pa += correction;
      }
    }
  }
  return state;
}

/// max |(|p_a - p_b| - rest)| / rest over all constraints.
inline double max_relative_violation(const ClothState& state) {
  double worst = 0.0;
  for (const auto& c : state.constraints) {
    const double d = (state.position[c.a] - state.position[c.b]).norm();
    worst = std::max(worst, std::abs(d - c.rest) / c.rest);
  }
  return worst;
}

inline double total_constraint_length(const ClothState& state) {
  double total = 0.0;
  for (const auto& c : state.constraints) total += (state.position[c.a] - state.position[c.b]).norm();
  return total;
}

inline double total_rest_length(const ClothState& state) {
  double total = 0.0;
  for (const auto& c : state.constraints) total += c.rest;
  return total;
}

/// Sum of squared per-step displacements, a proxy for kinetic energy.
inline double kinetic_proxy(const ClothState& state) {
  double total = 0.0;
  for (std::size_t i = 0; i < state.position.size(); ++i) total += (state.position[i] - state.previous[i]).squaredNorm();
  return total;
}

/// Pressure-style wind: every triangle of the grid pushes its three corners
/// along its normal by (n . wind) scaled to the triangle's share of area, so
/// a sheet facing the wind receives about `wind` per particle.
inline std::vector<Eigen::Vector3d> wind_forces(const ClothState& state, const Eigen::Vector3d& wind,
                                                std::span<const double> pressure_scale = {}) {
  std::vector<Eigen::Vector3d> forces(state.position.size(), Eigen::Vector3d::Zero());
  if (!pressure_scale.empty() && pressure_scale.size() != state.position.size()) {
    throw InputError("cloth: one pressure scale per particle expected");
  }
  if (state.constraints.empty()) return forces;
  const double spacing = state.constraints.front().rest;
  const double cell_area = spacing * spacing;
  auto push = [&](int a, int b, int c) {
    const Eigen::Vector3d cross = (state.position[b] - state.position[a]).cross(state.position[c] - state.position[a]);
    const double twice_area = cross.norm();
    if (twice_area <= 0.0) return;
    const Eigen::Vector3d n = cross / twice_area;
    const double scale =
        pressure_scale.empty() ? 1.0 : (pressure_scale[a] + pressure_scale[b] + pressure_scale[c]) / 3.0;
    const Eigen::Vector3d f = n * n.dot(wind) * (scale * 0.5 * twice_area / (3.0 * cell_area));
    forces[a] += f;
    forces[b] += f;
    forces[c] += f;
  };
  for (int r = 0; r + 1 < state.rows; ++r) {
    for (int col = 0; col + 1 < state.cols; ++col) {
      const int tl = state.index(col, r);
      const int tr = state.index(col + 1, r);
      const int bl = state.index(col, r + 1);
      const int br = state.index(col + 1, r + 1);
      push(tl, br, tr);
      push(tl, bl, br);
    }
  }
  return forces;
}

}  // namespace geodesc
