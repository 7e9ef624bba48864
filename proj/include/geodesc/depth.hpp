#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "geodesc/camera.hpp"
#include "geodesc/image.hpp"

namespace geodesc {

struct DepthPreprocessOptions {
  int pyramid_levels = 2;
  double smoothing_sigma = 1.0;
  /// Holes whose perimeter exceeds this many pixels are left INVALID.
  int max_hole_perimeter = 400;
};

struct HoleFillStats {
  int filled_blobs = 0;
  int skipped_blobs = 0;
};

struct PreprocessResult {
  DepthImage depth;
  /// Pixel coordinate factor from the input resolution to `depth`.
  double scale = 1.0;
  HoleFillStats holes;
  /// Set when the input had no valid pixel; `depth` is then the input as-is.
  bool all_invalid = false;
};

/// Fills INVALID blobs (8-connected) by inverse-distance weighting (p = 2) of
/// the valid pixels on their 8-connected boundary. A blob's perimeter is the
/// number of its pixels that are 4-adjacent to a valid pixel; blobs above
/// `max_perimeter` are skipped.
inline DepthImage fill_depth_holes(const DepthImage& depth, int max_perimeter, HoleFillStats* stats = nullptr) {
  const int w = depth.width();
  const int h = depth.height();
  DepthImage out = depth;
  Image<int> label(w, h, -1);
  HoleFillStats local;

  std::vector<std::array<int, 2>> blob;
  std::vector<std::array<int, 2>> stack;
  std::vector<std::array<int, 2>> boundary;
  Image<int> boundary_mark(w, h, -1);
  int next_label = 0;

  for (int sy = 0; sy < h; ++sy) {
    for (int sx = 0; sx < w; ++sx) {
      if (is_valid_depth(depth(sx, sy)) || label(sx, sy) >= 0) continue;
      const int id = next_label++;
      blob.clear();
      boundary.clear();
      stack.push_back({sx, sy});
      label(sx, sy) = id;
      int perimeter = 0;
      while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        blob.push_back({x, y});
        bool on_perimeter = false;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const int nx = x + dx;
            const int ny = y + dy;
            if (!depth.contains(nx, ny)) continue;
            if (is_valid_depth(depth(nx, ny))) {
              if (dx == 0 || dy == 0) on_perimeter = true;
              if (boundary_mark(nx, ny) != id) {
                boundary_mark(nx, ny) = id;
                boundary.push_back({nx, ny});
              }
            } else if (label(nx, ny) < 0) {
              label(nx, ny) = id;
              stack.push_back({nx, ny});
            }
          }
        }
        if (on_perimeter) ++perimeter;
      }

      if (boundary.empty() || perimeter > max_perimeter) {
        ++local.skipped_blobs;
        continue;
      }
      ++local.filled_blobs;
      for (const auto& [x, y] : blob) {
        double num = 0.0;
        double den = 0.0;
        for (const auto& [bx, by] : boundary) {
          const double dx = bx - x;
          const double dy = by - y;
          const double weight = 1.0 / (dx * dx + dy * dy);
          num += weight * depth(bx, by);
          den += weight;
        }
        out(x, y) = num / den;
      }
    }
  }
  if (stats) *stats = local;
  return out;
}

/// One pyramid level: 5x5 Gaussian smoothing normalized over valid pixels,
/// then decimation keeping even pixels. An output pixel is INVALID only when
/// its whole 5x5 window is.
inline DepthImage pyramid_down(const DepthImage& depth, double sigma = 1.0) {
  std::array<double, 5> kernel{};
  for (int k = -2; k <= 2; ++k) kernel[k + 2] = std::exp(-0.5 * k * k / (sigma * sigma));

  const int w = depth.width();
  const int h = depth.height();
  DepthImage out((w + 1) / 2, (h + 1) / 2, kInvalidDepth);
  for (int oy = 0; oy < out.height(); ++oy) {
    for (int ox = 0; ox < out.width(); ++ox) {
      const int x = 2 * ox;
      const int y = 2 * oy;
      double num = 0.0;
      double den = 0.0;
      for (int dy = -2; dy <= 2; ++dy) {
        for (int dx = -2; dx <= 2; ++dx) {
          const int nx = x + dx;
          const int ny = y + dy;
          if (!depth.contains(nx, ny)) continue;
          const double d = depth(nx, ny);
          if (!is_valid_depth(d)) continue;
          const double weight = kernel[dx + 2] * kernel[dy + 2];
          num += weight * d;
          den += weight;
        }
      }
      if (den > 0.0) out(ox, oy) = num / den;
    }
  }
  return out;
}

/// Hole filling followed by `pyramid_levels` smoothing/decimation steps. The
/// mesh built from the result must use `intrinsics.scaled(result.scale)`.
inline PreprocessResult preprocess_depth(const DepthImage& depth, const DepthPreprocessOptions& options = {}) {
  PreprocessResult result;
  bool any_valid = false;
  for (double d : depth.pixels()) {
    if (is_valid_depth(d)) {
      any_valid = true;
      break;
    }
  }
  if (!any_valid) {
    result.depth = depth;
    result.all_invalid = true;
    return result;
  }

  result.depth = fill_depth_holes(depth, options.max_hole_perimeter, &result.holes);
  for (int level = 0; level < options.pyramid_levels; ++level) {
    result.depth = pyramid_down(result.depth, options.smoothing_sigma);
    result.scale *= 0.5;
  }
  return result;
}

}  // namespace geodesc
