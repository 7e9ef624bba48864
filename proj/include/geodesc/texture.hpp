#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "geodesc/image.hpp"
#include "geodesc/random.hpp"

namespace geodesc {

struct TextureOptions {
  int width = 480;
  int height = 360;
  int shapes = 900;
  double min_size = 3.0;
  double max_size = 28.0;
  double blur_sigma = 0.8;
};

/// Procedural cloth print: overlapping random rectangles and ellipses at
/// random gray levels, lightly blurred. Corner-rich at the scale of a few
/// millimetres on the default 500 mm sheet.
inline IntensityImage generate_texture(std::uint64_t seed, const TextureOptions& options = {}) {
  if (options.width < 2 || options.height < 2) throw InputError("texture: size must be at least 2x2");
  Rng rng(seed);
  IntensityImage tex(options.width, options.height, 0.5);
  for (int s = 0; s < options.shapes; ++s) {
    const double cx = rng.uniform(0.0, options.width);
    const double cy = rng.uniform(0.0, options.height);
    // Log-uniform sizes keep both fine and coarse structure.
    const double ratio = options.max_size / options.min_size;
    const double a = options.min_size * std::pow(ratio, rng.uniform());
    const double b = options.min_size * std::pow(ratio, rng.uniform());
    const double angle = rng.uniform(0.0, std::numbers::pi);
    const double level = rng.uniform();
    const bool ellipse = rng.uniform() < 0.4;
    const double ca = std::cos(angle);
    const double sa = std::sin(angle);
    const double reach = std::max(a, b);
    const int x0 = std::max(0, static_cast<int>(cx - reach));
    const int x1 = std::min(options.width - 1, static_cast<int>(cx + reach) + 1);
    const int y0 = std::max(0, static_cast<int>(cy - reach));
    const int y1 = std::min(options.height - 1, static_cast<int>(cy + reach) + 1);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double u = ((x - cx) * ca + (y - cy) * sa) / a;
        const double v = (-(x - cx) * sa + (y - cy) * ca) / b;
        const bool inside = ellipse ? (u * u + v * v <= 0.25) : (std::abs(u) <= 0.5 && std::abs(v) <= 0.5);
        if (inside) tex(x, y) = level;
      }
    }
  }
  return options.blur_sigma > 0.0 ? gaussian_blur(tex, options.blur_sigma) : tex;
}

}  // namespace geodesc
