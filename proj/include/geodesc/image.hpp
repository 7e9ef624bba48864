#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "geodesc/error.hpp"

namespace geodesc {

/// Dense row-major 2D grid. The tag parameter keeps semantically different
/// images (intensity vs. depth) from being mixed up at compile time.
template <typename T, typename Tag = void>
class Image {
 public:
  using value_type = T;

  Image() = default;
  Image(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(std::max(width, 0)) * static_cast<std::size_t>(std::max(height, 0)), fill) {
    if (width < 0 || height < 0) throw InputError("negative image dimensions");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }
  std::size_t size() const { return data_.size(); }

  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  T& operator()(int x, int y) { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const { return data_[index(x, y)]; }

  std::span<T> pixels() { return data_; }
  std::span<const T> pixels() const { return data_; }

  bool operator==(const Image&) const = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

struct IntensityTag;
struct DepthTag;

/// Grayscale intensities in [0, 1].
using IntensityImage = Image<double, IntensityTag>;

/// Depth in millimeters; kInvalidDepth marks missing measurements.
using DepthImage = Image<double, DepthTag>;

inline constexpr double kInvalidDepth = 0.0;

inline bool is_valid_depth(double d) { return d > 0.0 && std::isfinite(d); }

/// Luma conversion used for color inputs (components in [0, 1]).
inline double rgb_to_intensity(double r, double g, double b) { return 0.299 * r + 0.587 * g + 0.114 * b; }

/// Bilinear interpolation on the unit square around `p`; nullopt when `p`
/// falls outside [0, W-1] x [0, H-1].
template <typename T, typename Tag>
std::optional<double> try_bilinear_sample(const Image<T, Tag>& image, const Eigen::Vector2d& p) {
  const double w = image.width();
  const double h = image.height();
  if (image.empty() || !(p.x() >= 0.0 && p.y() >= 0.0 && p.x() <= w - 1.0 && p.y() <= h - 1.0)) {
    return std::nullopt;
  }
  int x0 = static_cast<int>(std::floor(p.x()));
  int y0 = static_cast<int>(std::floor(p.y()));
  // Keep the 2x2 stencil inside the image on the last row/column.
  if (x0 == image.width() - 1 && x0 > 0) --x0;
  if (y0 == image.height() - 1 && y0 > 0) --y0;
  const double fx = p.x() - x0;
  const double fy = p.y() - y0;
  const int x1 = std::min(x0 + 1, image.width() - 1);
  const int y1 = std::min(y0 + 1, image.height() - 1);
  const double i00 = image(x0, y0);
  const double i10 = image(x1, y0);
  const double i01 = image(x0, y1);
  const double i11 = image(x1, y1);
  return (1.0 - fx) * ((1.0 - fy) * i00 + fy * i01) + fx * ((1.0 - fy) * i10 + fy * i11);
}

template <typename T, typename Tag>
double bilinear_sample(const Image<T, Tag>& image, const Eigen::Vector2d& p) {
  if (auto v = try_bilinear_sample(image, p)) return *v;
  throw InputError("sample outside image");
}

/// Separable Gaussian blur with clamped borders.
inline IntensityImage gaussian_blur(const IntensityImage& image, double sigma) {
  if (sigma <= 0.0 || image.empty()) return image;
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  double total = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    kernel[k + radius] = std::exp(-0.5 * k * k / (sigma * sigma));
    total += kernel[k + radius];
  }
  for (double& k : kernel) k /= total;

  const int w = image.width();
  const int h = image.height();
  IntensityImage tmp(w, h);
  IntensityImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) acc += kernel[k + radius] * image(std::clamp(x + k, 0, w - 1), y);
      tmp(x, y) = acc;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) acc += kernel[k + radius] * tmp(x, std::clamp(y + k, 0, h - 1));
      out(x, y) = acc;
    }
  }
  return out;
}

}  // namespace geodesc
