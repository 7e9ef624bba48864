#pragma once

#include <algorithm>
#include <vector>

#include "geodesc/geodesic.hpp"
#include "geodesc/image.hpp"

namespace geodesc {

struct HarrisOptions {
  double k = 0.04;
  /// Responses at or below this value are not corners.
  double min_response = 1e-10;
  /// Pixels this close to the image border are never reported.
  int border = 3;
};

using ResponseImage = Image<double>;

/// det(M) - k trace(M)^2 with M the structure tensor of Sobel gradients
/// (normalized by 1/8) summed over a 3x3 Gaussian window. Zero on the
/// outermost two pixel rings.
inline ResponseImage harris_response(const IntensityImage& image, double k = 0.04) {
  const int w = image.width();
  const int h = image.height();
  ResponseImage xx(w, h), yy(w, h), xy(w, h);
  for (int y = 1; y + 1 < h; ++y) {
    for (int x = 1; x + 1 < w; ++x) {
      const double gx = (image(x + 1, y - 1) + 2.0 * image(x + 1, y) + image(x + 1, y + 1) - image(x - 1, y - 1) -
                         2.0 * image(x - 1, y) - image(x - 1, y + 1)) / 8.0;
      const double gy = (image(x - 1, y + 1) + 2.0 * image(x, y + 1) + image(x + 1, y + 1) - image(x - 1, y - 1) -
                         2.0 * image(x, y - 1) - image(x + 1, y - 1)) / 8.0;
      xx(x, y) = gx * gx;
      yy(x, y) = gy * gy;
      xy(x, y) = gx * gy;
    }
  }
  static constexpr double kWindow[3] = {0.25, 0.5, 0.25};
  ResponseImage response(w, h, 0.0);
  for (int y = 2; y + 2 < h; ++y) {
    for (int x = 2; x + 2 < w; ++x) {
      double a = 0.0, b = 0.0, c = 0.0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const double wgt = kWindow[dx + 1] * kWindow[dy + 1];
          a += wgt * xx(x + dx, y + dy);
          b += wgt * yy(x + dx, y + dy);
          c += wgt * xy(x + dx, y + dy);
        }
      }
      response(x, y) = (a * b - c * c) - k * (a + b) * (a + b);
    }
  }
  return response;
}

/// Harris corners after 3x3 non-maximum suppression, strongest first, at most
/// `max_count` of them. Plateaus keep their first pixel in raster order.
inline std::vector<Keypoint> detect_harris(const IntensityImage& image, int max_count,
                                           const HarrisOptions& options = {}) {
  if (image.empty()) throw InputError("detect_harris: empty image");
  const ResponseImage response = harris_response(image, options.k);
  const int w = image.width();
  const int h = image.height();
  const int border = std::max(options.border, 2);

  std::vector<Keypoint> corners;
  for (int y = border; y < h - border; ++y) {
    for (int x = border; x < w - border; ++x) {
      const double r = response(x, y);
      if (!(r > options.min_response)) continue;
      bool is_max = true;
      for (int dy = -1; dy <= 1 && is_max; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const double other = response(x + dx, y + dy);
          const bool earlier = dy < 0 || (dy == 0 && dx < 0);
          if (other > r || (earlier && other == r)) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) {
        Keypoint k;
        k.position = {x, y};
        k.response = r;
        corners.push_back(k);
      }
    }
  }
  std::stable_sort(corners.begin(), corners.end(),
                   [](const Keypoint& a, const Keypoint& b) { return a.response > b.response; });
  if (max_count >= 0 && corners.size() > static_cast<std::size_t>(max_count)) corners.resize(max_count);
  for (std::size_t i = 0; i < corners.size(); ++i) corners[i].id = static_cast<std::uint32_t>(i);
  return corners;
}

}  // namespace geodesc
