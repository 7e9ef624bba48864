#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "geodesc/error.hpp"

namespace geodesc {

/// Pinhole intrinsics in pixels. Pixel centers sit at integer coordinates.
struct CameraIntrinsics {
  double fx = 525.0;
  double fy = 525.0;
  double cx = 319.5;
  double cy = 239.5;

  /// Intrinsics of an image resampled by `factor` with even-pixel decimation
  /// (pixel u maps to u * factor).
  CameraIntrinsics scaled(double factor) const { return {fx * factor, fy * factor, cx * factor, cy * factor}; }

  /// Throws InputError unless the focal lengths are positive and the
  /// principal point lies inside a width x height image.
  void validate(int width, int height) const {
    if (!(fx > 0.0) || !(fy > 0.0)) throw InputError("intrinsics: focal lengths must be positive");
    if (!(cx >= 0.0 && cx <= width - 1.0 && cy >= 0.0 && cy <= height - 1.0)) {
      throw InputError("intrinsics: principal point outside the image");
    }
  }

  bool operator==(const CameraIntrinsics&) const = default;
};

inline Eigen::Vector2d project(const Eigen::Vector3d& point, const CameraIntrinsics& k) {
  if (!(point.z() > 0.0)) throw GeometryError("behind camera");
  return {k.fx * point.x() / point.z() + k.cx, k.fy * point.y() / point.z() + k.cy};
}

inline Eigen::Vector3d backproject(const Eigen::Vector2d& pixel, double depth, const CameraIntrinsics& k) {
  if (!(depth > 0.0)) throw InputError("backproject: depth must be positive and valid");
  return {(pixel.x() - k.cx) * depth / k.fx, (pixel.y() - k.cy) * depth / k.fy, depth};
}

/// Direction (z = 1) of the viewing ray through `pixel`.
inline Eigen::Vector3d pixel_ray(const Eigen::Vector2d& pixel, const CameraIntrinsics& k) {
  return {(pixel.x() - k.cx) / k.fx, (pixel.y() - k.cy) / k.fy, 1.0};
}

/// Parses either four whitespace-separated numbers `fx fy cx cy` or a
/// key-value file (`fx = 525`, `fx: 525`, one per line). `#` starts a comment.
inline CameraIntrinsics parse_intrinsics(std::string_view text) {
  std::string cleaned;
  bool keyed = false;
  {
    std::istringstream lines{std::string(text)};
    std::string line;
    while (std::getline(lines, line)) {
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      if (line.find_first_of("=:") != std::string::npos || line.find("fx") != std::string::npos) keyed = true;
      cleaned += line;
      cleaned += '\n';
    }
  }

  CameraIntrinsics k;
  if (!keyed) {
    std::istringstream in(cleaned);
    if (!(in >> k.fx >> k.fy >> k.cx >> k.cy)) throw InputError("intrinsics: expected `fx fy cx cy`");
    std::string rest;
    if (in >> rest) throw InputError("intrinsics: trailing content after `fx fy cx cy`");
  } else {
    std::map<std::string, double> values;
    std::istringstream lines(cleaned);
    std::string line;
    while (std::getline(lines, line)) {
      for (char& c : line) {
        if (c == '=' || c == ':' || c == ',') c = ' ';
      }
      std::istringstream in(line);
      std::string key;
      double value = 0.0;
      if (!(in >> key)) continue;
      if (!(in >> value)) throw InputError("intrinsics: missing value for key `" + key + "`");
      values[key] = value;
    }
    for (const char* key : {"fx", "fy", "cx", "cy"}) {
      if (!values.contains(key)) throw InputError(std::string("intrinsics: missing key `") + key + "`");
    }
    k = {values["fx"], values["fy"], values["cx"], values["cy"]};
  }
  if (!(k.fx > 0.0) || !(k.fy > 0.0)) throw InputError("intrinsics: focal lengths must be positive");
  return k;
}

inline CameraIntrinsics load_intrinsics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read intrinsics file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_intrinsics(buffer.str());
}

inline std::string format_intrinsics(const CameraIntrinsics& k) {
  std::ostringstream out;
  out.precision(17);
  out << "fx = " << k.fx << "\nfy = " << k.fy << "\ncx = " << k.cx << "\ncy = " << k.cy << "\n";
  return out.str();
}

}  // namespace geodesc
