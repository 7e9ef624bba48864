#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "geodesc/error.hpp"

namespace geodesc {

/// Thin-plate spline warp f(p) = A p + sum_i w_i U(|p - c_i|) with
/// U(r) = r^2 log r^2. Affine coefficients: x' = a0 + a1 x + a2 y,
/// y' = a3 + a4 x + a5 y.
struct TpsModel {
  std::vector<Eigen::Vector2d> controls;
  std::array<double, 6> affine{0.0, 1.0, 0.0, 0.0, 0.0, 1.0};
  std::vector<Eigen::Vector2d> weights;
  double lambda = 0.0;

  static TpsModel identity() { return {}; }
};

inline double tps_kernel(double squared_distance) {
  return squared_distance > 0.0 ? squared_distance * std::log(squared_distance) : 0.0;
}

/// Fits the spline mapping src[i] to dst[i] with `lambda` added to the kernel
/// diagonal (lambda = 0 interpolates exactly).
inline TpsModel tps_fit(const std::vector<Eigen::Vector2d>& src, const std::vector<Eigen::Vector2d>& dst,
                        double lambda = 0.0) {
  if (src.size() != dst.size()) throw InputError("tps_fit: control point counts differ");
  if (src.size() < 3) throw GeometryError("degenerate controls");
  if (!(lambda >= 0.0)) throw InputError("tps_fit: lambda must be >= 0");
  const auto n = static_cast<Eigen::Index>(src.size());

  // Degeneracy checks: duplicates and collinear configurations.
  {
    std::vector<std::pair<double, double>> sorted;
    sorted.reserve(src.size());
    for (const auto& p : src) sorted.emplace_back(p.x(), p.y());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw GeometryError("degenerate controls");

    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const auto& p : src) mean += p;
    mean /= static_cast<double>(n);
    Eigen::Matrix2d scatter = Eigen::Matrix2d::Zero();
    for (const auto& p : src) scatter += (p - mean) * (p - mean).transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(scatter);
    if (!(eig.eigenvalues()(0) > 1e-12 * std::max(1.0, eig.eigenvalues()(1)))) {
      throw GeometryError("degenerate controls");
    }
  }

  // Solve in centroid-centred, unit-RMS coordinates; pixel-unit kernels are
  // badly scaled against the affine block. The result maps back exactly:
  // U(q / L^2) = U(q) / L^2 - log(L^2) q / L^2, and the q term collapses to a
  // constant under the side conditions.
  Eigen::Vector2d centre = Eigen::Vector2d::Zero();
  for (const auto& p : src) centre += p;
  centre /= static_cast<double>(n);
  double spread = 0.0;
  for (const auto& p : src) spread += (p - centre).squaredNorm();
  const double scale = std::sqrt(spread / static_cast<double>(n));
  const double scale2 = scale * scale;
  std::vector<Eigen::Vector2d> s(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) s[i] = (src[i] - centre) / scale;

  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(n + 3, n + 3);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n + 3, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double u = tps_kernel((s[i] - s[j]).squaredNorm());
      system(i, j) = u;
      system(j, i) = u;
    }
    system(i, i) = lambda / scale2;
    system(i, n) = 1.0;
    system(i, n + 1) = s[i].x();
    system(i, n + 2) = s[i].y();
    system(n, i) = 1.0;
    system(n + 1, i) = s[i].x();
    system(n + 2, i) = s[i].y();
    rhs(i, 0) = dst[i].x();
    rhs(i, 1) = dst[i].y();
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  Eigen::MatrixXd sol = lu.solve(rhs);
  sol += lu.solve(rhs - system * sol);
  if (!sol.allFinite()) throw GeometryError("degenerate controls");

  TpsModel model;
  model.controls = src;
  model.lambda = lambda;
  model.weights.resize(src.size());
  Eigen::Vector2d offset = Eigen::Vector2d::Zero();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector2d w(sol(i, 0), sol(i, 1));
    model.weights[i] = w / scale2;
    offset += w * src[i].squaredNorm();
  }
  offset *= -std::log(scale2) / scale2;
  // Affine part in pixel units: a0 + (a1, a2) . (p - centre) / scale.
  for (int d = 0; d < 2; ++d) {
    const double a1 = sol(n + 1, d) / scale;
    const double a2 = sol(n + 2, d) / scale;
    const double a0 = sol(n, d) - a1 * centre.x() - a2 * centre.y() + offset(d);
    model.affine[3 * d] = a0;
    model.affine[3 * d + 1] = a1;
    model.affine[3 * d + 2] = a2;
  }
  return model;
}

inline Eigen::Vector2d tps_warp(const TpsModel& model, const Eigen::Vector2d& p) {
  const auto& a = model.affine;
  Eigen::Vector2d out(a[0] + a[1] * p.x() + a[2] * p.y(), a[3] + a[4] * p.x() + a[5] * p.y());
  for (std::size_t i = 0; i < model.controls.size(); ++i) {
    out += model.weights[i] * tps_kernel((p - model.controls[i]).squaredNorm());
  }
  return out;
}

inline nlohmann::json tps_to_json(const TpsModel& model) {
  nlohmann::json j;
  j["lambda"] = model.lambda;
  j["affine"] = model.affine;
  auto& controls = j["control_points"] = nlohmann::json::array();
  auto& weights = j["weights"] = nlohmann::json::array();
  for (std::size_t i = 0; i < model.controls.size(); ++i) {
    controls.push_back({model.controls[i].x(), model.controls[i].y()});
    weights.push_back({model.weights[i].x(), model.weights[i].y()});
  }
  return j;
}

inline TpsModel tps_from_json(const nlohmann::json& j) {
  try {
    TpsModel model;
    model.lambda = j.at("lambda").get<double>();
    model.affine = j.at("affine").get<std::array<double, 6>>();
    const auto& controls = j.at("control_points");
    const auto& weights = j.at("weights");
    if (controls.size() != weights.size()) throw InputError("tps model: control/weight counts differ");
    for (std::size_t i = 0; i < controls.size(); ++i) {
      model.controls.emplace_back(controls[i].at(0).get<double>(), controls[i].at(1).get<double>());
      model.weights.emplace_back(weights[i].at(0).get<double>(), weights[i].at(1).get<double>());
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("tps model: ") + e.what());
  }
}

inline void save_tps(const TpsModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << tps_to_json(model).dump(2) << "\n";
}

inline TpsModel load_tps(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  try {
    return tps_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw InputError("tps model " + path + ": " + e.what());
  }
}

}  // namespace geodesc
