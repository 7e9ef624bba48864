#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "json.hpp"

#include "geodesc/camera.hpp"
#include "geodesc/cloth.hpp"
#include "geodesc/harris.hpp"
#include "geodesc/image.hpp"
#include "geodesc/random.hpp"
#include "geodesc/render.hpp"
#include "geodesc/tps.hpp"

namespace geodesc {

struct WindParams {
  /// Peak pressure per cell area, drawn uniformly per run.
  double min_amplitude = 0.008;
  double max_amplitude = 0.024;
  /// Mean direction; each run perturbs it by up to `direction_jitter`.
  Eigen::Vector3d direction{0.0, 0.0, 1.0};
  double direction_jitter = 0.5;
  /// Oscillation period in frames, drawn uniformly per run.
  double min_period = 10.0;
  double max_period = 25.0;
  /// Travelling gust: pressure scaled by 1 + gust_strength * sin(k . u - w t)
  /// over material coordinates u (mm), wavelength and period drawn per run.
  double gust_strength = 0.0;
  double min_wavelength = 80.0;
  double max_wavelength = 200.0;
  double min_gust_period = 2.0;
  double max_gust_period = 6.0;
};

struct LightParams {
  int count = 2;
  double min_strength = 0.6;
  double max_strength = 0.9;
  /// Point lights are placed uniformly inside this box (world mm).
  Eigen::Vector3d box_min{-600.0, -600.0, -200.0};
  Eigen::Vector3d box_max{600.0, 400.0, 200.0};
};

struct SweepParams {
  bool enabled = true;
  double rotation_step_deg = 10.0;
  double rotation_max_deg = 180.0;
  /// Camera distance multipliers for the dolly-out sequence.
  std::vector<double> scales{1.0, 1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9, 2.0};
};

struct SimulationParams {
  std::uint64_t seed = 1;
  int frames = 30;
  /// Small forces over many steps keep per-step motion within what 25
  /// constraint sweeps can absorb.
  int steps_per_frame = 80;
  ClothOptions cloth;
  /// Gravity as an acceleration per step^2 unit (world mm, +y is down).
  Eigen::Vector3d gravity{0.0, 0.008, 0.0};
  WindParams wind;
  LightParams lights;
  double noise_sigma = 0.0;
  int image_width = 640;
  int image_height = 480;
  CameraIntrinsics intrinsics;
  int landmarks = 100;
  /// Every gt_stride-th particle (in both grid directions) densifies the
  /// ground-truth warp when visible in both frames.
  int gt_stride = 3;
  double tps_lambda = 1e-6;
  double visibility_tolerance_mm = 3.0;
  SweepParams sweeps;

  void validate() const {
    if (frames < 1) throw InputError("simulation: frames must be >= 1");
    if (steps_per_frame < 1) throw InputError("simulation: steps_per_frame must be >= 1");
    if (cloth.cols < 2 || cloth.rows < 2) throw InputError("simulation: cloth grid must be at least 2x2");
    if (!(cloth.width_mm > 0.0)) throw InputError("simulation: cloth width must be positive");
    if (!(cloth.mass > 0.0)) throw InputError("simulation: mass must be positive");
    if (wind.min_amplitude < 0.0 || wind.max_amplitude < wind.min_amplitude) {
      throw InputError("simulation: bad wind amplitude range");
    }
    if (!(wind.min_period > 0.0) || wind.max_period < wind.min_period) {
      throw InputError("simulation: bad wind period range");
    }
    if (wind.gust_strength < 0.0) throw InputError("simulation: gust strength must be >= 0");
    if (!(wind.min_wavelength > 0.0) || wind.max_wavelength < wind.min_wavelength) {
      throw InputError("simulation: bad gust wavelength range");
    }
    if (!(wind.min_gust_period > 0.0) || wind.max_gust_period < wind.min_gust_period) {
      throw InputError("simulation: bad gust period range");
    }
    if (lights.count < 0) throw InputError("simulation: light count must be >= 0");
    if (noise_sigma < 0.0) throw InputError("simulation: noise sigma must be >= 0");
    if (image_width < 2 || image_height < 2) throw InputError("simulation: image too small");
    intrinsics.validate(image_width, image_height);
    if (landmarks < 3) throw InputError("simulation: need at least 3 landmarks");
    if (gt_stride < 1) throw InputError("simulation: gt_stride must be >= 1");
    if (tps_lambda < 0.0) throw InputError("simulation: tps_lambda must be >= 0");
    for (double s : sweeps.scales) {
      if (!(s > 0.0)) throw InputError("simulation: sweep scales must be positive");
    }
    if (!(sweeps.rotation_step_deg > 0.0)) throw InputError("simulation: rotation step must be positive");
  }
};

struct Landmark {
  int particle = -1;
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  double response = 0.0;

  bool operator==(const Landmark&) const = default;
};

struct SyntheticFrame {
  RgbdFrame frame;
  Eigen::Isometry3d world_to_camera = Eigen::Isometry3d::Identity();
  std::vector<Eigen::Vector2d> projections;
  std::vector<Eigen::Vector3d> positions;  // world frame
  std::vector<std::uint8_t> visible;
  std::vector<Landmark> landmarks;
  /// Maps reference-frame pixels to this frame's pixels.
  TpsModel gt;
  /// Frame index, roll angle in degrees or distance multiplier.
  double magnitude = 0.0;
};

struct SimulationResult {
  std::vector<SyntheticFrame> frames;
  std::vector<SyntheticFrame> rotation;
  std::vector<SyntheticFrame> scale;
  /// Largest max_relative_violation seen after any physics step.
  double max_constraint_violation = 0.0;
};

/// Rendered triangles follow the constraint diagonals: (TL, BR, TR) and
/// (TL, BL, BR) per grid cell.
inline std::vector<std::array<int, 3>> cloth_triangles(const ClothState& state) {
  std::vector<std::array<int, 3>> tris;
  tris.reserve(static_cast<std::size_t>(2 * (state.cols - 1) * (state.rows - 1)));
  for (int r = 0; r + 1 < state.rows; ++r) {
    for (int c = 0; c + 1 < state.cols; ++c) {
      const int tl = state.index(c, r);
      const int tr = state.index(c + 1, r);
      const int bl = state.index(c, r + 1);
      const int br = state.index(c + 1, r + 1);
      tris.push_back({tl, br, tr});
      tris.push_back({tl, bl, br});
    }
  }
  return tris;
}

inline std::vector<Eigen::Vector2d> cloth_uv(const ClothState& state, const IntensityImage& texture) {
  std::vector<Eigen::Vector2d> uv(state.position.size());
  for (int r = 0; r < state.rows; ++r) {
    for (int c = 0; c < state.cols; ++c) {
      uv[state.index(c, r)] = {static_cast<double>(c) / (state.cols - 1) * (texture.width() - 1),
                               static_cast<double>(r) / (state.rows - 1) * (texture.height() - 1)};
    }
  }
  return uv;
}

/// Rasterizes the cloth, adds Gaussian pixel noise and records exact
/// particle projections and their visibility against the z-buffer.
inline SyntheticFrame render_frame(const ClothState& state, const IntensityImage& texture, const RenderCamera& camera,
                                   std::span<const Light> lights, double noise_sigma, Rng& rng,
                                   double visibility_tolerance_mm = 3.0) {
  if (texture.empty()) throw InputError("render: empty texture");
  bool any_in_front = false;
  for (const auto& p : state.position) any_in_front |= (camera.world_to_camera * p).z() > 0.0;
  if (!any_in_front) throw GeometryError("cloth behind camera");

  const auto tris = cloth_triangles(state);
  const auto uv = cloth_uv(state, texture);
  RenderOutput img = rasterize(state.position, uv, tris, texture, camera, lights);
  if (noise_sigma > 0.0) {
    for (auto& v : img.intensity.pixels()) v = std::clamp(v + rng.normal(0.0, noise_sigma), 0.0, 1.0);
  }

  SyntheticFrame out;
  out.frame = {std::move(img.intensity), std::move(img.depth), camera.intrinsics};
  out.world_to_camera = camera.world_to_camera;
  out.positions = state.position;
  out.projections.resize(state.position.size(), Eigen::Vector2d::Zero());
  out.visible.assign(state.position.size(), 0);
  for (std::size_t i = 0; i < state.position.size(); ++i) {
    const Eigen::Vector3d pc = camera.world_to_camera * state.position[i];
    if (!(pc.z() > 0.0)) continue;
    out.projections[i] = project(pc, camera.intrinsics);
    const long px = std::lround(out.projections[i].x());
    const long py = std::lround(out.projections[i].y());
    if (px < 0 || py < 0 || px >= camera.width || py >= camera.height) continue;
    // Particles on the silhouette may round onto a background pixel, so the
    // nearest covered pixel in the 3x3 neighbourhood decides.
    double best = std::numeric_limits<double>::infinity();
    for (long dy = -1; dy <= 1; ++dy) {
      for (long dx = -1; dx <= 1; ++dx) {
        const long x = px + dx, y = py + dy;
        if (x < 0 || y < 0 || x >= camera.width || y >= camera.height) continue;
        best = std::min(best, std::abs(img.zbuffer(static_cast<int>(x), static_cast<int>(y)) - pc.z()));
      }
    }
    out.visible[i] = best <= visibility_tolerance_mm;
  }
  return out;
}

/// The `k` visible particles with the strongest Harris response, sampled
/// bilinearly at their exact projections. Ties keep the lower particle index.
inline std::vector<Landmark> select_landmarks(const SyntheticFrame& frame, int k) {
  const auto response = harris_response(frame.frame.intensity);
  std::vector<Landmark> scored;
  for (std::size_t i = 0; i < frame.projections.size(); ++i) {
    if (!frame.visible[i]) continue;
    if (auto r = try_bilinear_sample(response, frame.projections[i])) {
      scored.push_back({static_cast<int>(i), frame.projections[i], *r});
    }
  }
  if (scored.size() < 3) throw GeometryError("fewer than 3 scorable landmarks");
  std::stable_sort(scored.begin(), scored.end(),
                   [](const Landmark& a, const Landmark& b) { return a.response > b.response; });
  if (static_cast<int>(scored.size()) > k) scored.resize(static_cast<std::size_t>(k));
  return scored;
}

inline constexpr int kGroundTruthRefinements = 4;
inline constexpr double kGroundTruthRefineTolerance = 0.5;

/// Ground truth from `reference` to `frame`: a TPS through the frame's
/// landmarks, the sheet border and every `stride`-th particle, densified
/// where it misses a particle by more than kGroundTruthRefineTolerance px.
/// Only particles visible in both frames take part.

inline TpsModel fit_ground_truth(const SyntheticFrame& reference, const SyntheticFrame& frame, int cols, int stride,
                                 double lambda) {
  std::vector<std::uint8_t> use(frame.projections.size(), 0);
  for (const auto& l : frame.landmarks) use[l.particle] = 1;
  const int rows = static_cast<int>(use.size()) / cols;
  for (std::size_t i = 0; i < use.size(); ++i) {
    const int c = static_cast<int>(i) % cols;
    const int r = static_cast<int>(i) / cols;
    const bool grid_c = c % stride == 0 || c == cols - 1;
    const bool grid_r = r % stride == 0 || r == rows - 1;
    const bool border = c == 0 || r == 0 || c == cols - 1 || r == rows - 1;
    if ((grid_c && grid_r) || border) use[i] = 1;
  }
  auto fit = [&] {
    std::vector<Eigen::Vector2d> src;
    std::vector<Eigen::Vector2d> dst;
    for (std::size_t i = 0; i < use.size(); ++i) {
      if (use[i] && reference.visible[i] && frame.visible[i]) {
        src.push_back(reference.projections[i]);
        dst.push_back(frame.projections[i]);
      }
    }
    return tps_fit(src, dst, lambda);
  };
  // Strongly curled regions bend the warp between grid controls; particles
  // the spline misses are promoted to controls and the spline refitted.
  TpsModel model = fit();
  for (int round = 0; round < kGroundTruthRefinements; ++round) {
    bool added = false;
    for (std::size_t i = 0; i < use.size(); ++i) {
      if (use[i] || !reference.visible[i] || !frame.visible[i]) continue;
      if ((tps_warp(model, reference.projections[i]) - frame.projections[i]).norm() > kGroundTruthRefineTolerance) {
        use[i] = 1;
        added = true;
      }
    }
    if (!added) break;
    model = fit();
  }
  return model;
}

namespace detail {

struct RunSetup {
  std::vector<Light> lights;
  Eigen::Vector3d wind_direction;
  double wind_amplitude = 0.0;
  double wind_period = 1.0;
  double wind_phase = 0.0;
  Eigen::Vector2d gust_wave = Eigen::Vector2d::Zero();
  double gust_period = 1.0;
  double gust_phase = 0.0;
};

inline RunSetup draw_setup(const SimulationParams& p, Rng& rng) {
  RunSetup s;
  for (int i = 0; i < p.lights.count; ++i) {
    Light l;
    for (int a = 0; a < 3; ++a) l.position[a] = rng.uniform(p.lights.box_min[a], p.lights.box_max[a]);
    l.strength = rng.uniform(p.lights.min_strength, p.lights.max_strength);
    s.lights.push_back(l);
  }
  Eigen::Vector3d jitter(rng.normal(), rng.normal(), rng.normal());
  if (jitter.norm() > 0.0) jitter.normalize();
  s.wind_direction = p.wind.direction.normalized() + p.wind.direction_jitter * rng.uniform() * jitter;
  if (s.wind_direction.norm() > 0.0) s.wind_direction.normalize();
  s.wind_amplitude = rng.uniform(p.wind.min_amplitude, p.wind.max_amplitude);
  s.wind_period = rng.uniform(p.wind.min_period, p.wind.max_period);
  s.wind_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double wavelength = rng.uniform(p.wind.min_wavelength, p.wind.max_wavelength);
  s.gust_wave = Eigen::Vector2d(std::cos(heading), std::sin(heading)) * (2.0 * std::numbers::pi / wavelength);
  s.gust_period = rng.uniform(p.wind.min_gust_period, p.wind.max_gust_period);
  s.gust_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return s;
}

inline void finish_frame(SyntheticFrame& frame, const SyntheticFrame* reference, const SimulationParams& p) {
  frame.landmarks = select_landmarks(frame, p.landmarks);
  frame.gt = fit_ground_truth(reference ? *reference : frame, frame, p.cloth.cols, p.gt_stride, p.tps_lambda);
}

}  // namespace detail

/// One physics step: gravity plus wind, Verlet integration and 25 constraint
/// sweeps.
inline ClothState advance_cloth(ClothState state, const Eigen::Vector3d& gravity, const Eigen::Vector3d& wind,
                                std::span<const double> pressure_scale = {}) {
  state = accumulate_force(std::move(state), gravity * state.mass);
  const auto wf = wind_forces(state, wind, pressure_scale);
  state = accumulate_force(std::move(state), wf);
  state = verlet_step(std::move(state));
  return satisfy_constraints(std::move(state), 25);
}

inline Eigen::Vector3d wind_at(const detail::RunSetup& setup, double t) {
  return setup.wind_direction * setup.wind_amplitude * std::sin(2.0 * std::numbers::pi * t / setup.wind_period +
                                                                setup.wind_phase);
}

/// Per-particle gust pressure scale at time t (frames).
inline void gust_at(const detail::RunSetup& setup, const SimulationParams& p, double t, std::vector<double>& out) {
  const double spacing = p.cloth.width_mm / (p.cloth.cols - 1);
  out.resize(static_cast<std::size_t>(p.cloth.cols) * static_cast<std::size_t>(p.cloth.rows));
  const double w = 2.0 * std::numbers::pi * t / setup.gust_period;
  for (int r = 0; r < p.cloth.rows; ++r) {
    for (int c = 0; c < p.cloth.cols; ++c) {
      const double phase = setup.gust_wave.x() * c * spacing + setup.gust_wave.y() * r * spacing - w + setup.gust_phase;
      out[static_cast<std::size_t>(r * p.cloth.cols + c)] = 1.0 + p.wind.gust_strength * std::sin(phase);
    }
  }
}

/// Full seeded run. Frame 0 is the rest state; each further frame follows
/// `steps_per_frame` physics steps. With sweeps enabled the rest state is
/// also rendered under camera roll and dolly-out.
inline SimulationResult simulate_sequence(const SimulationParams& params, const IntensityImage& texture) {
  params.validate();
  if (texture.empty()) throw InputError("simulation: empty texture");
  Rng rng(params.seed);
  const detail::RunSetup setup = detail::draw_setup(params, rng);
  Rng noise_rng(params.seed ^ 0x9E3779B97F4A7C15ULL);

  RenderCamera camera{params.intrinsics, params.image_width, params.image_height, Eigen::Isometry3d::Identity()};
  ClothState state = make_cloth(params.cloth);
  const ClothState rest = state;

  std::vector<double> gust;
  SimulationResult result;
  result.frames.reserve(static_cast<std::size_t>(params.frames));
  for (int f = 0; f < params.frames; ++f) {
    if (f > 0) {
      for (int s = 0; s < params.steps_per_frame; ++s) {
        const double t = (f - 1) + static_cast<double>(s) / params.steps_per_frame;
        if (params.wind.gust_strength != 0.0) gust_at(setup, params, t, gust);
        state = advance_cloth(std::move(state), params.gravity, wind_at(setup, t), gust);
        result.max_constraint_violation = std::max(result.max_constraint_violation, max_relative_violation(state));
      }
    }
    SyntheticFrame frame = render_frame(state, texture, camera, setup.lights, params.noise_sigma, noise_rng,
                                        params.visibility_tolerance_mm);
    frame.magnitude = f;
    detail::finish_frame(frame, result.frames.empty() ? nullptr : &result.frames.front(), params);
    result.frames.push_back(std::move(frame));
  }

  if (!params.sweeps.enabled) return result;
  const SyntheticFrame* reference = nullptr;
  const Eigen::Vector3d center = params.cloth.center;
  for (double deg = 0.0; deg <= params.sweeps.rotation_max_deg + 1e-9; deg += params.sweeps.rotation_step_deg) {
    RenderCamera cam = camera;
    cam.world_to_camera = Eigen::Isometry3d(Eigen::AngleAxisd(deg * std::numbers::pi / 180.0, Eigen::Vector3d::UnitZ()));
    SyntheticFrame frame = render_frame(rest, texture, cam, setup.lights, params.noise_sigma, noise_rng,
                                        params.visibility_tolerance_mm);
    frame.magnitude = deg;
    detail::finish_frame(frame, reference, params);
    result.rotation.push_back(std::move(frame));
    reference = &result.rotation.front();
  }
  reference = nullptr;
  for (double s : params.sweeps.scales) {
    RenderCamera cam = camera;
    // Dolly out along the optical axis: the cloth ends up s times farther.
    cam.world_to_camera = Eigen::Isometry3d(Eigen::Translation3d(0.0, 0.0, (s - 1.0) * center.z()));
    SyntheticFrame frame = render_frame(rest, texture, cam, setup.lights, params.noise_sigma, noise_rng,
                                        params.visibility_tolerance_mm);
    frame.magnitude = s;
    detail::finish_frame(frame, reference, params);
    result.scale.push_back(std::move(frame));
    reference = &result.scale.front();
  }
  return result;
}

namespace detail {

inline nlohmann::json vec_json(const Eigen::Vector3d& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

inline Eigen::Vector3d json_vec(const nlohmann::json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

}  // namespace detail

inline nlohmann::json params_to_json(const SimulationParams& p) {
  using detail::vec_json;
  nlohmann::json j;
  j["seed"] = p.seed;
  j["frames"] = p.frames;
  j["steps_per_frame"] = p.steps_per_frame;
  j["cloth"] = {{"cols", p.cloth.cols},         {"rows", p.cloth.rows},       {"width_mm", p.cloth.width_mm},
                {"center", vec_json(p.cloth.center)}, {"pin_top_row", p.cloth.pin_top_row}, {"mass", p.cloth.mass},
                {"damping", p.cloth.damping}, {"dt2", p.cloth.dt2}};
  j["gravity"] = vec_json(p.gravity);
  j["wind"] = {{"min_amplitude", p.wind.min_amplitude}, {"max_amplitude", p.wind.max_amplitude},
               {"direction", vec_json(p.wind.direction)}, {"direction_jitter", p.wind.direction_jitter},
               {"min_period", p.wind.min_period},       {"max_period", p.wind.max_period},
               {"gust_strength", p.wind.gust_strength}, {"min_wavelength", p.wind.min_wavelength},
               {"max_wavelength", p.wind.max_wavelength}, {"min_gust_period", p.wind.min_gust_period},
               {"max_gust_period", p.wind.max_gust_period}};
  j["lights"] = {{"count", p.lights.count},
                 {"min_strength", p.lights.min_strength},
                 {"max_strength", p.lights.max_strength},
                 {"box_min", vec_json(p.lights.box_min)},
                 {"box_max", vec_json(p.lights.box_max)}};
  j["noise_sigma"] = p.noise_sigma;
  j["image_width"] = p.image_width;
  j["image_height"] = p.image_height;
  j["intrinsics"] = {{"fx", p.intrinsics.fx}, {"fy", p.intrinsics.fy}, {"cx", p.intrinsics.cx}, {"cy", p.intrinsics.cy}};
  j["landmarks"] = p.landmarks;
  j["gt_stride"] = p.gt_stride;
  j["tps_lambda"] = p.tps_lambda;
  j["visibility_tolerance_mm"] = p.visibility_tolerance_mm;
  j["sweeps"] = {{"enabled", p.sweeps.enabled},
                 {"rotation_step_deg", p.sweeps.rotation_step_deg},
                 {"rotation_max_deg", p.sweeps.rotation_max_deg},
                 {"scales", p.sweeps.scales}};
  return j;
}

/// Missing keys keep their defaults so partial files work as overrides.
inline SimulationParams params_from_json(const nlohmann::json& j, SimulationParams p = {}) {
  using detail::json_vec;
  try {
    auto get = [](const nlohmann::json& obj, const char* key, auto& field) {
      if (obj.contains(key)) field = obj.at(key).get<std::decay_t<decltype(field)>>();
    };
    auto get_vec = [](const nlohmann::json& obj, const char* key, Eigen::Vector3d& field) {
      if (obj.contains(key)) field = json_vec(obj.at(key));
    };
    get(j, "seed", p.seed);
    get(j, "frames", p.frames);
    get(j, "steps_per_frame", p.steps_per_frame);
    if (j.contains("cloth")) {
      const auto& c = j.at("cloth");
      get(c, "cols", p.cloth.cols);
      get(c, "rows", p.cloth.rows);
      get(c, "width_mm", p.cloth.width_mm);
      get_vec(c, "center", p.cloth.center);
      get(c, "pin_top_row", p.cloth.pin_top_row);
      get(c, "mass", p.cloth.mass);
      get(c, "damping", p.cloth.damping);
      get(c, "dt2", p.cloth.dt2);
    }
    get_vec(j, "gravity", p.gravity);
    if (j.contains("wind")) {
      const auto& w = j.at("wind");
      get(w, "min_amplitude", p.wind.min_amplitude);
      get(w, "max_amplitude", p.wind.max_amplitude);
      get_vec(w, "direction", p.wind.direction);
      get(w, "direction_jitter", p.wind.direction_jitter);
      get(w, "min_period", p.wind.min_period);
      get(w, "max_period", p.wind.max_period);
      get(w, "gust_strength", p.wind.gust_strength);
      get(w, "min_wavelength", p.wind.min_wavelength);
      get(w, "max_wavelength", p.wind.max_wavelength);
      get(w, "min_gust_period", p.wind.min_gust_period);
      get(w, "max_gust_period", p.wind.max_gust_period);
    }
    if (j.contains("lights")) {
      const auto& l = j.at("lights");
      get(l, "count", p.lights.count);
      get(l, "min_strength", p.lights.min_strength);
      get(l, "max_strength", p.lights.max_strength);
      get_vec(l, "box_min", p.lights.box_min);
      get_vec(l, "box_max", p.lights.box_max);
    }
    get(j, "noise_sigma", p.noise_sigma);
    get(j, "image_width", p.image_width);
    get(j, "image_height", p.image_height);
    if (j.contains("intrinsics")) {
      const auto& k = j.at("intrinsics");
      get(k, "fx", p.intrinsics.fx);
      get(k, "fy", p.intrinsics.fy);
      get(k, "cx", p.intrinsics.cx);
      get(k, "cy", p.intrinsics.cy);
    }
    get(j, "landmarks", p.landmarks);
    get(j, "gt_stride", p.gt_stride);
    get(j, "tps_lambda", p.tps_lambda);
    get(j, "visibility_tolerance_mm", p.visibility_tolerance_mm);
    if (j.contains("sweeps")) {
      const auto& s = j.at("sweeps");
      get(s, "enabled", p.sweeps.enabled);
      get(s, "rotation_step_deg", p.sweeps.rotation_step_deg);
      get(s, "rotation_max_deg", p.sweeps.rotation_max_deg);
      get(s, "scales", p.sweeps.scales);
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("simulation params: ") + e.what());
  }
  p.validate();
  return p;
}

inline void save_params(const SimulationParams& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << params_to_json(p).dump(2) << "\n";
}

inline SimulationParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  try {
    return params_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw InputError("simulation params " + path + ": " + e.what());
  }
}

}  // namespace geodesc
