// geodesc command-line tool: detect, extract, match, simulate, eval-sweep.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "geodesc/geodesc.hpp"

namespace fs = std::filesystem;
using namespace geodesc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitBadInput = 2;

struct GlobalOptions {
  std::string config_path;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  bool dry_run = false;
};

void log(const std::string& msg) { std::cerr << msg << "\n"; }

std::string frame_name(const char* pattern, int index) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, index);
  return buf;
}

PipelineConfig load_pipeline_config(const GlobalOptions& g) {
  PipelineConfig c = g.config_path.empty() ? PipelineConfig{} : load_config(g.config_path);
  if (g.threads) c.threads = *g.threads;
  if (g.seed) c.pattern_seed = *g.seed;
  c.validate();
  return c;
}

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw InputError(std::string("missing ") + what);
  if (!fs::is_regular_file(path)) throw InputError(std::string("cannot read ") + what + ": " + path);
}

void ensure_writable_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw InputError("cannot create output directory " + dir.string());
  const fs::path probe = dir / ".geodesc_write_probe";
  std::ofstream out(probe);
  if (!out) throw InputError("output directory not writable: " + dir.string());
  out.close();
  fs::remove(probe, ec);
}

RgbdFrame load_frame(const std::string& intensity, const std::string& depth, const std::string& intrinsics) {
  require_file(intensity, "intensity image");
  require_file(depth, "depth image");
  RgbdFrame f;
  f.intensity = io::read_intensity(intensity);
  f.depth = io::read_depth_png(depth);
  if (!intrinsics.empty()) f.intrinsics = load_intrinsics(intrinsics);
  f.validate();
  return f;
}

void log_timings(const StageTimings& t, std::size_t kept, std::size_t rejected) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "timing: preprocess %.1f ms, mesh %.1f ms, patches %.1f ms, describe %.1f ms; kept %zu, rejected %zu",
                t.preprocess_ms, t.mesh_ms, t.patches_ms, t.describe_ms, kept, rejected);
  log(buf);
}

// ---- detect ---------------------------------------------------------------

struct DetectArgs {
  std::string image;
  std::string out;
  std::optional<int> count;
};

int cmd_detect(const GlobalOptions& g, const DetectArgs& a) {
  const PipelineConfig c = load_pipeline_config(g);
  require_file(a.image, "image");
  const int count = a.count.value_or(c.harris_count);
  if (count < 1) throw InputError("--count must be >= 1");
  if (a.out.empty()) throw InputError("missing --out");
  if (g.dry_run) return kExitOk;
  const auto image = io::read_intensity(a.image);
  const auto keypoints = detect_harris(image, count);
  io::write_keypoints_csv(a.out, keypoints);
  log("detected " + std::to_string(keypoints.size()) + " keypoints");
  return kExitOk;
}

// ---- extract --------------------------------------------------------------

struct ExtractArgs {
  std::string image;
  std::string depth;
  std::string intrinsics;
  std::string keypoints;
  std::string out;
  std::optional<int> detect;
  std::string sampling;
  std::string descriptor;
};

int cmd_extract(const GlobalOptions& g, const ExtractArgs& a) {
  PipelineConfig c = load_pipeline_config(g);
  if (!a.image.empty()) c.intensity_path = a.image;
  if (!a.depth.empty()) c.depth_path = a.depth;
  if (!a.intrinsics.empty()) c.intrinsics_path = a.intrinsics;
  if (!a.keypoints.empty()) c.keypoints_path = a.keypoints;
  if (!a.out.empty()) c.output_prefix = a.out;
  if (a.detect) {
    c.harris_count = *a.detect;
    c.keypoints_path.clear();
  }
  if (!a.sampling.empty()) {
    nlohmann::json j;
    j["sampling"] = a.sampling;
    c = config_from_json(j, c);
  }
  if (!a.descriptor.empty()) {
    nlohmann::json j;
    j["descriptor"] = a.descriptor;
    c = config_from_json(j, c);
  }
  c.validate();
  require_file(c.intensity_path, "intensity image");
  require_file(c.depth_path, "depth image");
  if (!c.intrinsics_path.empty()) require_file(c.intrinsics_path, "intrinsics");
  if (!c.keypoints_path.empty()) require_file(c.keypoints_path, "keypoints");
  if (c.output_prefix.empty()) throw InputError("missing --out");
  if (g.dry_run) {
    if (!c.intrinsics_path.empty()) load_intrinsics(c.intrinsics_path);
    log("dry run: configuration valid");
    return kExitOk;
  }

  const RgbdFrame frame = load_frame(c.intensity_path, c.depth_path, c.intrinsics_path);
  const std::vector<Keypoint> keypoints = c.keypoints_path.empty() ? detect_harris(frame.intensity, c.harris_count)
                                                                   : io::read_keypoints_csv(c.keypoints_path);
  const Extraction ex = extract_features(frame, keypoints, c);
  for (const auto& r : ex.rejections) log("rejected keypoint " + std::to_string(r.keypoint_id) + ": " + r.reason);
  log_timings(ex.timings, ex.keypoints.size(), ex.rejections.size());

  const fs::path prefix(c.output_prefix);
  if (prefix.has_parent_path()) ensure_writable_dir(prefix.parent_path());
  std::vector<io::PatchRecord> patches;
  for (std::size_t i = 0; i < ex.patches.size(); ++i) {
    patches.push_back({ex.keypoints[i].id, static_cast<float>(ex.keypoints[i].position.x()),
                       static_cast<float>(ex.keypoints[i].position.y()), ex.patches[i]});
  }
  io::write_patches(c.output_prefix + ".gpat", patches, c.patch.angular_bins, c.patch.radial_bins);
  if (c.descriptor == DescriptorKind::GeoBit) {
    std::vector<io::GeoBitRecord> recs;
    for (std::size_t i = 0; i < ex.descriptors.size(); ++i) {
      recs.push_back({static_cast<float>(ex.keypoints[i].position.x()),
                      static_cast<float>(ex.keypoints[i].position.y()), ex.descriptors[i]});
    }
    io::write_geobit(c.output_prefix + ".gbit", recs);
  }
  return kExitOk;
}

// ---- match ----------------------------------------------------------------

struct MatchArgs {
  std::string a;
  std::string b;
  std::string gt;
  std::string out;
  std::string summary;
  std::optional<double> tau;
};

int cmd_match(const GlobalOptions& g, const MatchArgs& m) {
  PipelineConfig c = load_pipeline_config(g);
  if (m.tau) c.tau = *m.tau;
  c.validate();
  require_file(m.a, "query descriptors");
  require_file(m.b, "target descriptors");
  if (!m.gt.empty()) require_file(m.gt, "ground-truth model");
  if (m.out.empty()) throw InputError("missing --out");
  if (g.dry_run) return kExitOk;

  const auto qa = io::read_descriptors(m.a);
  const auto qb = io::read_descriptors(m.b);
  if (qa.descriptors.index() != qb.descriptors.index()) throw InputError("descriptor kinds differ");
  if (qa.keypoints.empty() || qb.keypoints.empty()) throw InputError("empty descriptor file");
  const MatchSet matches = match_nn(qa.descriptors, qb.descriptors, c.threads);
  std::optional<MatchEvaluation> eval;
  if (!m.gt.empty()) eval = matching_score(matches, load_tps(m.gt), qa.keypoints, qb.keypoints, c.tau);
  io::write_match_csv(m.out, matches, qa.keypoints, qb.keypoints, eval ? &*eval : nullptr);
  const auto summary = io::match_summary(matches, qa.keypoints.size(), qb.keypoints.size(), eval ? &*eval : nullptr,
                                         c.tau);
  const std::string summary_path = m.summary.empty() ? m.out + ".json" : m.summary;
  std::ofstream js(summary_path);
  if (!js) throw InputError("cannot write " + summary_path);
  js << summary.dump(2) << "\n";
  if (eval) log("matching score " + std::to_string(eval->score));
  return kExitOk;
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string params;
  std::string texture;
  std::string out;
  std::optional<int> frames;
  bool no_sweeps = false;
};

void write_sequence(const fs::path& dir, const std::vector<SyntheticFrame>& frames, const SimulationParams& p,
                    const char* kind) {
  ensure_writable_dir(dir);
  nlohmann::json seq;
  seq["kind"] = kind;
  seq["reference"] = 0;
  seq["frames"] = nlohmann::json::array();
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& f = frames[i];
    const int k = static_cast<int>(i);
    io::write_intensity_png((dir / frame_name("frame_%04d.png", k)).string(), f.frame.intensity);
    io::write_depth_png((dir / frame_name("frame_%04d_depth.png", k)).string(), f.frame.depth);
    io::write_particles_csv((dir / frame_name("frame_%04d_particles.csv", k)).string(), f, p.cloth.cols);
    save_tps(f.gt, (dir / frame_name("gt_%04d.json", k)).string());
    seq["frames"].push_back({{"index", k}, {"magnitude", f.magnitude}});
  }
  std::ofstream(dir / "intrinsics.txt") << format_intrinsics(p.intrinsics);
  std::ofstream(dir / "sequence.json") << seq.dump(2) << "\n";
}

int cmd_simulate(const GlobalOptions& g, const SimulateArgs& a) {
  nlohmann::json raw;
  if (!a.params.empty()) {
    require_file(a.params, "simulation params");
    std::ifstream in(a.params);
    try {
      raw = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw InputError("simulation params " + a.params + ": " + e.what());
    }
  }
  SimulationParams p = params_from_json(raw);
  if (g.seed) p.seed = *g.seed;
  if (a.frames) p.frames = *a.frames;
  if (a.no_sweeps) p.sweeps.enabled = false;
  p.validate();

  // Texture: explicit path, else whatever the params file recorded, else a
  // procedural print derived from the seed.
  nlohmann::json texture_info;
  std::string texture_path = a.texture;
  if (texture_path.empty() && raw.contains("texture") && raw["texture"].value("source", "") == "file") {
    texture_path = raw["texture"].at("path").get<std::string>();
  }
  std::uint64_t texture_seed = p.seed;
  if (texture_path.empty() && raw.contains("texture") && raw["texture"].value("source", "") == "procedural" &&
      !g.seed) {
    texture_seed = raw["texture"].at("seed").get<std::uint64_t>();
  }
  if (!texture_path.empty()) require_file(texture_path, "texture");
  if (a.out.empty()) throw InputError("missing --out");
  if (g.dry_run) return kExitOk;

  const fs::path out(a.out);
  ensure_writable_dir(out);
  IntensityImage texture;
  if (texture_path.empty()) {
    texture = generate_texture(texture_seed);
    texture_info = {{"source", "procedural"}, {"seed", texture_seed}};
  } else {
    texture = io::read_intensity(texture_path);
    texture_info = {{"source", "file"}, {"path", fs::absolute(texture_path).string()}};
  }

  const auto t0 = std::chrono::steady_clock::now();
  const SimulationResult result = simulate_sequence(p, texture);
  log("simulated " + std::to_string(result.frames.size()) + " frames in " +
      std::to_string(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()) +
      " s; max constraint violation " + std::to_string(result.max_constraint_violation));

  write_sequence(out, result.frames, p, "deformation");
  if (p.sweeps.enabled) {
    write_sequence(out / "rotation", result.rotation, p, "rotation");
    write_sequence(out / "scale", result.scale, p, "scale");
  }
  nlohmann::json params = params_to_json(p);
  params["texture"] = texture_info;
  std::ofstream(out / "params.json") << params.dump(2) << "\n";
  return kExitOk;
}

// ---- eval-sweep -----------------------------------------------------------

struct SweepArgs {
  std::string dataset;
  std::string out;
  std::optional<std::uint64_t> shuffle_seed;
};

int cmd_eval_sweep(const GlobalOptions& g, const SweepArgs& a) {
  PipelineConfig c = load_pipeline_config(g);
  const fs::path dir(a.dataset);
  require_file((dir / "sequence.json").string(), "sequence description");
  nlohmann::json seq;
  try {
    std::ifstream in(dir / "sequence.json");
    seq = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("sequence.json: ") + e.what());
  }
  struct Entry {
    int index;
    double magnitude;
  };
  std::vector<Entry> entries;
  try {
    for (const auto& f : seq.at("frames")) entries.push_back({f.at("index").get<int>(), f.at("magnitude").get<double>()});
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("sequence.json: ") + e.what());
  }
  if (entries.empty()) throw InputError("sequence has no frames");
  const int reference = seq.value("reference", 0);
  const std::string intrinsics = fs::exists(dir / "intrinsics.txt") ? (dir / "intrinsics.txt").string() : "";
  for (const auto& e : entries) {
    require_file((dir / frame_name("frame_%04d.png", e.index)).string(), "frame");
    require_file((dir / frame_name("frame_%04d_depth.png", e.index)).string(), "depth frame");
    require_file((dir / frame_name("gt_%04d.json", e.index)).string(), "ground-truth model");
  }
  if (a.out.empty()) throw InputError("missing --out");
  if (g.dry_run) return kExitOk;

  std::vector<std::size_t> order(entries.size());
  std::iota(order.begin(), order.end(), 0);
  if (a.shuffle_seed) {
    Rng rng(*a.shuffle_seed);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.uniform_int(0, static_cast<int>(i) - 1)]);
  }

  const TestPattern pattern = generate_test_pattern(c.pattern_seed, c.patch.radial_bins);
  auto extract = [&](int index) {
    const RgbdFrame f = load_frame((dir / frame_name("frame_%04d.png", index)).string(),
                                   (dir / frame_name("frame_%04d_depth.png", index)).string(), intrinsics);
    return extract_features(f, detect_harris(f.intensity, c.harris_count), c, pattern);
  };
  const Extraction ref = extract(reference);

  struct Row {
    int frame;
    double magnitude;
    double score;
    int inliers;
  };
  std::vector<Row> rows;
  for (std::size_t o : order) {
    const Entry& e = entries[o];
    const Extraction ex = e.index == reference ? ref : extract(e.index);
    const TpsModel gt = load_tps((dir / frame_name("gt_%04d.json", e.index)).string());
    const PairResult r = evaluate_pair(ref, ex, gt, c.tau, c.threads);
    rows.push_back({e.index, e.magnitude, r.evaluation.score, r.evaluation.correct});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) { return x.frame < y.frame; });

  std::ofstream out(a.out);
  if (!out) throw InputError("cannot write " + a.out);
  out << "frame,magnitude,matching_score,inliers\n";
  for (const auto& r : rows) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%d,%.6g,%.6f,%d\n", r.frame, r.magnitude, r.score, r.inliers);
    out << buf;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geodesic binary descriptors for RGB-D images of deformable surfaces"};
  app.require_subcommand(1);
  GlobalOptions g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config_path, "Pipeline configuration (JSON)");
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  auto* seed_opt = app.add_option("--seed", seed, "Seed for test patterns and simulations");
  app.add_flag("--dry-run", g.dry_run, "Validate inputs and configuration, write nothing");

  DetectArgs det;
  auto* detect = app.add_subcommand("detect", "Harris keypoints to CSV");
  detect->add_option("--image", det.image, "Intensity image (PNG or PGM)")->required();
  detect->add_option("--count", det.count, "Maximum number of keypoints");
  detect->add_option("--out", det.out, "Keypoint CSV");

  ExtractArgs ex;
  std::optional<int> detect_n;
  auto* extract = app.add_subcommand("extract", "Geodesic patches and GeoBit descriptors");
  extract->add_option("--image", ex.image, "Intensity image (PNG or PGM)");
  extract->add_option("--depth", ex.depth, "16-bit depth PNG in millimetres");
  extract->add_option("--intrinsics", ex.intrinsics, "Camera intrinsics file");
  auto* kp_opt = extract->add_option("--keypoints", ex.keypoints, "Keypoint CSV (id,x,y,response)");
  extract->add_option("--detect-harris", detect_n, "Detect N Harris keypoints instead")->excludes(kp_opt);
  extract->add_option("--out", ex.out, "Output prefix for .gpat/.gbit");
  extract->add_option("--sampling", ex.sampling, "geodesic | cartesian");
  extract->add_option("--descriptor", ex.descriptor, "geobit | external-patch-dump");

  MatchArgs ma;
  auto* match = app.add_subcommand("match", "Nearest-neighbour matching with optional evaluation");
  match->add_option("--a", ma.a, "Query descriptors (GBIT or GFLT)")->required();
  match->add_option("--b", ma.b, "Target descriptors (GBIT or GFLT)")->required();
  match->add_option("--gt", ma.gt, "Ground-truth TPS model (A pixels to B pixels)");
  match->add_option("--out", ma.out, "Match report CSV")->required();
  match->add_option("--summary", ma.summary, "JSON summary (default: <out>.json)");
  match->add_option("--tau", ma.tau, "Correct-match pixel tolerance");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Render a synthetic cloth sequence with ground truth");
  simulate->add_option("--params", sim.params, "Simulation params JSON");
  simulate->add_option("--texture", sim.texture, "Texture image (default: procedural)");
  simulate->add_option("--out", sim.out, "Output directory")->required();
  simulate->add_option("--frames", sim.frames, "Frames to capture");
  simulate->add_flag("--no-sweeps", sim.no_sweeps, "Skip the rotation and scale sequences");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("eval-sweep", "Per-frame matching scores against frame 0");
  sweep->add_option("--dataset", sw.dataset, "Sequence directory (with sequence.json)")->required();
  sweep->add_option("--out", sw.out, "Score table CSV")->required();
  sweep->add_option("--shuffle-seed", sw.shuffle_seed, "Process frames in a shuffled order");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadInput;
  }
  if (*seed_opt) g.seed = seed;
  ex.detect = detect_n;

  try {
    if (*detect) return cmd_detect(g, det);
    if (*extract) return cmd_extract(g, ex);
    if (*match) return cmd_match(g, ma);
    if (*simulate) return cmd_simulate(g, sim);
    if (*sweep) return cmd_eval_sweep(g, sw);
  } catch (const InputError& e) {
    log(std::string("error: ") + e.what());
    return kExitBadInput;
  } catch (const GeometryError& e) {
    log(std::string("error: ") + e.what());
    return kExitBadInput;
  } catch (const std::exception& e) {
    log(std::string("internal error: ") + e.what());
    return kExitInternal;
  }
  return kExitInternal;
}
