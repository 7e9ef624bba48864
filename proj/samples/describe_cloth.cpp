// Simulates a short cloth sequence and matches GeoBit descriptors between
// the first and last frame.

#include <cstdio>

#include "geodesc/geodesc.hpp"

int main() {
  using namespace geodesc;

  SimulationParams params;
  params.frames = 6;
  params.sweeps.enabled = false;
  const IntensityImage texture = generate_texture(params.seed);
  const SimulationResult sim = simulate_sequence(params, texture);
  const SyntheticFrame& first = sim.frames.front();
  const SyntheticFrame& last = sim.frames.back();

  PipelineConfig config;
  const Extraction a = extract_features(first.frame, detect_harris(first.frame.intensity, 512), config);
  const Extraction b = extract_features(last.frame, detect_harris(last.frame.intensity, 512), config);
  const PairResult result = evaluate_pair(a, b, last.gt, config.tau);

  std::printf("described %zu / %zu keypoints\n", a.keypoints.size(), b.keypoints.size());
  std::printf("correct matches %d, matching score %.3f\n", result.evaluation.correct, result.evaluation.score);
  return 0;
}
