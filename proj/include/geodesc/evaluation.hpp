#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "geodesc/geodesic.hpp"
#include "geodesc/matching.hpp"
#include "geodesc/tps.hpp"

namespace geodesc {

/// Default pixel tolerance for a correct match.
inline constexpr double kDefaultMatchTolerance = 3.0;

struct MatchEvaluation {
  double score = 0.0;
  int correct = 0;
  std::vector<bool> is_correct;  // parallel to MatchSet::matches
};

/// A match (q, t) is correct when the ground-truth warp of q lands within
/// `tau` pixels of t. The score is #correct / min(|queries|, |targets|).
inline MatchEvaluation matching_score(const MatchSet& matches, const TpsModel& gt, std::span<const Keypoint> queries,
                                      std::span<const Keypoint> targets, double tau = kDefaultMatchTolerance) {
  if (!(tau > 0.0)) throw InputError("matching_score: tau must be positive");
  MatchEvaluation eval;
  eval.is_correct.reserve(matches.matches.size());
  for (const auto& m : matches.matches) {
    if (m.query < 0 || m.target < 0 || static_cast<std::size_t>(m.query) >= queries.size() ||
        static_cast<std::size_t>(m.target) >= targets.size()) {
      throw InputError("matching_score: match index out of range");
    }
    const Eigen::Vector2d warped = tps_warp(gt, queries[m.query].position);
    const bool ok = (warped - targets[m.target].position).norm() <= tau;
    eval.is_correct.push_back(ok);
    eval.correct += ok;
  }
  const auto denom = std::min(queries.size(), targets.size());
  eval.score = denom == 0 ? 0.0 : static_cast<double>(eval.correct) / static_cast<double>(denom);
  return eval;
}

}  // namespace geodesc
