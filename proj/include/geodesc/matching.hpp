#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <type_traits>
#include <variant>
#include <vector>

#include "geodesc/error.hpp"
#include "geodesc/geobit.hpp"
#include "geodesc/parallel.hpp"

namespace geodesc {

/// Real-valued descriptor (e.g. a learned 128-d embedding).
struct FloatDescriptor {
  std::vector<float> values;
  std::uint32_t keypoint_id = 0;

  bool operator==(const FloatDescriptor&) const = default;
};

enum class Metric { Hamming, Euclidean };

inline const char* metric_name(Metric metric) { return metric == Metric::Hamming ? "hamming" : "euclidean"; }

struct Match {
  int query = -1;
  int target = -1;
  double distance = 0.0;

  bool operator==(const Match&) const = default;
};

struct MatchSet {
  std::vector<Match> matches;
  Metric metric = Metric::Hamming;
};

inline double euclidean_distance(const FloatDescriptor& a, const FloatDescriptor& b) {
  if (a.values.size() != b.values.size()) throw InputError("descriptor dimensions differ");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double d = static_cast<double>(a.values[i]) - b.values[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

inline double descriptor_distance(const GeoBitDescriptor& a, const GeoBitDescriptor& b) { return geobit_distance(a, b); }
inline double descriptor_distance(const FloatDescriptor& a, const FloatDescriptor& b) { return euclidean_distance(a, b); }

template <typename D>
constexpr Metric metric_of() {
  return std::is_same_v<D, GeoBitDescriptor> ? Metric::Hamming : Metric::Euclidean;
}

/// One-way brute-force nearest neighbour: every query is matched to its
/// closest target; ties go to the lowest target index.
template <typename D>
MatchSet match_nn(std::span<const D> queries, std::span<const D> targets, int threads = 1) {
  if (queries.empty() || targets.empty()) throw InputError("match_nn: empty descriptor list");
  MatchSet out;
  out.metric = metric_of<D>();
  out.matches.resize(queries.size());
  parallel_for(queries.size(), threads, [&](std::size_t q) {
    double best = std::numeric_limits<double>::infinity();
    int best_t = -1;
    for (std::size_t t = 0; t < targets.size(); ++t) {
      const double d = descriptor_distance(queries[q], targets[t]);
      if (d < best) {
        best = d;
        best_t = static_cast<int>(t);
      }
    }
    out.matches[q] = {static_cast<int>(q), best_t, best};
  });
  return out;
}

template <typename D>
MatchSet match_nn(const std::vector<D>& queries, const std::vector<D>& targets, int threads = 1) {
  return match_nn(std::span<const D>(queries), std::span<const D>(targets), threads);
}

using DescriptorList = std::variant<std::vector<GeoBitDescriptor>, std::vector<FloatDescriptor>>;

/// Runtime-typed entry point; descriptor kinds must agree.
inline MatchSet match_nn(const DescriptorList& queries, const DescriptorList& targets, int threads = 1) {
  if (queries.index() != targets.index()) throw InputError("match_nn: mixed descriptor kinds");
  return std::visit(
      [&](const auto& q) -> MatchSet {
        using List = std::decay_t<decltype(q)>;
        return match_nn(q, std::get<List>(targets), threads);
      },
      queries);
}

}  // namespace geodesc
