#pragma once

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "geodesc/error.hpp"
#include "geodesc/evaluation.hpp"
#include "geodesc/geodesic.hpp"
#include "geodesc/matching.hpp"
#include "geodesc/simulation.hpp"

namespace geodesc::io {

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

/// Shortest round-trippable form of a double.
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline void write_keypoints_csv(const std::string& path, const std::vector<Keypoint>& keypoints) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << "id,x,y,response\n";
  for (const auto& k : keypoints) {
    out << k.id << ',' << detail::fmt(k.position.x()) << ',' << detail::fmt(k.position.y()) << ','
        << detail::fmt(k.response) << '\n';
  }
}

/// `id,x,y,response`; the header line is optional and the response column
/// may be omitted.
inline std::vector<Keypoint> read_keypoints_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::vector<Keypoint> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    const auto cells = detail::split_csv(line);
    if (line_no == 1 && !cells.empty() && cells[0] == "id") continue;
    if (cells.size() < 3) throw InputError(path + ":" + std::to_string(line_no) + ": expected id,x,y[,response]");
    try {
      Keypoint k;
      const long long id = std::stoll(cells[0]);
      if (id < 0 || id > 0xFFFFFFFFLL) throw std::out_of_range("id");
      k.id = static_cast<std::uint32_t>(id);
      k.position = {std::stod(cells[1]), std::stod(cells[2])};
      if (cells.size() > 3 && !cells[3].empty()) k.response = std::stod(cells[3]);
      out.push_back(k);
    } catch (const std::exception&) {
      throw InputError(path + ":" + std::to_string(line_no) + ": malformed keypoint row");
    }
  }
  return out;
}

/// Per-match rows `query_id,target_id,distance,correct`; the correct column
/// is dropped when no evaluation is given.
inline void write_match_csv(const std::string& path, const MatchSet& matches, const std::vector<Keypoint>& queries,
                            const std::vector<Keypoint>& targets, const MatchEvaluation* eval) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << (eval ? "query_id,target_id,distance,correct\n" : "query_id,target_id,distance\n");
  for (std::size_t i = 0; i < matches.matches.size(); ++i) {
    const auto& m = matches.matches[i];
    out << queries.at(m.query).id << ',' << targets.at(m.target).id << ',' << detail::fmt(m.distance);
    if (eval) out << ',' << (eval->is_correct[i] ? 1 : 0);
    out << '\n';
  }
}

inline nlohmann::json match_summary(const MatchSet& matches, std::size_t query_count, std::size_t target_count,
                                    const MatchEvaluation* eval, double tau) {
  nlohmann::json j;
  j["metric"] = metric_name(matches.metric);
  j["counts"] = {{"queries", query_count}, {"targets", target_count}, {"matches", matches.matches.size()}};
  j["tau"] = tau;
  if (eval) {
    j["matching_score"] = eval->score;
    j["inliers"] = eval->correct;
  } else {
    j["matching_score"] = nullptr;
    j["inliers"] = nullptr;
  }
  return j;
}

/// One row per particle: grid position, exact projection, world position and
/// z-buffer visibility.
inline void write_particles_csv(const std::string& path, const SyntheticFrame& frame, int cols) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  std::vector<std::uint8_t> is_landmark(frame.projections.size(), 0);
  for (const auto& l : frame.landmarks) is_landmark[l.particle] = 1;
  out << "index,col,row,u,v,x,y,z,visible,landmark\n";
  for (std::size_t i = 0; i < frame.projections.size(); ++i) {
    const auto& p = frame.projections[i];
    const auto& w = frame.positions[i];
    out << i << ',' << (static_cast<int>(i) % cols) << ',' << (static_cast<int>(i) / cols) << ','
        << detail::fmt(p.x()) << ',' << detail::fmt(p.y()) << ',' << detail::fmt(w.x()) << ',' << detail::fmt(w.y())
        << ',' << detail::fmt(w.z()) << ',' << int(frame.visible[i]) << ',' << int(is_landmark[i]) << '\n';
  }
}

}  // namespace geodesc::io
