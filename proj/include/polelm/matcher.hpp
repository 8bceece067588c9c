#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "polelm/geometry.hpp"
#include "polelm/polemap.hpp"

namespace polelm {

enum class ScoringMode {
  baseline,      // +1 per position inlier
  class_gated,   // +1 per inlier, +1 more if classes also match
  class_literal, // +1 if inlier OR the class exists anywhere in the global map
};

ScoringMode parse_mode(const std::string& name);
std::string mode_name(ScoringMode mode);

struct RansacParams {
  int n_input_poles = 20;
  double inlier_radius = 1.0;   // meters
  double distance_tol = 0.5;    // meters, lookup-table query tolerance
  double min_pair_separation = 1.0;  // meters, degenerate-pair cutoff
  std::size_t max_hypotheses = 50000;
  std::uint64_t seed = 0;
  ScoringMode mode = ScoringMode::baseline;
};

struct Hypothesis {
  Pose2 pose;
  int score = 0;
  std::pair<int, int> local_pair{-1, -1};   // local pole ids
  std::pair<int, int> global_pair{-1, -1};  // global pole ids
  std::size_t index = 0;  // generation order
};

struct MatchResult {
  Hypothesis best;
  std::vector<std::pair<int, int>> inlier_pairs;  // (local id, global id)
  std::size_t hypotheses_evaluated = 0;
};

// The unique SE(2) transform taking local_a -> global_a exactly and
// rotating local_b toward global_b. Throws DegenerateGeometryError when
// the local pair is shorter than min_separation.
Pose2 estimate_transform(const Point2& local_a, const Point2& local_b,
                         const Point2& global_a, const Point2& global_b,
                         double min_separation = 1.0);

struct ScoreResult {
  int score = 0;
  std::vector<std::pair<int, int>> inlier_pairs;  // (local id, global id)
};

// Scores a pose by nearest-neighbor matching of transformed local poles
// against the global map. Each global pole is claimed by at most one local
// pole, greedily by ascending match distance.
ScoreResult score_hypothesis(const Pose2& pose, const PoleMap& local,
                             const PoleMap& global, const RansacParams& params);

// Full RANSAC: sample up to n_input_poles local poles, enumerate ordered
// local pairs, look up distance-compatible global pairs, build and score
// one hypothesis per correspondence, return the argmax by (score, -index).
MatchResult ransac_localize(const PoleMap& local, const PoleMap& global,
                            const DistanceTable& table,
                            const RansacParams& params);

}  // namespace polelm
