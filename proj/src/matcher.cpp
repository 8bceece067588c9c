#include "polelm/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "polelm/errors.hpp"

namespace polelm {

ScoringMode parse_mode(const std::string& name) {
  if (name == "baseline") return ScoringMode::baseline;
  if (name == "class_gated") return ScoringMode::class_gated;
  if (name == "class_literal") return ScoringMode::class_literal;
  throw std::invalid_argument("unknown scoring mode: " + name);
}

std::string mode_name(ScoringMode mode) {
  switch (mode) {
    case ScoringMode::baseline: return "baseline";
    case ScoringMode::class_gated: return "class_gated";
    case ScoringMode::class_literal: return "class_literal";
  }
  return "?";
}

Pose2 estimate_transform(const Point2& local_a, const Point2& local_b,
                         const Point2& global_a, const Point2& global_b,
                         double min_separation) {
  const double len = distance(local_a, local_b);
  if (len < min_separation)
    throw DegenerateGeometryError("local pair separation " +
                                  std::to_string(len) + " below minimum " +
                                  std::to_string(min_separation));
  const double theta =
      std::atan2(global_b.y - global_a.y, global_b.x - global_a.x) -
      std::atan2(local_b.y - local_a.y, local_b.x - local_a.x);
  Pose2 pose = make_pose(0.0, 0.0, theta);
  const Point2 rotated = apply(pose, local_a);
  pose.tx = global_a.x - rotated.x;
  pose.ty = global_a.y - rotated.y;
  return pose;
}

namespace {

// Uniform cell grid over the global poles, cell = inlier_radius. A 3x3
// neighborhood scan covers every pole within one radius exactly.
class NNGrid {
 public:
  NNGrid(const PoleMap& global, double radius) : radius_(radius) {
    for (std::size_t i = 0; i < global.poles.size(); ++i)
      cells_[key(global.poles[i].center)].push_back(i);
    poles_ = &global.poles;
  }

  // Indices of global poles within radius of p, with distances.
  void within_radius(const Point2& p,
                     std::vector<std::pair<double, std::size_t>>& out) const {
    out.clear();
    const long cx = cell_coord(p.x);
    const long cy = cell_coord(p.y);
    for (long dx = -1; dx <= 1; ++dx)
      for (long dy = -1; dy <= 1; ++dy) {
        auto it = cells_.find((cx + dx) * 0x100000 + (cy + dy));
        if (it == cells_.end()) continue;
        for (std::size_t idx : it->second) {
          const double d = distance((*poles_)[idx].center, p);
          if (d <= radius_) out.emplace_back(d, idx);
        }
      }
  }

 private:
  long cell_coord(double v) const {
    return static_cast<long>(std::floor(v / radius_));
  }
  long key(const Point2& p) const {
    return cell_coord(p.x) * 0x100000 + cell_coord(p.y);
  }

  double radius_;
  const std::vector<Pole>* poles_ = nullptr;
  std::unordered_map<long, std::vector<std::size_t>> cells_;
};

struct Candidate {
  double dist;
  std::size_t local_idx;
  std::size_t global_idx;
};

ScoreResult score_with_grid(const Pose2& pose, const PoleMap& local,
                            const PoleMap& global, const NNGrid& grid,
                            const RansacParams& params,
                            const std::set<int>& global_classes) {
  const bool class_mode = params.mode != ScoringMode::baseline;
  if (class_mode) {
    for (const Pole& p : local.poles)
      if (!p.class_id)
        throw std::invalid_argument("local pole " + std::to_string(p.id) +
                                    " lacks a class id in class mode");
    for (const Pole& p : global.poles)
      if (!p.class_id)
        throw std::invalid_argument("global pole " + std::to_string(p.id) +
                                    " lacks a class id in class mode");
  }

  // Candidate matches within the inlier radius, greedily one-to-one by
  // ascending distance.
  std::vector<Candidate> candidates;
  std::vector<std::pair<double, std::size_t>> near;
  for (std::size_t li = 0; li < local.poles.size(); ++li) {
    const Point2 mapped = apply(pose, local.poles[li].center);
    grid.within_radius(mapped, near);
    for (const auto& [d, gi] : near) candidates.push_back({d, li, gi});
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.dist != b.dist) return a.dist < b.dist;
              if (a.local_idx != b.local_idx) return a.local_idx < b.local_idx;
              return a.global_idx < b.global_idx;
            });

  std::vector<char> local_claimed(local.poles.size(), 0);
  std::vector<char> global_claimed(global.poles.size(), 0);
  ScoreResult result;
  for (const Candidate& c : candidates) {
    if (local_claimed[c.local_idx] || global_claimed[c.global_idx]) continue;
    local_claimed[c.local_idx] = 1;
    global_claimed[c.global_idx] = 1;
    const Pole& lp = local.poles[c.local_idx];
    const Pole& gp = global.poles[c.global_idx];
    result.inlier_pairs.emplace_back(lp.id, gp.id);
    switch (params.mode) {
      case ScoringMode::baseline:
      case ScoringMode::class_literal:
        result.score += 1;
        break;
      case ScoringMode::class_gated:
        result.score += 1;
        if (*lp.class_id == *gp.class_id) result.score += 1;
        break;
    }
  }

  if (params.mode == ScoringMode::class_literal) {
    // Literal reading: a pole that missed on position still scores when its
    // class appears anywhere in the global map.
    for (std::size_t li = 0; li < local.poles.size(); ++li) {
      if (local_claimed[li]) continue;
      if (global_classes.count(*local.poles[li].class_id)) result.score += 1;
    }
  }
  return result;
}

std::set<int> collect_classes(const PoleMap& global) {
  std::set<int> classes;
  for (const Pole& p : global.poles)
    if (p.class_id) classes.insert(*p.class_id);
  return classes;
}

}  // namespace

ScoreResult score_hypothesis(const Pose2& pose, const PoleMap& local,
                             const PoleMap& global, const RansacParams& params) {
  NNGrid grid(global, params.inlier_radius);
  return score_with_grid(pose, local, global, grid, params,
                         collect_classes(global));
}

MatchResult ransac_localize(const PoleMap& local, const PoleMap& global,
                            const DistanceTable& table,
                            const RansacParams& params) {
  if (global.poles.empty())
    throw NoHypothesisError("no hypothesis: global map is empty");
  if (local.poles.size() < 2)
    throw NoHypothesisError("no hypothesis: local map has fewer than 2 poles");

  // Seed-determined subset when the local map exceeds n_input_poles.
  std::vector<std::size_t> selected(local.poles.size());
  std::iota(selected.begin(), selected.end(), std::size_t{0});
  if (selected.size() > static_cast<std::size_t>(params.n_input_poles)) {
    std::mt19937_64 rng(params.seed);
    for (std::size_t i = 0; i < static_cast<std::size_t>(params.n_input_poles);
         ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, selected.size() - 1);
      std::swap(selected[i], selected[pick(rng)]);
    }
    selected.resize(params.n_input_poles);
    std::sort(selected.begin(), selected.end());
  }

  std::unordered_map<int, std::size_t> global_by_id;
  for (std::size_t i = 0; i < global.poles.size(); ++i)
    global_by_id[global.poles[i].id] = i;

  NNGrid grid(global, params.inlier_radius);
  const std::set<int> global_classes = collect_classes(global);

  MatchResult result;
  bool have_best = false;
  std::size_t index = 0;
  bool any_valid_pair = false;

  for (std::size_t ai = 0; ai < selected.size() && index < params.max_hypotheses;
       ++ai) {
    for (std::size_t bi = 0; bi < selected.size() && index < params.max_hypotheses;
         ++bi) {
      if (ai == bi) continue;
      const Pole& la = local.poles[selected[ai]];
      const Pole& lb = local.poles[selected[bi]];
      const double d = distance(la.center, lb.center);
      if (d < params.min_pair_separation) continue;
      any_valid_pair = true;

      for (const PolePair& gp : table.query_pairs(d, params.distance_tol)) {
        if (index >= params.max_hypotheses) break;
        const Pole& ga = global.poles[global_by_id.at(gp.i)];
        const Pole& gb = global.poles[global_by_id.at(gp.j)];
        Pose2 pose = estimate_transform(la.center, lb.center, ga.center,
                                        gb.center, params.min_pair_separation);
        const ScoreResult score =
            score_with_grid(pose, local, global, grid, params, global_classes);
        if (!have_best || score.score > result.best.score) {
          result.best = Hypothesis{pose, score.score, {la.id, lb.id},
                                   {ga.id, gb.id}, index};
          result.inlier_pairs = score.inlier_pairs;
          have_best = true;
        }
        ++index;
      }
    }
  }
  result.hypotheses_evaluated = index;

  if (!have_best) {
    if (!any_valid_pair)
      throw NoHypothesisError("no hypothesis: no non-degenerate local pole pair");
    throw NoHypothesisError(
        "no hypothesis: no distance-compatible global pair found");
  }
  return result;
}

}  // namespace polelm
