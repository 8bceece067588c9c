#pragma once

#include <cstdint>
#include <vector>

#include "polelm/extraction.hpp"
#include "polelm/matcher.hpp"
#include "polelm/polemap.hpp"

namespace polelm {

struct PoleTypeSpec {
  double height = 4.0;        // meters
  double width = 0.3;         // meters
  double noise_sigma = 0.05;  // descriptor perturbation
};

struct WorldSpec {
  double extent_x = 200.0;  // meters
  double extent_y = 200.0;
  int pole_count = 300;
  std::vector<PoleTypeSpec> types;  // at least one
  double min_separation = 2.0;      // meters between placed poles
  int slice_count = 10;             // descriptor S, matches extraction
  std::uint64_t seed = 0;
};

struct ObservationSpec {
  double sensor_range = 30.0;      // meters
  double position_sigma = 0.0;     // meters
  double dropout_prob = 0.0;       // [0, 1]
  int distractor_count = 0;
  Pose2 true_pose;
  std::uint64_t seed = 0;
};

struct World {
  PoleMap global;                // frame = "global"
  std::vector<int> true_types;   // per pole, index into spec.types
};

// Places pole_count poles by rejection sampling at min separation; each
// carries a type-derived descriptor. Throws CapacityError when placement
// fails after 10,000 attempts for a pole.
World generate_world(const WorldSpec& spec);

// Simulates one observation: global poles within sensor_range of the true
// position, expressed in the sensor frame, with Gaussian position noise,
// dropouts, and distractor poles mixed in.
PoleMap observe(const PoleMap& global, const ObservationSpec& spec);

// Exhaustive counterpart of ransac_localize: every ordered local pair
// against every distance-compatible ordered global pair, no lookup table,
// no truncation. Bounded to |local| <= 12, |global| <= 40.
MatchResult oracle_localize(const PoleMap& local, const PoleMap& global,
                            const RansacParams& params);

// Voxel-aligned point column for extraction tests: points on voxel centers
// inside a vertical cylinder, points_per_voxel samples in each.
PointCloud make_column_cloud(const Point2& center, double radius, double base_z,
                             double height, double voxel_size,
                             int points_per_voxel);

}  // namespace polelm
