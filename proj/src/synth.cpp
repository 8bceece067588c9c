#include "polelm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "polelm/errors.hpp"

namespace polelm {

namespace {

// Ideal descriptor for an isolated cylinder in the extraction layout.
std::vector<double> type_descriptor(const PoleTypeSpec& type, int slice_count,
                                    double span) {
  const int S = slice_count;
  std::vector<double> desc(2 * S + 2, 0.0);
  const double slice_h = span / S;
  for (int s = 0; s < S; ++s) {
    const double filled =
        std::clamp((type.height - s * slice_h) / slice_h, 0.0, 1.0);
    desc[s] = filled;
    desc[S + s] = filled > 0.0 ? type.width / 2.0 : 0.0;
  }
  desc[2 * S] = type.height;
  desc[2 * S + 1] = type.width;
  return desc;
}

}  // namespace

World generate_world(const WorldSpec& spec) {
  if (spec.types.empty())
    throw std::invalid_argument("world spec needs at least one pole type");
  if (spec.pole_count < 0)
    throw std::invalid_argument("pole_count must be >= 0");
  if (spec.min_separation <= 0.0)
    throw std::invalid_argument("min_separation must be > 0");

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> ux(0.0, spec.extent_x);
  std::uniform_real_distribution<double> uy(0.0, spec.extent_y);
  std::uniform_int_distribution<int> utype(0,
                                           static_cast<int>(spec.types.size()) - 1);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const double span = 2.0 * 1.5;  // descriptor window, matches extraction defaults

  World world;
  world.global.frame = "global";
  for (int i = 0; i < spec.pole_count; ++i) {
    Point2 pos;
    bool placed = false;
    for (int attempt = 0; attempt < 10000; ++attempt) {
      pos = Point2{ux(rng), uy(rng)};
      bool clear = true;
      for (const Pole& other : world.global.poles)
        if (distance(other.center, pos) < spec.min_separation) {
          clear = false;
          break;
        }
      if (clear) {
        placed = true;
        break;
      }
    }
    if (!placed)
      throw CapacityError("could not place pole " + std::to_string(i) +
                          " at min separation " +
                          std::to_string(spec.min_separation));

    const int type = utype(rng);
    const PoleTypeSpec& ts = spec.types[type];
    Pole pole;
    pole.id = i;
    pole.center = pos;
    pole.width = ts.width;
    pole.descriptor = type_descriptor(ts, spec.slice_count, span);
    if (ts.noise_sigma > 0.0)
      for (double& v : pole.descriptor) v += ts.noise_sigma * gauss(rng);
    world.global.poles.push_back(std::move(pole));
    world.true_types.push_back(type);
  }
  return world;
}

PoleMap observe(const PoleMap& global, const ObservationSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const Point2 sensor_pos{spec.true_pose.tx, spec.true_pose.ty};
  const Pose2 world_to_sensor = inverse(spec.true_pose);

  PoleMap local;
  local.frame = "local";
  int next_id = 0;
  for (const Pole& gp : global.poles) {
    if (distance(gp.center, sensor_pos) > spec.sensor_range) continue;
    if (u01(rng) < spec.dropout_prob) continue;
    Pole lp = gp;
    lp.id = next_id++;
    lp.center = apply(world_to_sensor, gp.center);
    if (spec.position_sigma > 0.0) {
      lp.center.x += spec.position_sigma * gauss(rng);
      lp.center.y += spec.position_sigma * gauss(rng);
    }
    local.poles.push_back(std::move(lp));
  }

  // Distractors: random in-range positions with descriptors blended from
  // real poles so they are confusable rather than trivially separable.
  std::uniform_real_distribution<double> uang(0.0, 2.0 * M_PI);
  for (int i = 0; i < spec.distractor_count; ++i) {
    Pole dp;
    dp.id = next_id++;
    const double r = spec.sensor_range * std::sqrt(u01(rng));
    const double a = uang(rng);
    dp.center = Point2{r * std::cos(a), r * std::sin(a)};
    if (!global.poles.empty()) {
      std::uniform_int_distribution<std::size_t> upole(0, global.poles.size() - 1);
      const Pole& p1 = global.poles[upole(rng)];
      const Pole& p2 = global.poles[upole(rng)];
      const double t = u01(rng);
      dp.width = t * p1.width + (1.0 - t) * p2.width;
      dp.descriptor.resize(std::min(p1.descriptor.size(), p2.descriptor.size()));
      for (std::size_t j = 0; j < dp.descriptor.size(); ++j)
        dp.descriptor[j] = t * p1.descriptor[j] + (1.0 - t) * p2.descriptor[j] +
                           0.15 * (u01(rng) * 2.0 - 1.0);
    } else {
      dp.width = 0.3;
    }
    local.poles.push_back(std::move(dp));
  }
  return local;
}

MatchResult oracle_localize(const PoleMap& local, const PoleMap& global,
                            const RansacParams& params) {
  if (local.poles.size() > 12)
    throw CapacityError("oracle bound exceeded: |local| > 12");
  if (global.poles.size() > 40)
    throw CapacityError("oracle bound exceeded: |global| > 40");
  if (global.poles.empty()) throw NoHypothesisError("global map is empty");
  if (local.poles.size() < 2)
    throw NoHypothesisError("local map has fewer than 2 poles");

  // Global poles in id order so enumeration matches the lookup-table path.
  std::vector<const Pole*> gsorted;
  for (const Pole& p : global.poles) gsorted.push_back(&p);
  std::sort(gsorted.begin(), gsorted.end(),
            [](const Pole* a, const Pole* b) { return a->id < b->id; });

  MatchResult result;
  bool have_best = false;
  std::size_t index = 0;
  bool any_valid_pair = false;

  for (std::size_t ai = 0; ai < local.poles.size(); ++ai) {
    for (std::size_t bi = 0; bi < local.poles.size(); ++bi) {
      if (ai == bi) continue;
      const Pole& la = local.poles[ai];
      const Pole& lb = local.poles[bi];
      const double d = distance(la.center, lb.center);
      if (d < params.min_pair_separation) continue;
      any_valid_pair = true;

      for (const Pole* ga : gsorted) {
        for (const Pole* gb : gsorted) {
          if (ga == gb) continue;
          const double gd = distance(ga->center, gb->center);
          if (gd <= params.min_pair_separation) continue;
          if (gd < d - params.distance_tol || gd > d + params.distance_tol)
            continue;
          Pose2 pose = estimate_transform(la.center, lb.center, ga->center,
                                          gb->center, params.min_pair_separation);
          const ScoreResult score = score_hypothesis(pose, local, global, params);
          if (!have_best || score.score > result.best.score) {
            result.best = Hypothesis{pose, score.score, {la.id, lb.id},
                                     {ga->id, gb->id}, index};
            result.inlier_pairs = score.inlier_pairs;
            have_best = true;
          }
          ++index;
        }
      }
    }
  }
  result.hypotheses_evaluated = index;
  if (!have_best) {
    if (!any_valid_pair)
      throw NoHypothesisError("no non-degenerate local pole pair");
    throw NoHypothesisError("no distance-compatible global pair found");
  }
  return result;
}

PointCloud make_column_cloud(const Point2& center, double radius, double base_z,
                             double height, double voxel_size,
                             int points_per_voxel) {
  PointCloud cloud;
  const int nz = static_cast<int>(std::ceil(height / voxel_size));
  const int nr = static_cast<int>(std::ceil(radius / voxel_size)) + 1;
  for (int iz = 0; iz < nz; ++iz) {
    const double z = base_z + (iz + 0.5) * voxel_size;
    for (int ix = -nr; ix <= nr; ++ix) {
      for (int iy = -nr; iy <= nr; ++iy) {
        // Snap to the voxel lattice anchored at the column center.
        const double x = center.x + ix * voxel_size;
        const double y = center.y + iy * voxel_size;
        if (std::hypot(x - center.x, y - center.y) > radius) continue;
        for (int k = 0; k < points_per_voxel; ++k)
          cloud.push_back(Point3{x, y, z});
      }
    }
  }
  return cloud;
}

}  // namespace polelm
