#include <doctest.h>

#include <cmath>

#include "polelm/errors.hpp"
#include "polelm/synth.hpp"

using namespace polelm;

namespace {

WorldSpec small_world_spec() {
  WorldSpec spec;
  spec.extent_x = 100.0;
  spec.extent_y = 100.0;
  spec.pole_count = 40;
  spec.min_separation = 3.0;
  spec.types = {{3.0, 0.2, 0.02}, {5.0, 0.4, 0.02}};
  spec.seed = 2;
  return spec;
}

}  // namespace

TEST_CASE("generate_world: empty and tiny worlds") {
  WorldSpec spec = small_world_spec();
  spec.pole_count = 0;
  CHECK(generate_world(spec).global.poles.empty());

  spec.pole_count = 2;
  spec.min_separation = 5.0;
  const World w = generate_world(spec);
  REQUIRE(w.global.poles.size() == 2);
  CHECK(distance(w.global.poles[0].center, w.global.poles[1].center) >= 5.0);
}

TEST_CASE("generate_world: separation holds for all pairs") {
  WorldSpec spec = small_world_spec();
  spec.pole_count = 300;
  spec.extent_x = spec.extent_y = 400.0;
  spec.types.push_back({4.0, 0.3, 0.02});
  spec.types.push_back({6.0, 0.25, 0.02});
  const World w = generate_world(spec);
  REQUIRE(w.global.poles.size() == 300);
  REQUIRE(w.true_types.size() == 300);
  for (std::size_t a = 0; a < w.global.poles.size(); ++a)
    for (std::size_t b = a + 1; b < w.global.poles.size(); ++b)
      CHECK(distance(w.global.poles[a].center, w.global.poles[b].center) >=
            spec.min_separation);
  for (int t : w.true_types) {
    CHECK(t >= 0);
    CHECK(t < static_cast<int>(spec.types.size()));
  }
}

TEST_CASE("generate_world: placement failure reported") {
  WorldSpec spec = small_world_spec();
  spec.extent_x = spec.extent_y = 5.0;
  spec.pole_count = 100;
  spec.min_separation = 3.0;
  CHECK_THROWS_AS(generate_world(spec), CapacityError);
}

TEST_CASE("generate_world: seeded determinism") {
  const WorldSpec spec = small_world_spec();
  const World a = generate_world(spec);
  const World b = generate_world(spec);
  REQUIRE(a.global.poles.size() == b.global.poles.size());
  for (std::size_t i = 0; i < a.global.poles.size(); ++i) {
    CHECK(a.global.poles[i].center.x == b.global.poles[i].center.x);
    CHECK(a.global.poles[i].descriptor == b.global.poles[i].descriptor);
  }
  CHECK(a.true_types == b.true_types);
}

TEST_CASE("observe: zero noise is the exact rigid inverse") {
  const World w = generate_world(small_world_spec());
  ObservationSpec obs;
  obs.sensor_range = 1e9;
  obs.true_pose = make_pose(40.0, 60.0, 1.2);
  const PoleMap local = observe(w.global, obs);
  REQUIRE(local.poles.size() == w.global.poles.size());
  const Pose2 inv = inverse(obs.true_pose);
  for (std::size_t i = 0; i < local.poles.size(); ++i)
    CHECK(distance(local.poles[i].center,
                   apply(inv, w.global.poles[i].center)) < 1e-12);
}

TEST_CASE("observe: range restriction") {
  const World w = generate_world(small_world_spec());
  ObservationSpec obs;
  obs.sensor_range = 20.0;
  obs.true_pose = make_pose(50.0, 50.0, 0.0);
  const PoleMap local = observe(w.global, obs);
  std::size_t in_range = 0;
  for (const Pole& p : w.global.poles)
    if (distance(p.center, Point2{50.0, 50.0}) <= 20.0) ++in_range;
  CHECK(local.poles.size() == in_range);
  for (const Pole& p : local.poles)
    CHECK(std::hypot(p.center.x, p.center.y) <= 20.0 + 1e-9);
}

TEST_CASE("observe: full dropout leaves only distractors") {
  const World w = generate_world(small_world_spec());
  ObservationSpec obs;
  obs.sensor_range = 1e9;
  obs.dropout_prob = 1.0;
  obs.distractor_count = 3;
  obs.true_pose = make_pose(50.0, 50.0, 0.0);
  const PoleMap local = observe(w.global, obs);
  CHECK(local.poles.size() == 3);
}

TEST_CASE("observe: noise magnitude matches the half-normal mean") {
  const World w = generate_world(small_world_spec());
  const double sigma = 0.1;
  double total = 0.0;
  std::size_t count = 0;
  for (int trial = 0; trial < 25; ++trial) {
    ObservationSpec obs;
    obs.sensor_range = 1e9;
    obs.position_sigma = sigma;
    obs.true_pose = make_pose(50.0, 50.0, 0.3);
    obs.seed = trial;
    const PoleMap noisy = observe(w.global, obs);
    ObservationSpec clean = obs;
    clean.position_sigma = 0.0;
    const PoleMap exact = observe(w.global, clean);
    REQUIRE(noisy.poles.size() == exact.poles.size());
    for (std::size_t i = 0; i < noisy.poles.size(); ++i) {
      total += distance(noisy.poles[i].center, exact.poles[i].center);
      ++count;
    }
  }
  // 2D Gaussian displacement has Rayleigh mean sigma * sqrt(pi/2).
  const double expected = sigma * std::sqrt(M_PI / 2.0);
  CHECK(total / count == doctest::Approx(expected).epsilon(0.1));
}

TEST_CASE("oracle_localize: identical maps and capacity bounds") {
  PoleMap global;
  const Point2 pts[] = {{0, 0}, {8, 0}, {8, 8}, {2, 6}};
  for (int i = 0; i < 4; ++i)
    global.poles.push_back(Pole{i, pts[i], 0.3, std::nullopt, {}});
  RansacParams params;
  PoleMap local = global;
  local.frame = "local";
  const MatchResult r = oracle_localize(local, global, params);
  CHECK(r.best.score == 4);
  CHECK(std::abs(r.best.pose.tx) < 1e-9);
  CHECK(std::abs(r.best.pose.theta) < 1e-9);

  PoleMap big;
  for (int i = 0; i < 41; ++i)
    big.poles.push_back(Pole{i, {static_cast<double>(2 * i), 0}, 0.3,
                             std::nullopt, {}});
  CHECK_THROWS_AS(oracle_localize(local, big, params), CapacityError);
  PoleMap wide_local;
  wide_local.frame = "local";
  for (int i = 0; i < 13; ++i)
    wide_local.poles.push_back(Pole{i, {static_cast<double>(2 * i), 0}, 0.3,
                                    std::nullopt, {}});
  CHECK_THROWS_AS(oracle_localize(wide_local, global, params), CapacityError);
}

TEST_CASE("oracle_localize: recovers a known transform at zero noise") {
  PoleMap global;
  const Point2 pts[] = {{0, 0}, {9, 1}, {4, 7}, {12, 5}, {2, 12}};
  for (int i = 0; i < 5; ++i)
    global.poles.push_back(Pole{i, pts[i], 0.3, std::nullopt, {}});
  const Pose2 truth = make_pose(3.0, -2.0, 0.9);
  PoleMap local;
  local.frame = "local";
  const Pose2 inv = inverse(truth);
  for (const Pole& p : global.poles) {
    Pole q = p;
    q.center = apply(inv, p.center);
    local.poles.push_back(q);
  }
  RansacParams params;
  const MatchResult r = oracle_localize(local, global, params);
  CHECK(r.best.score == 5);
  CHECK(r.best.pose.tx == doctest::Approx(truth.tx).epsilon(1e-9));
  CHECK(r.best.pose.ty == doctest::Approx(truth.ty).epsilon(1e-9));
  CHECK(r.best.pose.theta == doctest::Approx(truth.theta).epsilon(1e-9));
}
