#include <doctest.h>

#include <cmath>
#include <random>

#include "polelm/errors.hpp"
#include "polelm/matcher.hpp"
#include "polelm/synth.hpp"

using namespace polelm;

namespace {

PoleMap square_map(int class_base = -1) {
  PoleMap map;
  const Point2 pts[] = {{0, 0}, {10, 0}, {10, 10}, {0, 10}, {4, 7}};
  for (int i = 0; i < 5; ++i) {
    Pole p{i, pts[i], 0.3, std::nullopt, {}};
    if (class_base >= 0) p.class_id = class_base + (i % 2);
    map.poles.push_back(p);
  }
  return map;
}

PoleMap transformed(const PoleMap& map, const Pose2& pose,
                    const std::string& frame) {
  PoleMap out;
  out.frame = frame;
  for (const Pole& p : map.poles) {
    Pole q = p;
    q.center = apply(pose, p.center);
    out.poles.push_back(q);
  }
  return out;
}

}  // namespace

TEST_CASE("estimate_transform: identity, rotation, translation") {
  const Pose2 id =
      estimate_transform({0, 0}, {1, 0}, {0, 0}, {1, 0}, 0.5);
  CHECK(std::abs(id.tx) < 1e-12);
  CHECK(std::abs(id.ty) < 1e-12);
  CHECK(std::abs(id.theta) < 1e-12);

  const Pose2 rot = estimate_transform({0, 0}, {1, 0}, {2, 3}, {2, 4}, 0.5);
  CHECK(rot.tx == doctest::Approx(2.0));
  CHECK(rot.ty == doctest::Approx(3.0));
  CHECK(rot.theta == doctest::Approx(M_PI / 2));
  const Point2 b = apply(rot, {1, 0});
  CHECK(b.x == doctest::Approx(2.0));
  CHECK(b.y == doctest::Approx(4.0));

  const Pose2 tr = estimate_transform({0, 0}, {2, 0}, {5, 0}, {7, 0}, 0.5);
  CHECK(tr.tx == doctest::Approx(5.0));
  CHECK(tr.ty == doctest::Approx(0.0));
  CHECK(std::abs(tr.theta) < 1e-12);
}

TEST_CASE("estimate_transform: degenerate pair rejected") {
  CHECK_THROWS_AS(estimate_transform({0, 0}, {0.1, 0}, {0, 0}, {0.1, 0}, 1.0),
                  DegenerateGeometryError);
}

TEST_CASE("estimate_transform: random noise-free pairs recovered exactly") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> up(-50.0, 50.0);
  std::uniform_real_distribution<double> ua(-10.0, 10.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const Pose2 truth = make_pose(up(rng), up(rng), ua(rng));
    const Point2 la{up(rng), up(rng)};
    Point2 lb{up(rng), up(rng)};
    if (distance(la, lb) < 1.0) lb.x += 2.0;
    const Pose2 est = estimate_transform(la, lb, apply(truth, la),
                                         apply(truth, lb), 0.5);
    CHECK(std::hypot(est.tx - truth.tx, est.ty - truth.ty) < 1e-9);
    CHECK(std::abs(normalize_angle(est.theta - truth.theta)) < 1e-9);
  }
}

TEST_CASE("score_hypothesis: self match and empty local map") {
  const PoleMap global = square_map();
  RansacParams params;
  const ScoreResult self =
      score_hypothesis(Pose2::identity(), global, global, params);
  CHECK(self.score == 5);
  CHECK(self.inlier_pairs.size() == 5);

  PoleMap empty;
  empty.frame = "local";
  CHECK(score_hypothesis(Pose2::identity(), empty, global, params).score == 0);
}

TEST_CASE("score_hypothesis: offset beyond the radius scores zero") {
  const PoleMap global = square_map(0);
  RansacParams params;
  params.inlier_radius = 1.0;
  const Pose2 off = make_pose(2.0 * params.inlier_radius, 0.0, 0.0);
  // Brute-force confirms no transformed pole has a neighbor within radius.
  for (const Pole& p : global.poles) {
    const Point2 moved = apply(off, p.center);
    for (const Pole& q : global.poles)
      CHECK(distance(moved, q.center) > params.inlier_radius);
  }
  CHECK(score_hypothesis(off, global, global, params).score == 0);
  params.mode = ScoringMode::class_gated;
  CHECK(score_hypothesis(off, global, global, params).score == 0);
}

TEST_CASE("score_hypothesis: class_gated dominates baseline pointwise") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 40.0);
  std::uniform_real_distribution<double> ua(-3.0, 3.0);
  std::uniform_int_distribution<int> uc(0, 3);
  for (int trial = 0; trial < 100; ++trial) {
    PoleMap global;
    for (int i = 0; i < 15; ++i)
      global.poles.push_back(Pole{i, {u(rng), u(rng)}, 0.3, uc(rng), {}});
    const Pose2 truth = make_pose(u(rng), u(rng), ua(rng));
    PoleMap local = transformed(global, inverse(truth), "local");
    const Pose2 probe = make_pose(truth.tx + ua(rng) * 0.2,
                                  truth.ty + ua(rng) * 0.2, truth.theta);
    RansacParams params;
    params.mode = ScoringMode::baseline;
    const int base = score_hypothesis(probe, local, global, params).score;
    params.mode = ScoringMode::class_gated;
    const int gated = score_hypothesis(probe, local, global, params).score;
    CHECK(gated >= base);
  }
}

TEST_CASE("score_hypothesis: class_literal counts class-only matches") {
  PoleMap global = square_map(0);       // classes 0,1,0,1,0
  PoleMap local;
  local.frame = "local";
  // One pole far from everything but with a class present in the map.
  local.poles.push_back(Pole{0, {500, 500}, 0.3, 1, {}});
  RansacParams params;
  params.mode = ScoringMode::class_literal;
  CHECK(score_hypothesis(Pose2::identity(), local, global, params).score == 1);
  local.poles[0].class_id = 7;  // class absent from the global map
  CHECK(score_hypothesis(Pose2::identity(), local, global, params).score == 0);
}

TEST_CASE("score_hypothesis: class mode requires class ids") {
  const PoleMap global = square_map();  // no classes
  RansacParams params;
  params.mode = ScoringMode::class_gated;
  CHECK_THROWS_AS(score_hypothesis(Pose2::identity(), global, global, params),
                  std::invalid_argument);
}

TEST_CASE("score_hypothesis: one-to-one claiming") {
  PoleMap global;
  global.poles.push_back(Pole{0, {0, 0}, 0.3, std::nullopt, {}});
  PoleMap local;
  local.frame = "local";
  local.poles.push_back(Pole{0, {0.1, 0}, 0.3, std::nullopt, {}});
  local.poles.push_back(Pole{1, {-0.1, 0}, 0.3, std::nullopt, {}});
  RansacParams params;
  const ScoreResult r = score_hypothesis(Pose2::identity(), local, global, params);
  CHECK(r.score == 1);  // the single global pole can be claimed once
  REQUIRE(r.inlier_pairs.size() == 1);
}

TEST_CASE("ransac_localize: verbatim self match") {
  const PoleMap global = square_map();
  const PoleMap local = transformed(global, Pose2::identity(), "local");
  const DistanceTable table = build_distance_table(global, {});
  RansacParams params;
  const MatchResult r = ransac_localize(local, global, table, params);
  CHECK(r.best.score == 5);
  CHECK(std::abs(r.best.pose.tx) < 1e-9);
  CHECK(std::abs(r.best.pose.ty) < 1e-9);
  CHECK(std::abs(r.best.pose.theta) < 1e-9);
}

TEST_CASE("ransac_localize: exact recovery of a known transform") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  std::uniform_real_distribution<double> ua(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const PoleMap global = square_map();
    const Pose2 truth = make_pose(u(rng), u(rng), ua(rng));
    const PoleMap local = transformed(global, inverse(truth), "local");
    const DistanceTable table = build_distance_table(global, {});
    RansacParams params;
    const MatchResult r = ransac_localize(local, global, table, params);
    for (std::size_t i = 0; i < local.poles.size(); ++i) {
      const Point2 mapped = apply(r.best.pose, local.poles[i].center);
      CHECK(distance(mapped, global.poles[i].center) < 1e-9);
    }
  }
}

TEST_CASE("ransac_localize: error paths") {
  const PoleMap global = square_map();
  const DistanceTable table = build_distance_table(global, {});
  RansacParams params;

  PoleMap tiny;
  tiny.frame = "local";
  tiny.poles.push_back(Pole{0, {0, 0}, 0.3, std::nullopt, {}});
  CHECK_THROWS_AS(ransac_localize(tiny, global, table, params),
                  NoHypothesisError);

  PoleMap empty_global;
  CHECK_THROWS_AS(
      ransac_localize(global, empty_global,
                      build_distance_table(empty_global, {}), params),
      NoHypothesisError);

  // Local pair distances outside the table range find no candidates.
  PoleMap far;
  far.frame = "local";
  far.poles.push_back(Pole{0, {0, 0}, 0.3, std::nullopt, {}});
  far.poles.push_back(Pole{1, {500, 0}, 0.3, std::nullopt, {}});
  CHECK_THROWS_AS(ransac_localize(far, global, table, params),
                  NoHypothesisError);
}

TEST_CASE("ransac_localize: re-scoring consistency and determinism") {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(0.0, 40.0);
  PoleMap global;
  for (int i = 0; i < 12; ++i)
    global.poles.push_back(Pole{i, {u(rng), u(rng)}, 0.3, std::nullopt, {}});
  const Pose2 truth = make_pose(18.0, 12.0, 0.8);
  const PoleMap local = transformed(global, inverse(truth), "local");
  const DistanceTable table = build_distance_table(global, {});
  RansacParams params;
  params.seed = 5;

  const MatchResult a = ransac_localize(local, global, table, params);
  const MatchResult b = ransac_localize(local, global, table, params);
  CHECK(a.best.score == b.best.score);
  CHECK(a.best.index == b.best.index);
  CHECK(a.best.pose.tx == b.best.pose.tx);
  CHECK(a.hypotheses_evaluated == b.hypotheses_evaluated);

  const ScoreResult rescored =
      score_hypothesis(a.best.pose, local, global, params);
  CHECK(rescored.score == a.best.score);
}

TEST_CASE("ransac_localize: rigid equivariance of the argmax") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 40.0);
  PoleMap global;
  for (int i = 0; i < 10; ++i)
    global.poles.push_back(Pole{i, {u(rng), u(rng)}, 0.3, i % 3, {}});
  const Pose2 truth = make_pose(20.0, 10.0, -0.4);
  PoleMap local = transformed(global, inverse(truth), "local");
  for (Pole& p : local.poles) p.class_id = p.id % 3;

  const Pose2 shift = make_pose(-7.0, 3.0, 1.1);
  const PoleMap moved_global = transformed(global, shift, "global");

  RansacParams params;
  params.mode = ScoringMode::class_gated;
  const MatchResult r1 =
      ransac_localize(local, global, build_distance_table(global, {}), params);
  const MatchResult r2 = ransac_localize(
      local, moved_global, build_distance_table(moved_global, {}), params);
  CHECK(r1.best.score == r2.best.score);
  const Pose2 expected = compose(shift, r1.best.pose);
  CHECK(r2.best.pose.tx == doctest::Approx(expected.tx).epsilon(1e-6));
  CHECK(r2.best.pose.ty == doctest::Approx(expected.ty).epsilon(1e-6));
  CHECK(normalize_angle(r2.best.pose.theta - expected.theta) ==
        doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("ransac_localize: agrees with the exhaustive oracle") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 30.0);
  for (int trial = 0; trial < 20; ++trial) {
    PoleMap global;
    for (int i = 0; i < 12; ++i)
      global.poles.push_back(Pole{i, {u(rng), u(rng)}, 0.3, std::nullopt, {}});
    const Pose2 truth = make_pose(u(rng), u(rng), 0.1 * trial);
    PoleMap local = transformed(global, inverse(truth), "local");
    local.poles.resize(8);
    for (int i = 0; i < 8; ++i) local.poles[i].id = i;

    DistanceTableParams tparams;
    tparams.max_distance = 1000.0;  // keep every pair so the oracle set matches
    RansacParams params;
    params.n_input_poles = 100;
    params.max_hypotheses = SIZE_MAX;

    const MatchResult fast =
        ransac_localize(local, global, build_distance_table(global, tparams),
                        params);
    const MatchResult slow = oracle_localize(local, global, params);
    CHECK(fast.best.score == slow.best.score);
    CHECK(fast.hypotheses_evaluated == slow.hypotheses_evaluated);
    CHECK(fast.best.index == slow.best.index);
  }
}
