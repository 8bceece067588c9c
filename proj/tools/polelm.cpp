#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polelm/config.hpp"
#include "polelm/errors.hpp"
#include "polelm/eval.hpp"
#include "polelm/extraction.hpp"
#include "polelm/kmeans.hpp"
#include "polelm/matcher.hpp"
#include "polelm/polemap.hpp"
#include "polelm/synth.hpp"

namespace {

using namespace polelm;

// One global seed; every stage derives its own by a fixed offset so stages
// can be reproduced in isolation.
constexpr std::uint64_t kWorldSeedOffset = 1;
constexpr std::uint64_t kClusterSeedOffset = 2;
constexpr std::uint64_t kMatcherSeedOffset = 3;
constexpr std::uint64_t kQuerySeedOffset = 1000;

ExtractionParams extraction_from_config(const Config& cfg) {
  ExtractionParams p;
  p.voxel_size = cfg.get_double("extract.voxel_size", p.voxel_size);
  p.count_threshold =
      static_cast<int>(cfg.get_int("extract.count_threshold", p.count_threshold));
  p.min_height = cfg.get_double("extract.min_height", p.min_height);
  p.max_width = cfg.get_double("extract.max_width", p.max_width);
  p.isolation_radius = cfg.get_double("extract.isolation_radius", p.isolation_radius);
  p.slice_count = static_cast<int>(cfg.get_int("extract.slice_count", p.slice_count));
  p.ground_margin = cfg.get_double("extract.ground_margin", p.ground_margin);
  return p;
}

RansacParams ransac_from_config(const Config& cfg, std::uint64_t seed) {
  RansacParams p;
  p.n_input_poles =
      static_cast<int>(cfg.get_int("ransac.n_input_poles", p.n_input_poles));
  p.inlier_radius = cfg.get_double("ransac.inlier_radius", p.inlier_radius);
  p.distance_tol = cfg.get_double("ransac.distance_tol", p.distance_tol);
  p.min_pair_separation =
      cfg.get_double("ransac.min_pair_separation", p.min_pair_separation);
  p.max_hypotheses = static_cast<std::size_t>(
      cfg.get_int("ransac.max_hypotheses", static_cast<long long>(p.max_hypotheses)));
  p.seed = seed + kMatcherSeedOffset;
  return p;
}

DistanceTableParams table_from_config(const Config& cfg) {
  DistanceTableParams p;
  p.bin_width = cfg.get_double("table.bin_width", p.bin_width);
  p.max_distance = cfg.get_double("table.max_distance", p.max_distance);
  p.min_pair_separation =
      cfg.get_double("table.min_pair_separation", p.min_pair_separation);
  return p;
}

WorldSpec world_from_config(const Config& cfg, std::uint64_t seed) {
  WorldSpec spec;
  spec.extent_x = cfg.get_double("world.extent_x", spec.extent_x);
  spec.extent_y = cfg.get_double("world.extent_y", spec.extent_y);
  spec.pole_count = static_cast<int>(cfg.get_int("world.pole_count"));
  spec.min_separation = cfg.get_double("world.min_separation", spec.min_separation);
  spec.slice_count =
      static_cast<int>(cfg.get_int("world.slice_count", spec.slice_count));
  spec.seed = seed + kWorldSeedOffset;
  const int type_count = static_cast<int>(cfg.get_int("world.type_count", 4));
  for (int t = 0; t < type_count; ++t) {
    PoleTypeSpec ts;
    const std::string prefix = "world.type" + std::to_string(t) + ".";
    ts.height = cfg.get_double(prefix + "height", 2.0 + 1.0 * t);
    ts.width = cfg.get_double(prefix + "width", 0.2 + 0.1 * (t % 3));
    ts.noise_sigma = cfg.get_double(prefix + "noise_sigma", 0.05);
    spec.types.push_back(ts);
  }
  return spec;
}

ObservationSpec observation_from_config(const Config& cfg) {
  ObservationSpec spec;
  spec.sensor_range = cfg.get_double("obs.sensor_range", spec.sensor_range);
  spec.position_sigma = cfg.get_double("obs.position_sigma", spec.position_sigma);
  spec.dropout_prob = cfg.get_double("obs.dropout_prob", spec.dropout_prob);
  spec.distractor_count =
      static_cast<int>(cfg.get_int("obs.distractor_count", spec.distractor_count));
  return spec;
}

std::vector<double> parse_thresholds(const std::string& csv) {
  std::vector<double> out;
  std::istringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  if (out.empty()) throw std::invalid_argument("empty threshold list");
  return out;
}

std::vector<ScoringMode> parse_modes(const std::string& csv) {
  std::vector<ScoringMode> out;
  std::istringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(parse_mode(cell));
  if (out.empty()) throw std::invalid_argument("empty mode list");
  return out;
}

int cmd_extract(const std::string& cloud_path, const std::string& out_path,
                const Config& cfg) {
  const ExtractionParams params = extraction_from_config(cfg);
  const PointCloud cloud = load_cloud(cloud_path);

  Box3 bounds;
  if (cloud.empty()) {
    bounds = Box3{{0, 0, 0}, {1, 1, 1}};
  } else {
    bounds.min = bounds.max = cloud.front();
    for (const Point3& p : cloud) {
      bounds.min.x = std::min(bounds.min.x, p.x);
      bounds.min.y = std::min(bounds.min.y, p.y);
      bounds.min.z = std::min(bounds.min.z, p.z);
      bounds.max.x = std::max(bounds.max.x, p.x);
      bounds.max.y = std::max(bounds.max.y, p.y);
      bounds.max.z = std::max(bounds.max.z, p.z);
    }
    // Pad so boundary points stay in range.
    const double pad = params.voxel_size;
    bounds.min.x -= pad; bounds.min.y -= pad; bounds.min.z -= pad;
    bounds.max.x += pad; bounds.max.y += pad; bounds.max.z += pad;
  }

  const GridBuildResult built = build_grid(cloud, params, bounds);
  const std::vector<PoleDetection> detections = detect_poles(built.grid, params);

  PoleMap map;
  map.frame = "local";
  for (std::size_t i = 0; i < detections.size(); ++i) {
    Pole p;
    p.id = static_cast<int>(i);
    p.center = detections[i].center;
    p.width = detections[i].width;
    p.descriptor = detections[i].descriptor;
    map.poles.push_back(std::move(p));
  }
  save_map(map, out_path);
  std::cout << "points: " << cloud.size() << "\ndropped: " << built.dropped
            << "\npoles: " << map.poles.size() << "\n";
  return 0;
}

int cmd_cluster(const std::string& map_path, const std::string& out_map,
                const std::string& out_model, int k, std::uint64_t seed,
                bool standardize, int max_iters) {
  PoleMap map = load_map(map_path);
  std::vector<std::vector<double>> descriptors;
  for (const Pole& p : map.poles) descriptors.push_back(p.descriptor);

  KMeansParams params;
  params.k = k;
  params.seed = seed + kClusterSeedOffset;
  params.max_iters = max_iters;
  params.standardize = standardize;
  const KMeansResult result = kmeans_fit(descriptors, params);

  for (std::size_t i = 0; i < map.poles.size(); ++i)
    map.poles[i].class_id = result.assignment.labels[i];
  save_map(map, out_map);
  if (!out_model.empty()) save_model(result.model, out_model);
  std::cout << "k: " << result.model.k << "\niterations: " << result.iterations
            << "\nconverged: " << (result.converged ? "yes" : "no") << "\n";
  return 0;
}

int cmd_build_table(const std::string& map_path, const std::string& out_path,
                    const Config& cfg) {
  const PoleMap map = load_map(map_path);
  const DistanceTableParams params = table_from_config(cfg);
  const DistanceTable table = build_distance_table(map, params);
  std::cout << "poles: " << map.poles.size()
            << "\npairs: " << table.pair_count() << "\n";
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << "i,j,dist\n";
    out.precision(17);
    for (const PolePair& p : table.query_pairs(params.max_distance / 2.0,
                                               params.max_distance / 2.0))
      out << p.i << ',' << p.j << ',' << p.dist << '\n';
  }
  return 0;
}

int cmd_localize(const std::string& local_path, const std::string& global_path,
                 const std::string& mode, std::uint64_t seed, const Config& cfg) {
  const PoleMap local = load_map(local_path, "local");
  const PoleMap global = load_map(global_path, "global");
  const DistanceTable table = build_distance_table(global, table_from_config(cfg));
  RansacParams params = ransac_from_config(cfg, seed);
  params.mode = parse_mode(mode);

  const MatchResult result = ransac_localize(local, global, table, params);
  std::cout.precision(17);
  std::cout << result.best.pose.tx << ',' << result.best.pose.ty << ','
            << result.best.pose.theta << ',' << result.best.score << "\n";
  return 0;
}

int cmd_synth(const Config& cfg, std::uint64_t seed, const std::string& out_map,
              const std::string& out_types) {
  const World world = generate_world(world_from_config(cfg, seed));
  save_map(world.global, out_map);
  if (!out_types.empty()) {
    std::ofstream out(out_types);
    if (!out) throw std::runtime_error("cannot write " + out_types);
    out << "id,type\n";
    for (std::size_t i = 0; i < world.true_types.size(); ++i)
      out << world.global.poles[i].id << ',' << world.true_types[i] << '\n';
  }
  std::cout << "poles: " << world.global.poles.size() << "\n";
  return 0;
}

int cmd_eval(const Config& cfg, std::uint64_t seed, const std::string& out_prefix,
             const std::string& modes_csv, const std::string& thresholds_csv) {
  World world = generate_world(world_from_config(cfg, seed));

  // Pseudo classes learned on the global map's own descriptors.
  std::vector<std::vector<double>> descriptors;
  for (const Pole& p : world.global.poles) descriptors.push_back(p.descriptor);
  KMeansParams kparams;
  kparams.k = static_cast<int>(cfg.get_int("kmeans.k", 4));
  kparams.seed = seed + kClusterSeedOffset;
  kparams.max_iters = static_cast<int>(cfg.get_int("kmeans.max_iters", 300));
  const KMeansResult clusters = kmeans_fit(descriptors, kparams);
  for (std::size_t i = 0; i < world.global.poles.size(); ++i)
    world.global.poles[i].class_id = clusters.assignment.labels[i];

  const int query_count = static_cast<int>(cfg.get_int("eval.query_count"));
  if (query_count <= 0) throw std::invalid_argument("eval.query_count must be > 0");
  const ObservationSpec obs_template = observation_from_config(cfg);
  const WorldSpec wspec = world_from_config(cfg, seed);

  std::mt19937_64 rng(seed + kQuerySeedOffset);
  const double margin = std::min({obs_template.sensor_range, wspec.extent_x / 4.0,
                                  wspec.extent_y / 4.0});
  std::uniform_real_distribution<double> ux(margin, wspec.extent_x - margin);
  std::uniform_real_distribution<double> uy(margin, wspec.extent_y - margin);
  std::uniform_real_distribution<double> uth(-M_PI, M_PI);

  ExperimentConfig config;
  for (int q = 0; q < query_count; ++q) {
    ObservationSpec obs = obs_template;
    obs.true_pose = make_pose(ux(rng), uy(rng), uth(rng));
    obs.seed = seed + kQuerySeedOffset + 1 + static_cast<std::uint64_t>(q);
    config.queries.push_back(obs);
  }
  config.matcher = ransac_from_config(cfg, seed);
  config.table = table_from_config(cfg);
  config.modes = parse_modes(modes_csv);
  config.thresholds = parse_thresholds(thresholds_csv);
  config.class_model = &clusters.model;

  const ExperimentResult result = run_experiment(world.global, config);
  save_records_csv(result.records, out_prefix + "_records.csv");
  save_report_csv(result.report, out_prefix + "_report.csv");
  std::cout << format_report_text(result.report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pole-landmark self-localization toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // --seed/--config may follow the subcommand

  std::string config_path;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "key = value config file");
  app.add_option("--seed", seed, "global seed; stages derive fixed offsets");

  std::string cloud_path, map_path, out_path, out_model, out_types, out_prefix;
  std::string local_path, global_path;
  std::string mode = "baseline";
  std::string modes_csv = "baseline,class_gated";
  std::string thresholds_csv = "5,1";
  int k = 200;
  int max_iters = 300;
  bool standardize = false;

  auto* extract = app.add_subcommand("extract", "Detect poles in a point cloud");
  extract->add_option("--cloud", cloud_path, "input cloud (CSV or binary)")
      ->required();
  extract->add_option("--out", out_path, "output pole map CSV")->required();

  auto* cluster = app.add_subcommand("cluster", "Learn pseudo pole classes");
  cluster->add_option("--map", map_path, "pole map CSV with descriptors")
      ->required();
  cluster->add_option("--out-map", out_path, "map CSV with classes filled")
      ->required();
  cluster->add_option("--out-model", out_model, "centroid model CSV");
  cluster->add_option("--k", k, "cluster count");
  cluster->add_option("--max-iters", max_iters, "iteration cap");
  cluster->add_flag("--standardize", standardize, "z-score descriptors");

  auto* build_table = app.add_subcommand("build-table", "Build the pairwise distance table");
  build_table->add_option("--map", map_path, "global pole map CSV")->required();
  build_table->add_option("--out", out_path, "optional pair dump CSV");

  auto* localize = app.add_subcommand("localize", "RANSAC local-to-global matching");
  localize->add_option("--local", local_path, "local pole map CSV")->required();
  localize->add_option("--global", global_path, "global pole map CSV")->required();
  localize->add_option("--mode", mode, "baseline|class_gated|class_literal");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic pole world");
  synth->add_option("--out", out_path, "output global map CSV")->required();
  synth->add_option("--out-types", out_types, "ground-truth type CSV");

  auto* eval = app.add_subcommand("eval", "Run a localization experiment");
  eval->add_option("--out-prefix", out_prefix, "output file prefix")->required();
  eval->add_option("--modes", modes_csv, "comma-separated scoring modes");
  eval->add_option("--thresholds", thresholds_csv, "comma-separated meters");

  CLI11_PARSE(app, argc, argv);

  try {
    Config cfg;
    if (!config_path.empty()) cfg = polelm::Config::load(config_path);

    if (extract->parsed()) return cmd_extract(cloud_path, out_path, cfg);
    if (cluster->parsed())
      return cmd_cluster(map_path, out_path, out_model, k, seed, standardize,
                         max_iters);
    if (build_table->parsed()) return cmd_build_table(map_path, out_path, cfg);
    if (localize->parsed())
      return cmd_localize(local_path, global_path, mode, seed, cfg);
    if (synth->parsed()) return cmd_synth(cfg, seed, out_path, out_types);
    if (eval->parsed())
      return cmd_eval(cfg, seed, out_prefix, modes_csv, thresholds_csv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
