#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polelm/geometry.hpp"

namespace polelm {

struct Pole {
  int id = 0;
  Point2 center;
  double width = 0.0;
  std::optional<int> class_id;
  std::vector<double> descriptor;
};

struct PoleMap {
  std::vector<Pole> poles;
  std::string frame = "global";  // "global" | "local"

  const Pole* find(int id) const;
};

struct DistanceTableParams {
  double bin_width = 0.5;           // meters
  double max_distance = 60.0;       // meters
  double min_pair_separation = 1.0; // meters; closer pairs are excluded
};

struct PolePair {
  int i = 0;  // global pole ids, ordered
  int j = 0;
  double dist = 0.0;  // true pairwise distance
};

// Index from quantized pairwise distance to the ordered global pole pairs
// at that distance. Both (i, j) and (j, i) are stored.
class DistanceTable {
 public:
  DistanceTable() = default;

  const DistanceTableParams& params() const { return params_; }
  std::size_t pair_count() const { return pair_count_; }

  // All stored pairs whose true distance lies in [d - tol, d + tol],
  // sorted by (i, j).
  std::vector<PolePair> query_pairs(double d, double tol) const;

  friend DistanceTable build_distance_table(const PoleMap& map,
                                            const DistanceTableParams& params);

 private:
  DistanceTableParams params_;
  std::map<long, std::vector<PolePair>> bins_;  // bin index -> pairs
  std::size_t pair_count_ = 0;
};

DistanceTable build_distance_table(const PoleMap& map,
                                   const DistanceTableParams& params);

// CSV persistence. Header: id,x,y,width,class,d0,...,d{D-1}
// `class` empty when unassigned; D = 0 when maps carry no descriptors.
void save_map(const PoleMap& map, const std::string& path);
PoleMap load_map(const std::string& path, const std::string& frame = "global");

}  // namespace polelm
