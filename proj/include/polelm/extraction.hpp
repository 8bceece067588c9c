#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polelm/geometry.hpp"

namespace polelm {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

using PointCloud = std::vector<Point3>;

struct Box3 {
  Point3 min;
  Point3 max;
};

struct ExtractionParams {
  double voxel_size = 0.2;        // meters
  int count_threshold = 2;        // reflections per voxel to count as occupied
  double min_height = 1.5;        // minimum stack height, meters
  double max_width = 0.8;         // maximum footprint diameter, meters
  double isolation_radius = 1.6;  // clearance around the footprint, meters
  int slice_count = 10;           // S vertical slices in the descriptor
  double ground_margin = 0.3;     // lowest band above the grid floor ignored
};

// 3D voxel grid of laser-reflection counts.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(Point3 origin, double voxel_size, int nx, int ny, int nz);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  double voxel_size() const { return voxel_size_; }
  const Point3& origin() const { return origin_; }

  std::uint32_t count(int ix, int iy, int iz) const {
    return counts_[index(ix, iy, iz)];
  }
  void add(int ix, int iy, int iz) { ++counts_[index(ix, iy, iz)]; }

  std::uint64_t total_count() const;

  // World-space center of a voxel.
  Point3 voxel_center(int ix, int iy, int iz) const;

 private:
  std::size_t index(int ix, int iy, int iz) const {
    return (static_cast<std::size_t>(iz) * ny_ + iy) * nx_ + ix;
  }

  Point3 origin_;
  double voxel_size_ = 0.2;
  int nx_ = 0, ny_ = 0, nz_ = 0;
  std::vector<std::uint32_t> counts_;
};

struct GridBuildResult {
  OccupancyGrid grid;
  std::size_t dropped = 0;  // points outside the bounds
};

struct PoleDetection {
  Point2 center;
  double width = 0.0;
  std::vector<double> descriptor;  // length 2S+2
};

// Bins points into voxels. Out-of-bounds points are dropped and tallied.
GridBuildResult build_grid(const PointCloud& cloud, const ExtractionParams& params,
                           const Box3& bounds);

// Detects isolated, narrow, tall stacks of occupied voxels.
// Results are sorted by (x, y) of center.
std::vector<PoleDetection> detect_poles(const OccupancyGrid& grid,
                                        const ExtractionParams& params);

// Descriptor layout for S = params.slice_count:
//   [0..S)   occupied-voxel fraction per vertical slice over [0, 2*min_height]
//   [S..2S)  estimated footprint radius per slice, meters
//   [2S]     total stack height, meters
//   [2S+1]   width, meters
std::size_t descriptor_length(const ExtractionParams& params);

// Point cloud file I/O. CSV: one "x,y,z" per line, header optional.
// Binary: 16-byte header ("POLECLOUD1" padded) + uint64 count + float64 triples.
PointCloud load_cloud_csv(const std::string& path);
PointCloud load_cloud_binary(const std::string& path);
void save_cloud_binary(const PointCloud& cloud, const std::string& path);
PointCloud load_cloud(const std::string& path);  // sniffs the magic header

}  // namespace polelm
