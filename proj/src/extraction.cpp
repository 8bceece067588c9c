#include "polelm/extraction.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "polelm/errors.hpp"

namespace polelm {

namespace {

constexpr char kCloudMagic[16] = {'P', 'O', 'L', 'E', 'C', 'L', 'O', 'U',
                                  'D', '1', 0,   0,   0,   0,   0,   0};

}  // namespace

OccupancyGrid::OccupancyGrid(Point3 origin, double voxel_size, int nx, int ny,
                             int nz)
    : origin_(origin),
      voxel_size_(voxel_size),
      nx_(nx),
      ny_(ny),
      nz_(nz),
      counts_(static_cast<std::size_t>(nx) * ny * nz, 0) {}

std::uint64_t OccupancyGrid::total_count() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

Point3 OccupancyGrid::voxel_center(int ix, int iy, int iz) const {
  return Point3{origin_.x + (ix + 0.5) * voxel_size_,
                origin_.y + (iy + 0.5) * voxel_size_,
                origin_.z + (iz + 0.5) * voxel_size_};
}

GridBuildResult build_grid(const PointCloud& cloud,
                           const ExtractionParams& params, const Box3& bounds) {
  if (params.voxel_size <= 0.0)
    throw std::invalid_argument("voxel_size must be > 0");
  const double ex = bounds.max.x - bounds.min.x;
  const double ey = bounds.max.y - bounds.min.y;
  const double ez = bounds.max.z - bounds.min.z;
  if (ex <= 0.0 || ey <= 0.0 || ez <= 0.0)
    throw std::invalid_argument("degenerate bounds: every extent must be > 0");

  const double v = params.voxel_size;
  const int nx = static_cast<int>(std::ceil(ex / v));
  const int ny = static_cast<int>(std::ceil(ey / v));
  const int nz = static_cast<int>(std::ceil(ez / v));

  GridBuildResult result;
  result.grid = OccupancyGrid(bounds.min, v, nx, ny, nz);
  for (const Point3& p : cloud) {
    const int ix = static_cast<int>(std::floor((p.x - bounds.min.x) / v));
    const int iy = static_cast<int>(std::floor((p.y - bounds.min.y) / v));
    const int iz = static_cast<int>(std::floor((p.z - bounds.min.z) / v));
    if (ix < 0 || ix >= nx || iy < 0 || iy >= ny || iz < 0 || iz >= nz) {
      ++result.dropped;
      continue;
    }
    result.grid.add(ix, iy, iz);
  }
  return result;
}

std::size_t descriptor_length(const ExtractionParams& params) {
  return 2 * static_cast<std::size_t>(params.slice_count) + 2;
}

namespace {

struct Voxel {
  int ix, iy, iz;
};

// One 26-connected component of occupied voxels.
struct Stack {
  std::vector<Voxel> voxels;
  int min_iz = 0, max_iz = 0;
};

std::vector<double> build_descriptor(const Stack& stack,
                                     const OccupancyGrid& grid,
                                     const ExtractionParams& params,
                                     const Point2& center, double width) {
  const int S = params.slice_count;
  const double v = grid.voxel_size();
  std::vector<double> desc(descriptor_length(params), 0.0);

  std::set<std::pair<int, int>> footprint;
  for (const Voxel& vox : stack.voxels) footprint.insert({vox.ix, vox.iy});

  const double span = 2.0 * params.min_height;
  const double slice_h = span / S;
  const double base_z = stack.min_iz * v;  // relative to grid floor

  std::vector<int> occupied_per_slice(S, 0);
  std::vector<int> layers_per_slice(S, 0);
  std::vector<double> radius_per_slice(S, 0.0);

  // Count voxel layers whose center falls inside each slice; layers above
  // the grid top cannot be occupied and do not count toward capacity.
  for (int iz = stack.min_iz; iz < grid.nz(); ++iz) {
    const double zc = (iz + 0.5) * v - base_z;
    if (zc >= span) break;
    const int s = std::min(S - 1, static_cast<int>(zc / slice_h));
    ++layers_per_slice[s];
  }

  for (const Voxel& vox : stack.voxels) {
    const double zc = (vox.iz + 0.5) * v - base_z;
    if (zc < 0.0 || zc >= span) continue;  // clamped to the descriptor window
    const int s = std::min(S - 1, static_cast<int>(zc / slice_h));
    ++occupied_per_slice[s];
    const Point3 c = grid.voxel_center(vox.ix, vox.iy, vox.iz);
    const double r =
        std::hypot(c.x - center.x, c.y - center.y) + 0.5 * v;
    radius_per_slice[s] = std::max(radius_per_slice[s], r);
  }

  for (int s = 0; s < S; ++s) {
    const std::size_t capacity =
        footprint.size() * static_cast<std::size_t>(layers_per_slice[s]);
    desc[s] = capacity == 0 ? 0.0
                            : static_cast<double>(occupied_per_slice[s]) /
                                  static_cast<double>(capacity);
    desc[S + s] = radius_per_slice[s];
  }
  desc[2 * S] = (stack.max_iz - stack.min_iz + 1) * v;  // stack height
  desc[2 * S + 1] = width;
  return desc;
}

}  // namespace

std::vector<PoleDetection> detect_poles(const OccupancyGrid& grid,
                                        const ExtractionParams& params) {
  const double v = grid.voxel_size();
  const int ground_layers =
      static_cast<int>(std::ceil(params.ground_margin / v - 1e-9));

  const int nx = grid.nx(), ny = grid.ny(), nz = grid.nz();
  auto occupied = [&](int ix, int iy, int iz) {
    return iz >= ground_layers &&
           grid.count(ix, iy, iz) >=
               static_cast<std::uint32_t>(params.count_threshold);
  };

  // Columns containing at least one occupied voxel, for the isolation check.
  std::set<std::pair<int, int>> occupied_columns;
  for (int iz = ground_layers; iz < nz; ++iz)
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix)
        if (occupied(ix, iy, iz)) occupied_columns.insert({ix, iy});

  // 26-connected components of occupied voxels.
  std::vector<char> visited(static_cast<std::size_t>(nx) * ny * nz, 0);
  auto lin = [&](int ix, int iy, int iz) {
    return (static_cast<std::size_t>(iz) * ny + iy) * nx + ix;
  };
  std::vector<Stack> stacks;
  for (int iz = ground_layers; iz < nz; ++iz) {
    for (int iy = 0; iy < ny; ++iy) {
      for (int ix = 0; ix < nx; ++ix) {
        if (!occupied(ix, iy, iz) || visited[lin(ix, iy, iz)]) continue;
        Stack stack;
        stack.min_iz = stack.max_iz = iz;
        std::vector<Voxel> frontier{{ix, iy, iz}};
        visited[lin(ix, iy, iz)] = 1;
        while (!frontier.empty()) {
          Voxel cur = frontier.back();
          frontier.pop_back();
          stack.voxels.push_back(cur);
          stack.min_iz = std::min(stack.min_iz, cur.iz);
          stack.max_iz = std::max(stack.max_iz, cur.iz);
          for (int dz = -1; dz <= 1; ++dz)
            for (int dy = -1; dy <= 1; ++dy)
              for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0 && dz == 0) continue;
                const int jx = cur.ix + dx, jy = cur.iy + dy, jz = cur.iz + dz;
                if (jx < 0 || jx >= nx || jy < 0 || jy >= ny || jz < 0 ||
                    jz >= nz)
                  continue;
                if (!occupied(jx, jy, jz) || visited[lin(jx, jy, jz)]) continue;
                visited[lin(jx, jy, jz)] = 1;
                frontier.push_back({jx, jy, jz});
              }
        }
        stacks.push_back(std::move(stack));
      }
    }
  }

  std::vector<PoleDetection> detections;
  for (const Stack& stack : stacks) {
    const double height = (stack.max_iz - stack.min_iz + 1) * v;
    if (height < params.min_height) continue;

    std::set<std::pair<int, int>> footprint;
    for (const Voxel& vox : stack.voxels) footprint.insert({vox.ix, vox.iy});

    // Horizontal extent: bounding-circle diameter of the footprint.
    double max_pair = 0.0;
    for (auto a = footprint.begin(); a != footprint.end(); ++a)
      for (auto b = std::next(a); b != footprint.end(); ++b)
        max_pair = std::max(
            max_pair, v * std::hypot(static_cast<double>(a->first - b->first),
                                     static_cast<double>(a->second - b->second)));
    const double width = max_pair + v;
    if (width > params.max_width) continue;

    // Isolation: no occupied column outside the footprint within radius.
    bool isolated = true;
    for (const auto& col : occupied_columns) {
      if (footprint.count(col)) continue;
      for (const auto& own : footprint) {
        const double d = v * std::hypot(static_cast<double>(col.first - own.first),
                                        static_cast<double>(col.second - own.second));
        if (d <= params.isolation_radius) {
          isolated = false;
          break;
        }
      }
      if (!isolated) break;
    }
    if (!isolated) continue;

    // Reflection-count-weighted footprint centroid.
    double wx = 0.0, wy = 0.0, wsum = 0.0;
    for (const Voxel& vox : stack.voxels) {
      const double w = grid.count(vox.ix, vox.iy, vox.iz);
      const Point3 c = grid.voxel_center(vox.ix, vox.iy, vox.iz);
      wx += w * c.x;
      wy += w * c.y;
      wsum += w;
    }
    const Point2 center{wx / wsum, wy / wsum};

    PoleDetection det;
    det.center = center;
    det.width = width;
    det.descriptor = build_descriptor(stack, grid, params, center, width);
    detections.push_back(std::move(det));
  }

  std::sort(detections.begin(), detections.end(),
            [](const PoleDetection& a, const PoleDetection& b) {
              if (a.center.x != b.center.x) return a.center.x < b.center.x;
              return a.center.y < b.center.y;
            });
  return detections;
}

PointCloud load_cloud_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open cloud file: " + path);
  PointCloud cloud;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    if (lineno == 1 && line.find_first_not_of("xyz, \r") == std::string::npos)
      continue;  // optional header
    std::istringstream ss(line);
    Point3 p;
    char c1 = 0, c2 = 0;
    if (!(ss >> p.x >> c1 >> p.y >> c2 >> p.z) || c1 != ',' || c2 != ',')
      throw ParseError("expected x,y,z", lineno);
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
      throw ParseError("non-finite coordinate", lineno);
    cloud.push_back(p);
  }
  return cloud;
}

PointCloud load_cloud_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open cloud file: " + path);
  char magic[16];
  if (!in.read(magic, 16) || std::memcmp(magic, kCloudMagic, 16) != 0)
    throw std::runtime_error("bad magic header in " + path);
  std::uint64_t n = 0;
  if (!in.read(reinterpret_cast<char*>(&n), sizeof n))
    throw std::runtime_error("truncated cloud file: " + path);
  PointCloud cloud(n);
  for (auto& p : cloud) {
    double xyz[3];
    if (!in.read(reinterpret_cast<char*>(xyz), sizeof xyz))
      throw std::runtime_error("truncated cloud file: " + path);
    p = Point3{xyz[0], xyz[1], xyz[2]};
  }
  return cloud;
}

void save_cloud_binary(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write cloud file: " + path);
  out.write(kCloudMagic, 16);
  const std::uint64_t n = cloud.size();
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  for (const auto& p : cloud) {
    const double xyz[3] = {p.x, p.y, p.z};
    out.write(reinterpret_cast<const char*>(xyz), sizeof xyz);
  }
}

PointCloud load_cloud(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open cloud file: " + path);
  char magic[16] = {};
  in.read(magic, 16);
  in.close();
  if (std::memcmp(magic, kCloudMagic, 16) == 0) return load_cloud_binary(path);
  return load_cloud_csv(path);
}

}  // namespace polelm
