#include "polelm/polemap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "polelm/errors.hpp"

namespace polelm {

const Pole* PoleMap::find(int id) const {
  for (const Pole& p : poles)
    if (p.id == id) return &p;
  return nullptr;
}

DistanceTable build_distance_table(const PoleMap& map,
                                   const DistanceTableParams& params) {
  if (params.bin_width <= 0.0)
    throw std::invalid_argument("bin_width must be > 0");
  DistanceTable table;
  table.params_ = params;
  const auto& poles = map.poles;
  for (std::size_t a = 0; a < poles.size(); ++a) {
    for (std::size_t b = 0; b < poles.size(); ++b) {
      if (a == b) continue;
      const double d = distance(poles[a].center, poles[b].center);
      if (d <= params.min_pair_separation || d > params.max_distance) continue;
      const long bin = static_cast<long>(std::floor(d / params.bin_width));
      table.bins_[bin].push_back(PolePair{poles[a].id, poles[b].id, d});
      ++table.pair_count_;
    }
  }
  for (auto& [bin, pairs] : table.bins_)
    std::sort(pairs.begin(), pairs.end(), [](const PolePair& x, const PolePair& y) {
      return std::tie(x.i, x.j) < std::tie(y.i, y.j);
    });
  return table;
}

std::vector<PolePair> DistanceTable::query_pairs(double d, double tol) const {
  std::vector<PolePair> out;
  const double lo = std::max(0.0, d - tol);
  const double hi = d + tol;
  const long bin_lo = static_cast<long>(std::floor(lo / params_.bin_width));
  const long bin_hi = static_cast<long>(std::floor(hi / params_.bin_width));
  for (long bin = bin_lo; bin <= bin_hi; ++bin) {
    auto it = bins_.find(bin);
    if (it == bins_.end()) continue;
    for (const PolePair& p : it->second)
      if (p.dist >= lo && p.dist <= hi) out.push_back(p);  // exact filter
  }
  std::sort(out.begin(), out.end(), [](const PolePair& x, const PolePair& y) {
    return std::tie(x.i, x.j) < std::tie(y.i, y.j);
  });
  return out;
}

void save_map(const PoleMap& map, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write map file: " + path);
  std::size_t desc_dim = 0;
  for (const Pole& p : map.poles) desc_dim = std::max(desc_dim, p.descriptor.size());
  out << "id,x,y,width,class";
  for (std::size_t j = 0; j < desc_dim; ++j) out << ",d" << j;
  out << '\n';
  out.precision(17);
  for (const Pole& p : map.poles) {
    out << p.id << ',' << p.center.x << ',' << p.center.y << ',' << p.width << ',';
    if (p.class_id) out << *p.class_id;
    for (std::size_t j = 0; j < desc_dim; ++j) {
      out << ',';
      out << (j < p.descriptor.size() ? p.descriptor[j] : 0.0);
    }
    out << '\n';
  }
}

PoleMap load_map(const std::string& path, const std::string& frame) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open map file: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw ParseError("empty map file", 1);
  // Strip a trailing \r for files written on Windows.
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind("id,x,y,width,class", 0) != 0)
    throw ParseError("expected header id,x,y,width,class,...", 1);
  std::size_t desc_dim = 0;
  {
    std::istringstream ss(line);
    std::string cell;
    int n = 0;
    while (std::getline(ss, cell, ',')) ++n;
    desc_dim = static_cast<std::size_t>(n - 5);
  }

  PoleMap map;
  map.frame = frame;
  std::set<int> seen_ids;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::vector<std::string> cells;
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    if (cells.size() != 5 + desc_dim)
      throw ParseError("expected " + std::to_string(5 + desc_dim) +
                           " fields, got " + std::to_string(cells.size()),
                       lineno);
    Pole p;
    try {
      p.id = std::stoi(cells[0]);
      p.center.x = std::stod(cells[1]);
      p.center.y = std::stod(cells[2]);
      p.width = std::stod(cells[3]);
      if (!cells[4].empty()) p.class_id = std::stoi(cells[4]);
      for (std::size_t j = 0; j < desc_dim; ++j)
        p.descriptor.push_back(std::stod(cells[5 + j]));
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception&) {
      throw ParseError("malformed numeric field", lineno);
    }
    if (!finite(p.center))
      throw ParseError("non-finite pole center", lineno);
    if (p.width <= 0.0)
      throw ParseError("pole width must be > 0", lineno);
    if (!seen_ids.insert(p.id).second)
      throw std::runtime_error("duplicate pole id " + std::to_string(p.id) +
                               " at line " + std::to_string(lineno));
    map.poles.push_back(std::move(p));
  }
  return map;
}

}  // namespace polelm
