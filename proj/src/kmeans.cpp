#include "polelm/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "polelm/errors.hpp"

namespace polelm {

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

int nearest_centroid(const std::vector<std::vector<double>>& centroids,
                     const std::vector<double>& x) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < centroids.size(); ++i) {
    const double d = sq_dist(centroids[i], x);
    if (d < best_d) {  // strict: ties keep the lowest index
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

}  // namespace

KMeansResult kmeans_fit(const std::vector<std::vector<double>>& descriptors,
                        const KMeansParams& params) {
  const std::size_t n = descriptors.size();
  if (params.k < 1) throw std::invalid_argument("k must be >= 1");
  if (params.max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (n < static_cast<std::size_t>(params.k))
    throw std::invalid_argument("fewer samples than clusters (n=" +
                                std::to_string(n) +
                                ", k=" + std::to_string(params.k) + ")");
  const std::size_t d = descriptors[0].size();
  for (const auto& x : descriptors) {
    if (x.size() != d)
      throw std::invalid_argument("descriptors have mixed dimensions");
    for (double v : x)
      if (!std::isfinite(v))
        throw std::invalid_argument("non-finite descriptor entry");
  }

  std::vector<std::vector<double>> data = descriptors;
  std::vector<double> mean(d, 0.0), stddev(d, 1.0);
  if (params.standardize) {
    for (const auto& x : data)
      for (std::size_t j = 0; j < d; ++j) mean[j] += x[j];
    for (std::size_t j = 0; j < d; ++j) mean[j] /= static_cast<double>(n);
    std::vector<double> var(d, 0.0);
    for (const auto& x : data)
      for (std::size_t j = 0; j < d; ++j) {
        const double dv = x[j] - mean[j];
        var[j] += dv * dv;
      }
    for (std::size_t j = 0; j < d; ++j) {
      stddev[j] = std::sqrt(var[j] / static_cast<double>(n));
      if (stddev[j] == 0.0) stddev[j] = 1.0;
    }
    for (auto& x : data)
      for (std::size_t j = 0; j < d; ++j) x[j] = (x[j] - mean[j]) / stddev[j];
  }

  // Forgy init: k distinct observations sampled without replacement.
  std::mt19937_64 rng(params.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < static_cast<std::size_t>(params.k); ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  std::vector<std::vector<double>> centroids;
  centroids.reserve(params.k);
  for (int i = 0; i < params.k; ++i) centroids.push_back(data[order[i]]);

  std::vector<int> labels(n, -1);
  int iterations = 0;
  bool converged = false;
  for (; iterations < params.max_iters; ++iterations) {
    bool changed = false;
    for (std::size_t p = 0; p < n; ++p) {
      const int c = nearest_centroid(centroids, data[p]);
      if (c != labels[p]) {
        labels[p] = c;
        changed = true;
      }
    }
    if (!changed) {
      converged = true;  // allocation stable
      ++iterations;
      break;
    }

    std::vector<std::vector<double>> sums(params.k, std::vector<double>(d, 0.0));
    std::vector<std::size_t> sizes(params.k, 0);
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t j = 0; j < d; ++j) sums[labels[p]][j] += data[p][j];
      ++sizes[labels[p]];
    }
    for (int i = 0; i < params.k; ++i) {
      if (sizes[i] == 0) continue;  // repaired below
      for (std::size_t j = 0; j < d; ++j)
        centroids[i][j] = sums[i][j] / static_cast<double>(sizes[i]);
    }
    // Empty-cluster repair: reseat at the point farthest from its own centroid.
    for (int i = 0; i < params.k; ++i) {
      if (sizes[i] != 0) continue;
      std::size_t far_p = 0;
      double far_d = -1.0;
      for (std::size_t p = 0; p < n; ++p) {
        const double dd = sq_dist(data[p], centroids[labels[p]]);
        if (dd > far_d) {
          far_d = dd;
          far_p = p;
        }
      }
      centroids[i] = data[far_p];
    }
  }

  KMeansResult result;
  result.model.k = params.k;
  result.model.d = static_cast<int>(d);
  result.model.seed = params.seed;
  if (params.standardize) {
    // Store centroids back in descriptor units.
    for (auto& c : centroids)
      for (std::size_t j = 0; j < d; ++j) c[j] = c[j] * stddev[j] + mean[j];
  }
  result.model.centroids = std::move(centroids);
  result.assignment.labels = std::move(labels);
  result.iterations = iterations;
  result.converged = converged;
  return result;
}

int assign_class(const KMeansModel& model, const std::vector<double>& descriptor) {
  if (static_cast<int>(descriptor.size()) != model.d)
    throw std::invalid_argument("descriptor dimension " +
                                std::to_string(descriptor.size()) +
                                " != model dimension " + std::to_string(model.d));
  for (double v : descriptor)
    if (!std::isfinite(v))
      throw std::invalid_argument("non-finite descriptor entry");
  return nearest_centroid(model.centroids, descriptor);
}

double sse(const std::vector<std::vector<double>>& descriptors,
           const KMeansModel& model, const ClusterAssignment& assignment) {
  double s = 0.0;
  for (std::size_t p = 0; p < descriptors.size(); ++p)
    s += sq_dist(descriptors[p], model.centroids[assignment.labels[p]]);
  return s;
}

void save_model(const KMeansModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out << "k,d,seed\n" << model.k << ',' << model.d << ',' << model.seed << '\n';
  out.precision(17);
  for (const auto& c : model.centroids) {
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (j) out << ',';
      out << c[j];
    }
    out << '\n';
  }
}

KMeansModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("k,d,seed", 0) != 0)
    throw ParseError("expected header k,d,seed", 1);
  KMeansModel model;
  if (!std::getline(in, line)) throw ParseError("missing k,d,seed row", 2);
  {
    std::istringstream ss(line);
    char c1 = 0, c2 = 0;
    if (!(ss >> model.k >> c1 >> model.d >> c2 >> model.seed) || c1 != ',' ||
        c2 != ',')
      throw ParseError("malformed k,d,seed row", 2);
  }
  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::vector<double> row;
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ParseError("bad centroid value '" + cell + "'", lineno);
      }
    }
    if (static_cast<int>(row.size()) != model.d)
      throw ParseError("centroid row has wrong dimension", lineno);
    model.centroids.push_back(std::move(row));
  }
  if (static_cast<int>(model.centroids.size()) != model.k)
    throw std::runtime_error("model declares k=" + std::to_string(model.k) +
                             " but has " +
                             std::to_string(model.centroids.size()) + " rows");
  return model;
}

}  // namespace polelm
