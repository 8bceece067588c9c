#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace polelm {

struct KMeansParams {
  int k = 200;
  std::uint64_t seed = 0;
  int max_iters = 300;
  bool standardize = false;  // per-dimension z-score before clustering
};

struct KMeansModel {
  int k = 0;
  int d = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> centroids;  // k rows of dimension d
};

struct ClusterAssignment {
  std::vector<int> labels;  // one label in [0, k) per input descriptor
};

struct KMeansResult {
  KMeansModel model;
  ClusterAssignment assignment;
  int iterations = 0;
  bool converged = false;  // allocation stable before max_iters
};

// Lloyd iterations with Forgy initialization (k distinct samples drawn
// without replacement using params.seed). Assignment ties break to the
// lowest cluster index. Terminates when labels stop changing.
KMeansResult kmeans_fit(const std::vector<std::vector<double>>& descriptors,
                        const KMeansParams& params);

// Index of the nearest centroid by squared Euclidean distance,
// ties to the lowest index.
int assign_class(const KMeansModel& model, const std::vector<double>& descriptor);

// Sum of squared distances from each point to its assigned centroid.
double sse(const std::vector<std::vector<double>>& descriptors,
           const KMeansModel& model, const ClusterAssignment& assignment);

// CSV persistence: header row "k,d,seed", then one centroid per row
// (row index = class id).
void save_model(const KMeansModel& model, const std::string& path);
KMeansModel load_model(const std::string& path);

}  // namespace polelm
