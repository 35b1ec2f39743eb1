// Classical clusterers used as comparison points.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rlpp/engine.hpp"
#include "rlpp/niw.hpp"

namespace rlpp {

enum class BaselineMethod {
  KMeans,
  FuzzyCMeans,
  HierSingle,
  HierAverage,
  HierComplete,
  EmGmm,
  Random,
};

std::string baseline_method_name(BaselineMethod m);

struct BaselineConfig {
  BaselineMethod method = BaselineMethod::KMeans;
  int k = 2;
  int max_iter = 300;
  double tolerance = 1e-6;
  int restarts = 10;
  double fuzzifier = 2.0;      // FCM
  std::uint64_t seed = 0;
  std::vector<int> random_sizes;  // Random: block sizes; near-equal when empty
};

// Runs the configured method; deterministic given the seed. KM/FCM/EM pick
// the best of `restarts` runs by their own objective, hierarchical methods
// cut the dendrogram at k clusters, Random draws a uniform size-valid
// partition.
ClusterResult run_baseline(const PointSet& points, const BaselineConfig& cfg);

// Individual entry points (labels are 1-based, k clusters max).
std::vector<int> kmeans_labels(const PointSet& points, int k, int restarts,
                               int max_iter, std::uint64_t seed, double* objective = nullptr);
std::vector<int> fcm_labels(const PointSet& points, int k, double fuzzifier,
                            double tolerance, int restarts, int max_iter,
                            std::uint64_t seed, double* objective = nullptr);
enum class Linkage { Single, Average, Complete };
std::vector<int> hierarchical_labels(const PointSet& points, int k, Linkage link);

struct EmResult {
  std::vector<int> labels;
  double log_likelihood = 0.0;
  std::vector<double> loglik_trace;  // per-iteration, non-decreasing
};
EmResult em_gmm(const PointSet& points, int k, int restarts, int max_iter,
                double tolerance, std::uint64_t seed);

}  // namespace rlpp
