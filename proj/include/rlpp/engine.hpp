// Exact Bayes/IBR partition search and the suboptimal Pseed Fast search.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rlpp/niw.hpp"
#include "rlpp/partition.hpp"

namespace rlpp {

struct ClusterResult {
  Partition partition;
  double score = 0.0;  // partition error, or negative log posterior for searches
  std::string method;
  int candidate_count = 0;
  int restarts = 0;
  double runtime_ms = 0.0;
};

// sum_Q c(p, Q) P(Q) under the natural cost. `probs` must be a normalized
// pmf over reference partitions (|sum - 1| <= 1e-9).
double partition_error(const Partition& p,
                       const std::vector<std::pair<Partition, double>>& probs, int l);

// Exact Bayes partition: argmin of partition_error over the size-valid
// candidate set (candidates = references = posterior support). Guarded at
// n <= 12; beyond that use pseed_fast. Ties break to canonical order.
ClusterResult bayes_partition(const PointSet& points, const LabelPrior& prior,
                              const LogLikelihoodFn& loglik);
ClusterResult bayes_partition(const PointSet& points, const LabelPrior& prior,
                              const NiwModel& model);

// Same search over an already-computed label posterior.
ClusterResult bayes_partition_from_posterior(const LabelPosterior& post, int l);

// Maximum-probability partition over the enumerated posterior support.
ClusterResult map_partition(const PointSet& points, const LabelPrior& prior,
                            const LogLikelihoodFn& loglik);

// Unnormalized log posterior probability of a partition: logsumexp of
// log P(Phi=phi) + log f(S|phi) over size-valid label functions inducing it.
// -inf when no inducing label function matches the prior sizes.
double partition_log_score(const PointSet& points, const Partition& p,
                           const LabelPrior& prior, const LogLikelihoodFn& loglik);

struct PseedConfig {
  int restarts = 10;
  int subset_size = 10;
  std::uint64_t seed = 0;
};

// Suboptimal Pseed Fast: per restart, exhaustively solve a random subset,
// extend by quadratic-discriminant assignment under the size constraints,
// then hill-climb over partitions differing in at most two points.
ClusterResult pseed_fast(const PointSet& points, const LabelPrior& prior,
                         const LogLikelihoodFn& loglik, const PseedConfig& cfg);

}  // namespace rlpp
