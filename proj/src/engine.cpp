#include "rlpp/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "rlpp/hungarian.hpp"
#include "rlpp/sampling.hpp"

namespace rlpp {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

double partition_error(const Partition& p,
                       const std::vector<std::pair<Partition, double>>& probs, int l) {
  double sum = 0.0;
  for (const auto& [q, pr] : probs) sum += pr;
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("partition_error: probabilities not normalized");
  double err = 0.0;
  for (const auto& [q, pr] : probs) err += natural_cost(p, q, l) * pr;
  return err;
}

ClusterResult bayes_partition_from_posterior(const LabelPosterior& post, int l) {
  const auto t0 = Clock::now();
  const auto probs = partition_probs(post);

  ClusterResult best;
  best.method = "ibr-exact";
  best.candidate_count = static_cast<int>(probs.size());
  double best_err = std::numeric_limits<double>::infinity();
  for (const auto& [cand, unused] : probs) {
    const double err = partition_error(cand, probs, l);
    if (err < best_err) {  // strict: ties keep the earlier canonical entry
      best_err = err;
      best.partition = cand;
    }
  }
  best.score = best_err;
  best.runtime_ms = elapsed_ms(t0);
  return best;
}

ClusterResult bayes_partition(const PointSet& points, const LabelPrior& prior,
                              const LogLikelihoodFn& loglik) {
  const auto t0 = Clock::now();
  if (points.size() > 12)
    throw std::invalid_argument(
        "bayes_partition: n > 12 enumeration guard exceeded; use pseed_fast");

  const int l = prior.label_count();
  const auto post = posterior_label_probs(points, prior, loglik);
  ClusterResult best = bayes_partition_from_posterior(post, l);
  best.runtime_ms = elapsed_ms(t0);
  return best;
}

ClusterResult bayes_partition(const PointSet& points, const LabelPrior& prior,
                              const NiwModel& model) {
  return bayes_partition(points, prior,
                         [&model](const PointSet& s, const LabelFunction& lf) {
                           return log_label_weight(s, lf, model);
                         });
}

ClusterResult map_partition(const PointSet& points, const LabelPrior& prior,
                            const LogLikelihoodFn& loglik) {
  const auto t0 = Clock::now();
  const auto probs = partition_probs(posterior_label_probs(points, prior, loglik));
  ClusterResult best;
  best.method = "map";
  best.candidate_count = static_cast<int>(probs.size());
  double best_p = -1.0;
  for (const auto& [cand, pr] : probs) {
    if (pr > best_p) {
      best_p = pr;
      best.partition = cand;
    }
  }
  best.score = -std::log(best_p);
  best.runtime_ms = elapsed_ms(t0);
  return best;
}

double partition_log_score(const PointSet& points, const Partition& p,
                           const LabelPrior& prior, const LogLikelihoodFn& loglik) {
  if (prior.kind == LabelPrior::Kind::ExplicitTable) {
    std::vector<double> terms;
    for (const auto& [lf, pr] : prior.table) {
      if (pr <= 0.0) continue;
      if (induced_partition(lf) == p)
        terms.push_back(std::log(pr) + loglik(points, lf));
    }
    if (terms.empty()) return -std::numeric_limits<double>::infinity();
    return log_sum_exp(terms);
  }

  const int l = static_cast<int>(prior.sizes.size());
  const auto blocks = p.blocks();
  const int k = static_cast<int>(blocks.size());
  if (k > l) return -std::numeric_limits<double>::infinity();

  // log P(Phi = phi) = -log |support| for the fixed-sizes-uniform prior:
  // |support| = (#distinct size permutations) * n! / prod(sizes!).
  const int n = points.size();
  double log_multinom = std::lgamma(n + 1.0);
  for (int s : prior.sizes) log_multinom -= std::lgamma(s + 1.0);
  std::vector<int> sorted_sizes = prior.sizes;
  std::sort(sorted_sizes.begin(), sorted_sizes.end());
  double distinct_perms = 0.0;
  {
    std::vector<int> perm = sorted_sizes;
    do {
      distinct_perms += 1.0;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  const double log_prior = -(std::log(distinct_perms) + log_multinom);

  // The fixed-sizes prior is a size-multiset convention: the partition is in
  // the induced support iff its block sizes padded with empty labels match
  // the prior sizes as multisets, and then every injective block -> label
  // assignment induces a distinct support label function.
  {
    std::vector<int> padded;
    for (const auto& b : blocks) padded.push_back(static_cast<int>(b.size()));
    padded.resize(l, 0);
    std::sort(padded.begin(), padded.end());
    if (padded != sorted_sizes) return -std::numeric_limits<double>::infinity();
  }

  std::vector<int> label_perm(l);
  std::iota(label_perm.begin(), label_perm.end(), 0);
  std::vector<double> terms;
  do {
    // Permuting the labels of the empty tail repeats the same label
    // function; keep only the representative with a sorted tail.
    if (!std::is_sorted(label_perm.begin() + k, label_perm.end())) continue;
    LabelFunction lf;
    lf.label_count = l;
    lf.labels.assign(points.size(), 0);
    for (int b = 0; b < k; ++b)
      for (int idx : blocks[b]) lf.labels[idx] = label_perm[b] + 1;
    terms.push_back(loglik(points, lf));
  } while (std::next_permutation(label_perm.begin(), label_perm.end()));

  if (terms.empty()) return -std::numeric_limits<double>::infinity();
  return log_prior + log_sum_exp(terms);
}

namespace {

struct QdaClass {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov_inv;
  double log_det = 0.0;
};

// Regularized per-cluster Gaussian fit; pooled covariance fallback for
// clusters with fewer than d+2 points.
std::vector<QdaClass> fit_qda(const PointSet& points,
                              const std::vector<std::vector<int>>& clusters) {
  const int d = points.dim();
  Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(d, d);
  int pooled_n = 0;
  std::vector<ClusterStats> stats;
  for (const auto& idx : clusters) {
    Eigen::MatrixXd sub(idx.size(), d);
    for (std::size_t i = 0; i < idx.size(); ++i) sub.row(i) = points.points.row(idx[i]);
    ClusterStats st = cluster_stats(sub);
    if (st.count >= 2) {
      pooled += (st.count - 1) * st.cov;
      pooled_n += st.count - 1;
    }
    stats.push_back(std::move(st));
  }
  Eigen::MatrixXd pooled_cov =
      pooled_n > 0 ? Eigen::MatrixXd(pooled / pooled_n) : Eigen::MatrixXd::Identity(d, d);

  std::vector<QdaClass> out;
  const Eigen::VectorXd grand_mean = points.points.colwise().mean();
  for (const auto& st : stats) {
    Eigen::MatrixXd cov =
        (st.count >= d + 2) ? st.cov : pooled_cov;
    const double lambda = 1e-3 * cov.trace() / d;
    cov += std::max(lambda, 1e-12) * Eigen::MatrixXd::Identity(d, d);
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("pseed_fast: QDA covariance not positive-definite");
    QdaClass q;
    q.mean = st.count > 0 ? st.mean : grand_mean;
    q.log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    q.cov_inv = llt.solve(Eigen::MatrixXd::Identity(d, d));
    out.push_back(std::move(q));
  }
  return out;
}

// Size-constrained maximum-score assignment of all points to labels via the
// assignment solver on an n x n slot matrix.
std::vector<int> assign_with_sizes(const PointSet& points,
                                   const std::vector<QdaClass>& classes,
                                   const std::vector<int>& sizes) {
  const int n = points.size();
  const int l = static_cast<int>(classes.size());
  std::vector<int> slot_label;
  for (int y = 0; y < l; ++y)
    slot_label.insert(slot_label.end(), sizes[y], y);

  std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd x = points.points.row(i);
    std::vector<double> score(l);
    for (int y = 0; y < l; ++y) {
      const Eigen::VectorXd dm = x - classes[y].mean;
      score[y] = -0.5 * (classes[y].log_det + dm.dot(classes[y].cov_inv * dm));
    }
    for (int s = 0; s < n; ++s) cost[i][s] = -score[slot_label[s]];
  }
  std::vector<int> assignment;
  solve_assignment(cost, assignment);
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = slot_label[assignment[i]] + 1;
  return labels;
}

// Largest-remainder rounding of prior sizes down to the subset size.
std::vector<int> proportional_sizes(const std::vector<int>& sizes, int subset_size) {
  const int n = std::accumulate(sizes.begin(), sizes.end(), 0);
  const int l = static_cast<int>(sizes.size());
  std::vector<int> out(l);
  std::vector<std::pair<double, int>> rem;
  int assigned = 0;
  for (int y = 0; y < l; ++y) {
    const double exact = static_cast<double>(sizes[y]) * subset_size / n;
    out[y] = static_cast<int>(std::floor(exact));
    assigned += out[y];
    rem.emplace_back(-(exact - out[y]), y);
  }
  std::sort(rem.begin(), rem.end());
  for (int i = 0; i < subset_size - assigned; ++i) ++out[rem[i].second];
  return out;
}

}  // namespace

ClusterResult pseed_fast(const PointSet& points, const LabelPrior& prior,
                         const LogLikelihoodFn& loglik, const PseedConfig& cfg) {
  const auto t0 = Clock::now();
  if (prior.kind != LabelPrior::Kind::FixedSizesUniform)
    throw std::invalid_argument("pseed_fast: requires a fixed-sizes prior");
  const int n = points.size();
  if (n < cfg.subset_size)
    throw std::invalid_argument("pseed_fast: n < subset_size");
  const int l = static_cast<int>(prior.sizes.size());

  ClusterResult best;
  best.method = "ibr-pseed";
  best.restarts = cfg.restarts;
  double best_score = -std::numeric_limits<double>::infinity();

  for (int r = 0; r < cfg.restarts; ++r) {
    std::mt19937_64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(r)));

    // (1) uniform random subset
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> subset(order.begin(), order.begin() + cfg.subset_size);
    std::sort(subset.begin(), subset.end());

    PointSet sub;
    sub.points.resize(cfg.subset_size, points.dim());
    for (int i = 0; i < cfg.subset_size; ++i)
      sub.points.row(i) = points.points.row(subset[i]);

    // (2) exhaustive maximum-probability partition of the subset
    const auto sub_sizes = proportional_sizes(prior.sizes, cfg.subset_size);
    const auto sub_prior = LabelPrior::fixed_sizes(sub_sizes);
    const ClusterResult sub_map = map_partition(sub, sub_prior, loglik);

    Partition incumbent;
    if (n == cfg.subset_size) {
      incumbent = sub_map.partition;  // steps 3-4 are no-ops
    } else {
      // (3) extend to all points with a QDA classifier fit on subset clusters
      std::vector<std::vector<int>> blocks(sub_map.partition.block_count());
      const auto& enc = sub_map.partition.encoding();
      for (int i = 0; i < cfg.subset_size; ++i) blocks[enc[i]].push_back(subset[i]);
      // Match blocks to labels by size so label y keeps its prior proportion.
      std::vector<std::vector<int>> clusters(l);
      std::vector<char> used(blocks.size(), 0);
      for (int y = 0; y < l; ++y) {
        for (std::size_t b = 0; b < blocks.size(); ++b) {
          if (!used[b] && static_cast<int>(blocks[b].size()) == sub_sizes[y]) {
            clusters[y] = blocks[b];
            used[b] = 1;
            break;
          }
        }
      }
      const auto qda = fit_qda(points, clusters);
      const auto labels = assign_with_sizes(points, qda, prior.sizes);
      incumbent = Partition::from_labels(labels);

      // (4) first-improvement hill-climb over two-point swaps
      double inc_score = partition_log_score(points, incumbent, prior, loglik);
      bool improved = true;
      while (improved) {
        improved = false;
        std::vector<int> cur = incumbent.encoding();
        for (int i = 0; i < n && !improved; ++i) {
          for (int j = i + 1; j < n && !improved; ++j) {
            if (cur[i] == cur[j]) continue;
            std::swap(cur[i], cur[j]);
            const Partition cand = Partition::from_labels(cur);
            const double s = partition_log_score(points, cand, prior, loglik);
            if (s > inc_score) {
              incumbent = cand;
              inc_score = s;
              improved = true;
            } else {
              std::swap(cur[i], cur[j]);
            }
          }
        }
      }
    }

    const double score = partition_log_score(points, incumbent, prior, loglik);
    if (score > best_score) {
      best_score = score;
      best.partition = incumbent;
    }
  }

  best.score = -best_score;
  best.candidate_count = n;
  best.runtime_ms = elapsed_ms(t0);
  return best;
}

}  // namespace rlpp
