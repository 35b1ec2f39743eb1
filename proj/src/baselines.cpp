#include "rlpp/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include "rlpp/sampling.hpp"

namespace rlpp {

namespace {

using Clock = std::chrono::steady_clock;

double sq_dist(const Eigen::MatrixXd& pts, int i, const Eigen::VectorXd& c) {
  return (pts.row(i).transpose() - c).squaredNorm();
}

// k-means++ seeding.
std::vector<Eigen::VectorXd> seed_centers(const PointSet& points, int k,
                                          std::mt19937_64& rng) {
  const int n = points.size();
  std::uniform_int_distribution<int> first(0, n - 1);
  std::vector<Eigen::VectorXd> centers;
  centers.push_back(points.points.row(first(rng)));
  std::vector<double> d2(n);
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) best = std::min(best, sq_dist(points.points, i, c));
      d2[i] = best;
      total += best;
    }
    if (total <= 0.0) {
      centers.push_back(points.points.row(first(rng)));
      continue;
    }
    std::uniform_real_distribution<double> unif(0.0, total);
    double u = unif(rng);
    int pick = n - 1;
    for (int i = 0; i < n; ++i) {
      u -= d2[i];
      if (u <= 0.0) {
        pick = i;
        break;
      }
    }
    centers.push_back(points.points.row(pick));
  }
  return centers;
}

struct LloydResult {
  std::vector<int> labels;  // 0-based
  double objective = 0.0;
};

LloydResult lloyd(const PointSet& points, int k, int max_iter, std::mt19937_64& rng) {
  const int n = points.size();
  const int d = points.dim();
  auto centers = seed_centers(points, k, rng);
  std::vector<int> labels(n, 0);

  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (int y = 0; y < k; ++y) {
        const double dist = sq_dist(points.points, i, centers[y]);
        if (dist < bd) {
          bd = dist;
          best = y;
        }
      }
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
    }
    std::vector<int> counts(k, 0);
    std::vector<Eigen::VectorXd> sums(k, Eigen::VectorXd::Zero(d));
    for (int i = 0; i < n; ++i) {
      ++counts[labels[i]];
      sums[labels[i]] += points.points.row(i).transpose();
    }
    for (int y = 0; y < k; ++y) {
      if (counts[y] > 0) {
        centers[y] = sums[y] / counts[y];
      } else {
        // Reseed an empty cluster at the point farthest from its center.
        int far = 0;
        double fd = -1.0;
        for (int i = 0; i < n; ++i) {
          const double dist = sq_dist(points.points, i, centers[labels[i]]);
          if (dist > fd) {
            fd = dist;
            far = i;
          }
        }
        centers[y] = points.points.row(far);
        changed = true;
      }
    }
    if (!changed) break;
  }

  LloydResult out;
  out.labels = labels;
  for (int i = 0; i < n; ++i) out.objective += sq_dist(points.points, i, centers[labels[i]]);
  return out;
}

}  // namespace

std::vector<int> kmeans_labels(const PointSet& points, int k, int restarts,
                               int max_iter, std::uint64_t seed, double* objective) {
  if (points.size() < k) throw std::invalid_argument("kmeans: n < k");
  LloydResult best;
  best.objective = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
    LloydResult res = lloyd(points, k, max_iter, rng);
    if (res.objective < best.objective) best = std::move(res);
  }
  if (objective) *objective = best.objective;
  std::vector<int> labels(points.size());
  for (int i = 0; i < points.size(); ++i) labels[i] = best.labels[i] + 1;
  return labels;
}

std::vector<int> fcm_labels(const PointSet& points, int k, double fuzzifier,
                            double tolerance, int restarts, int max_iter,
                            std::uint64_t seed, double* objective) {
  if (points.size() < k) throw std::invalid_argument("fcm: n < k");
  if (fuzzifier <= 1.0) throw std::invalid_argument("fcm: fuzzifier must be > 1");
  const int n = points.size();
  const int d = points.dim();
  const double expo = 2.0 / (fuzzifier - 1.0);

  double best_j = std::numeric_limits<double>::infinity();
  std::vector<int> best_labels(n, 1);

  for (int r = 0; r < restarts; ++r) {
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
    auto centers = seed_centers(points, k, rng);
    Eigen::MatrixXd u(n, k);
    double prev_j = std::numeric_limits<double>::infinity();
    double j = prev_j;

    for (int it = 0; it < max_iter; ++it) {
      // membership update
      for (int i = 0; i < n; ++i) {
        int exact = -1;
        for (int y = 0; y < k; ++y) {
          if (sq_dist(points.points, i, centers[y]) < 1e-24) {
            exact = y;
            break;
          }
        }
        if (exact >= 0) {
          u.row(i).setZero();
          u(i, exact) = 1.0;
          continue;
        }
        for (int y = 0; y < k; ++y) {
          double denom = 0.0;
          const double dy = std::sqrt(sq_dist(points.points, i, centers[y]));
          for (int z = 0; z < k; ++z) {
            const double dz = std::sqrt(sq_dist(points.points, i, centers[z]));
            denom += std::pow(dy / dz, expo);
          }
          u(i, y) = 1.0 / denom;
        }
      }
      // center update
      for (int y = 0; y < k; ++y) {
        Eigen::VectorXd num = Eigen::VectorXd::Zero(d);
        double den = 0.0;
        for (int i = 0; i < n; ++i) {
          const double w = std::pow(u(i, y), fuzzifier);
          num += w * points.points.row(i).transpose();
          den += w;
        }
        if (den > 0.0) centers[y] = num / den;
      }
      j = 0.0;
      for (int i = 0; i < n; ++i)
        for (int y = 0; y < k; ++y)
          j += std::pow(u(i, y), fuzzifier) * sq_dist(points.points, i, centers[y]);
      if (std::abs(prev_j - j) < tolerance) break;
      prev_j = j;
    }

    if (j < best_j) {
      best_j = j;
      for (int i = 0; i < n; ++i) {
        int lab = 0;
        u.row(i).maxCoeff(&lab);
        best_labels[i] = lab + 1;
      }
    }
  }
  if (objective) *objective = best_j;
  return best_labels;
}

std::vector<int> hierarchical_labels(const PointSet& points, int k, Linkage link) {
  const int n = points.size();
  if (n < k) throw std::invalid_argument("hierarchical: n < k");

  // Lance-Williams agglomeration over a stored distance matrix.
  Eigen::MatrixXd dist(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      dist(i, j) = (points.points.row(i) - points.points.row(j)).norm();

  std::vector<int> active(n);
  std::iota(active.begin(), active.end(), 0);
  std::vector<int> cluster_of(n);
  std::iota(cluster_of.begin(), cluster_of.end(), 0);
  std::vector<int> sizes(n, 1);

  int remaining = n;
  while (remaining > k) {
    int bi = -1, bj = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < active.size(); ++a) {
      for (std::size_t b = a + 1; b < active.size(); ++b) {
        const double dd = dist(active[a], active[b]);
        if (dd < bd) {
          bd = dd;
          bi = active[a];
          bj = active[b];
        }
      }
    }
    // Merge bj into bi with the linkage update.
    for (int c : active) {
      if (c == bi || c == bj) continue;
      double nd = 0.0;
      switch (link) {
        case Linkage::Single:
          nd = std::min(dist(bi, c), dist(bj, c));
          break;
        case Linkage::Complete:
          nd = std::max(dist(bi, c), dist(bj, c));
          break;
        case Linkage::Average:
          nd = (sizes[bi] * dist(bi, c) + sizes[bj] * dist(bj, c)) /
               (sizes[bi] + sizes[bj]);
          break;
      }
      dist(bi, c) = dist(c, bi) = nd;
    }
    sizes[bi] += sizes[bj];
    for (int i = 0; i < n; ++i)
      if (cluster_of[i] == bj) cluster_of[i] = bi;
    active.erase(std::find(active.begin(), active.end(), bj));
    --remaining;
  }

  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) {
    const auto it = std::find(active.begin(), active.end(), cluster_of[i]);
    labels[i] = static_cast<int>(it - active.begin()) + 1;
  }
  return labels;
}

EmResult em_gmm(const PointSet& points, int k, int restarts, int max_iter,
                double tolerance, std::uint64_t seed) {
  const int n = points.size();
  const int d = points.dim();
  if (n < k) throw std::invalid_argument("em_gmm: n < k");

  EmResult best;
  best.log_likelihood = -std::numeric_limits<double>::infinity();
  bool any_ok = false;

  for (int r = 0; r < restarts; ++r) {
    try {
      // k-means initialization
      const auto init = kmeans_labels(points, k, 1, 100, mix_seed(seed, r));
      std::vector<double> weights(k, 0.0);
      std::vector<Eigen::VectorXd> means(k, Eigen::VectorXd::Zero(d));
      std::vector<Eigen::MatrixXd> covs(k, Eigen::MatrixXd::Identity(d, d));
      {
        std::vector<std::vector<int>> groups(k);
        for (int i = 0; i < n; ++i) groups[init[i] - 1].push_back(i);
        for (int y = 0; y < k; ++y) {
          Eigen::MatrixXd sub(groups[y].size(), d);
          for (std::size_t i = 0; i < groups[y].size(); ++i)
            sub.row(i) = points.points.row(groups[y][i]);
          const auto st = cluster_stats(sub);
          weights[y] = std::max(1.0, static_cast<double>(st.count)) / n;
          if (st.count >= 1) means[y] = st.mean;
          if (st.count >= 2) covs[y] = st.cov;
          const double lambda = std::max(1e-6 * covs[y].trace() / d, 1e-12);
          covs[y] += lambda * Eigen::MatrixXd::Identity(d, d);
        }
        const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
        for (double& w : weights) w /= wsum;
      }

      EmResult cur;
      Eigen::MatrixXd resp(n, k);
      double prev_ll = -std::numeric_limits<double>::infinity();
      for (int it = 0; it < max_iter; ++it) {
        // E step
        std::vector<Eigen::LLT<Eigen::MatrixXd>> llts;
        std::vector<double> log_norms(k);
        for (int y = 0; y < k; ++y) {
          llts.emplace_back(covs[y]);
          if (llts[y].info() != Eigen::Success)
            throw std::runtime_error("em_gmm: singular covariance");
          const double logdet =
              2.0 * llts[y].matrixL().toDenseMatrix().diagonal().array().log().sum();
          log_norms[y] = -0.5 * (d * std::log(2.0 * std::numbers::pi) + logdet);
        }
        double ll = 0.0;
        for (int i = 0; i < n; ++i) {
          std::vector<double> lp(k);
          for (int y = 0; y < k; ++y) {
            const Eigen::VectorXd dm = points.points.row(i).transpose() - means[y];
            lp[y] = std::log(weights[y]) + log_norms[y] -
                    0.5 * dm.dot(llts[y].solve(dm));
          }
          const double z = log_sum_exp(lp);
          ll += z;
          for (int y = 0; y < k; ++y) resp(i, y) = std::exp(lp[y] - z);
        }
        cur.loglik_trace.push_back(ll);
        // M step
        for (int y = 0; y < k; ++y) {
          const double ny = resp.col(y).sum();
          weights[y] = ny / n;
          Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
          for (int i = 0; i < n; ++i) mu += resp(i, y) * points.points.row(i).transpose();
          mu /= std::max(ny, 1e-12);
          Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
          for (int i = 0; i < n; ++i) {
            const Eigen::VectorXd dm = points.points.row(i).transpose() - mu;
            cov += resp(i, y) * dm * dm.transpose();
          }
          cov /= std::max(ny, 1e-12);
          const double lambda = std::max(1e-6 * cov.trace() / d, 1e-12);
          cov += lambda * Eigen::MatrixXd::Identity(d, d);
          means[y] = mu;
          covs[y] = cov;
        }
        if (std::isfinite(prev_ll) && ll - prev_ll < tolerance) break;
        prev_ll = ll;
      }
      cur.log_likelihood = cur.loglik_trace.back();
      cur.labels.resize(n);
      for (int i = 0; i < n; ++i) {
        int lab = 0;
        resp.row(i).maxCoeff(&lab);
        cur.labels[i] = lab + 1;
      }
      if (cur.log_likelihood > best.log_likelihood) best = std::move(cur);
      any_ok = true;
    } catch (const std::runtime_error&) {
      continue;  // singular restart, try the next one
    }
  }
  if (!any_ok) throw std::runtime_error("em_gmm: all restarts failed");
  return best;
}

std::string baseline_method_name(BaselineMethod m) {
  switch (m) {
    case BaselineMethod::KMeans: return "kmeans";
    case BaselineMethod::FuzzyCMeans: return "fcm";
    case BaselineMethod::HierSingle: return "hier-s";
    case BaselineMethod::HierAverage: return "hier-a";
    case BaselineMethod::HierComplete: return "hier-c";
    case BaselineMethod::EmGmm: return "em";
    case BaselineMethod::Random: return "random";
  }
  return "unknown";
}

ClusterResult run_baseline(const PointSet& points, const BaselineConfig& cfg) {
  const auto t0 = Clock::now();
  points.validate();
  if (cfg.k < 1) throw std::invalid_argument("run_baseline: k >= 1");
  if (points.size() < cfg.k) throw std::invalid_argument("run_baseline: n < k");

  ClusterResult res;
  res.method = baseline_method_name(cfg.method);
  res.restarts = cfg.restarts;
  double objective = 0.0;

  switch (cfg.method) {
    case BaselineMethod::KMeans:
      res.partition = Partition::from_labels(
          kmeans_labels(points, cfg.k, cfg.restarts, cfg.max_iter, cfg.seed, &objective));
      break;
    case BaselineMethod::FuzzyCMeans:
      res.partition = Partition::from_labels(
          fcm_labels(points, cfg.k, cfg.fuzzifier, cfg.tolerance, cfg.restarts,
                     cfg.max_iter, cfg.seed, &objective));
      break;
    case BaselineMethod::HierSingle:
      res.partition =
          Partition::from_labels(hierarchical_labels(points, cfg.k, Linkage::Single));
      break;
    case BaselineMethod::HierAverage:
      res.partition =
          Partition::from_labels(hierarchical_labels(points, cfg.k, Linkage::Average));
      break;
    case BaselineMethod::HierComplete:
      res.partition =
          Partition::from_labels(hierarchical_labels(points, cfg.k, Linkage::Complete));
      break;
    case BaselineMethod::EmGmm: {
      const auto em = em_gmm(points, cfg.k, cfg.restarts, cfg.max_iter, cfg.tolerance,
                             cfg.seed);
      res.partition = Partition::from_labels(em.labels);
      objective = -em.log_likelihood;
      break;
    }
    case BaselineMethod::Random: {
      std::vector<int> sizes = cfg.random_sizes;
      if (sizes.empty()) {
        const int base = points.size() / cfg.k;
        sizes.assign(cfg.k, base);
        for (int i = 0; i < points.size() % cfg.k; ++i) ++sizes[i];
      }
      std::mt19937_64 rng(cfg.seed);
      std::vector<int> labels;
      for (int y = 0; y < static_cast<int>(sizes.size()); ++y)
        labels.insert(labels.end(), sizes[y], y + 1);
      if (static_cast<int>(labels.size()) != points.size())
        throw std::invalid_argument("run_baseline: random sizes must sum to n");
      std::shuffle(labels.begin(), labels.end(), rng);
      res.partition = Partition::from_labels(labels);
      break;
    }
  }
  res.score = objective;
  res.runtime_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  return res;
}

}  // namespace rlpp
