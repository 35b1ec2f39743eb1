#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "rlpp/niw.hpp"

using namespace rlpp;

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

double log_normal_pdf(double x, double mean, double var) {
  return -0.5 * (std::log(2.0 * std::numbers::pi * var) + (x - mean) * (x - mean) / var);
}

// Marginal likelihood of a d=1 cluster by direct 2-d quadrature over the
// normal-inverse-gamma density: outer Gauss-Legendre in t = log sigma^2,
// inner Gauss-Legendre in mu over +-12 conditional standard deviations.
double cluster_marginal_quadrature(const std::vector<double>& xs,
                                   const NiwLabelParams& hp) {
  if (xs.empty()) return 1.0;
  const double a = hp.kappa / 2.0, b = hp.psi(0, 0) / 2.0;
  const int n = static_cast<int>(xs.size());

  static std::vector<double> tn, tw, mn, mw;
  if (tn.empty()) {
    gauss_legendre(600, tn, tw);
    gauss_legendre(96, mn, mw);
  }

  double sum_x = 0.0;
  for (double x : xs) sum_x += x;
  const double mu_bar = (sum_x + hp.nu * hp.m(0)) / (n + hp.nu);

  const double t_lo = -30.0, t_hi = 18.0;
  double total = 0.0;
  for (std::size_t ti = 0; ti < tn.size(); ++ti) {
    const double t = 0.5 * (t_hi + t_lo) + 0.5 * (t_hi - t_lo) * tn[ti];
    const double var = std::exp(t);
    // log IG(var; a, b) plus the Jacobian d(var)/dt = var.
    const double log_ig =
        a * std::log(b) - std::lgamma(a) - (a + 1.0) * t - b / var + t;

    const double sd_mu = std::sqrt(var / (n + hp.nu));
    double inner = 0.0;
    for (std::size_t mi = 0; mi < mn.size(); ++mi) {
      const double mu = mu_bar + 12.0 * sd_mu * mn[mi];
      double lp = log_normal_pdf(mu, hp.m(0), var / hp.nu);
      for (double x : xs) lp += log_normal_pdf(x, mu, var);
      inner += mw[mi] * std::exp(lp);
    }
    inner *= 12.0 * sd_mu;
    total += tw[ti] * std::exp(log_ig) * inner;
  }
  return total * 0.5 * (t_hi - t_lo);
}

NiwModel random_model_1d(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  NiwModel model;
  for (int y = 0; y < 2; ++y) {
    NiwLabelParams hp;
    hp.m = Eigen::VectorXd::Constant(1, -1.0 + 2.0 * u(rng));
    hp.nu = 0.5 + 1.5 * u(rng);
    hp.kappa = 2.5 + 2.5 * u(rng);
    hp.psi = Eigen::MatrixXd::Constant(1, 1, 0.5 + 1.5 * u(rng));
    model.labels.push_back(hp);
  }
  return model;
}

PointSet points_1d(const std::vector<double>& xs) {
  PointSet ps;
  ps.points.resize(xs.size(), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) ps.points(i, 0) = xs[i];
  return ps;
}

}  // namespace

TEST_CASE("log_multivariate_gamma worked values") {
  CHECK(log_multivariate_gamma(1, 2.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(log_multivariate_gamma(2, 2.0) ==
        doctest::Approx(std::log(std::numbers::pi / 2.0)).epsilon(1e-12));
  CHECK(log_multivariate_gamma(1, 0.5) ==
        doctest::Approx(0.5 * std::log(std::numbers::pi)).epsilon(1e-12));
  CHECK_THROWS_AS(log_multivariate_gamma(2, 0.4), std::invalid_argument);
}

TEST_CASE("cluster_stats basics") {
  Eigen::MatrixXd two(2, 1);
  two << 0.0, 2.0;
  const auto st = cluster_stats(two);
  CHECK(st.count == 2);
  CHECK(st.mean(0) == doctest::Approx(1.0));
  CHECK(st.cov(0, 0) == doctest::Approx(2.0));  // unbiased

  Eigen::MatrixXd one(1, 1);
  one << 5.0;
  CHECK(cluster_stats(one).count == 1);
  CHECK(cluster_stats(one).mean(0) == doctest::Approx(5.0));
  CHECK(cluster_stats(Eigen::MatrixXd(0, 1)).count == 0);
}

TEST_CASE("empty-label contribution matches the n_y = 0 closed form") {
  const auto model = NiwModel::symmetric(2, Eigen::VectorXd::Zero(1), 1.0, 3.0,
                                         Eigen::MatrixXd::Identity(1, 1));
  LabelFunction phi;
  phi.labels = {1, 1};
  phi.label_count = 2;
  const auto ps = points_1d({0.3, -0.4});
  // Label 2 is empty: its term is log Gamma_d(k/2) - (d/2) log nu - (k/2) log|Psi|.
  const double empty_term = log_multivariate_gamma(1, 1.5);
  LabelFunction only;
  only.labels = {1, 1};
  only.label_count = 1;
  NiwModel one_label;
  one_label.labels = {model.labels[0]};
  CHECK(log_label_weight(ps, phi, model) ==
        doctest::Approx(log_label_weight(ps, only, one_label) + empty_term)
            .epsilon(1e-12));
}

TEST_CASE("posterior matches 2-d quadrature over the NIW density") {
  std::mt19937_64 rng(20240517);
  std::normal_distribution<double> gauss(0.0, 1.5);
  for (int inst = 0; inst < 20; ++inst) {
    const int n = 3 + static_cast<int>(rng() % 2);  // n in {3, 4}
    const std::vector<int> sizes = (n == 3) ? std::vector<int>{2, 1}
                                            : std::vector<int>{2, 2};
    std::vector<double> xs(n);
    for (auto& x : xs) x = gauss(rng);
    const auto ps = points_1d(xs);
    const auto model = random_model_1d(rng);
    const auto prior = LabelPrior::fixed_sizes(sizes);

    const auto post = posterior_label_probs(ps, prior, model);

    // Oracle: per label function, product over labels of the quadrature
    // marginal, normalized over the same support.
    std::vector<double> oracle(post.support.size());
    double z = 0.0;
    for (std::size_t s = 0; s < post.support.size(); ++s) {
      double prod = 1.0;
      for (int y = 1; y <= 2; ++y) {
        std::vector<double> cluster;
        for (int i = 0; i < n; ++i)
          if (post.support[s].labels[i] == y) cluster.push_back(xs[i]);
        prod *= cluster_marginal_quadrature(cluster, model.labels[y - 1]);
      }
      oracle[s] = prod;
      z += prod;
    }
    for (std::size_t s = 0; s < post.support.size(); ++s) {
      const double expect = oracle[s] / z;
      CHECK(post.probs[s] == doctest::Approx(expect).epsilon(1e-6));
    }
  }
}

TEST_CASE("separated points concentrate the posterior") {
  const auto ps = points_1d({-10.1, -9.9, 9.9, 10.1});
  const auto model = NiwModel::symmetric(2, Eigen::VectorXd::Zero(1), 1.0, 3.0,
                                         Eigen::MatrixXd::Identity(1, 1));
  const auto post = posterior_label_probs(ps, LabelPrior::fixed_sizes({2, 2}), model);
  REQUIRE(post.support.size() == 6);
  double best = 0.0;
  std::vector<int> best_labels;
  double total = 0.0;
  for (std::size_t s = 0; s < post.support.size(); ++s) {
    total += post.probs[s];
    if (post.probs[s] > best) {
      best = post.probs[s];
      best_labels = post.support[s].labels;
    }
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(best_labels[0] == best_labels[1]);
  CHECK(best_labels[2] == best_labels[3]);
  CHECK(best_labels[0] != best_labels[2]);
}

TEST_CASE("two points, sizes (1,1), symmetric hyperparameters: probability 1/2") {
  const auto ps = points_1d({0.7, -0.2});
  const auto model = NiwModel::symmetric(2, Eigen::VectorXd::Zero(1), 1.0, 3.0,
                                         Eigen::MatrixXd::Identity(1, 1));
  const auto post = posterior_label_probs(ps, LabelPrior::fixed_sizes({1, 1}), model);
  REQUIRE(post.support.size() == 2);
  CHECK(post.probs[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(post.probs[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("scaling invariance x -> cx, m -> cm, Psi -> c^2 Psi") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int d : {1, 2}) {
    PointSet ps;
    ps.points.resize(5, d);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < d; ++j) ps.points(i, j) = gauss(rng);
    auto model = NiwModel::symmetric(2, Eigen::VectorXd::Constant(d, 0.2), 1.3,
                                     d + 2.5, Eigen::MatrixXd::Identity(d, d));
    const auto prior = LabelPrior::fixed_sizes({3, 2});
    const auto base = posterior_label_probs(ps, prior, model);

    const double c = 7.5;
    PointSet scaled;
    scaled.points = c * ps.points;
    auto scaled_model = model;
    for (auto& hp : scaled_model.labels) {
      hp.m *= c;
      hp.psi *= c * c;
    }
    const auto post = posterior_label_probs(scaled, prior, scaled_model);
    REQUIRE(post.probs.size() == base.probs.size());
    for (std::size_t s = 0; s < post.probs.size(); ++s)
      CHECK(post.probs[s] == doctest::Approx(base.probs[s]).epsilon(1e-9));
  }
}

TEST_CASE("point-permutation equivariance") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  PointSet ps;
  ps.points.resize(5, 2);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 2; ++j) ps.points(i, j) = gauss(rng);
  const auto model = NiwModel::symmetric(2, Eigen::VectorXd::Zero(2), 1.0, 4.0,
                                         Eigen::MatrixXd::Identity(2, 2));
  const auto prior = LabelPrior::fixed_sizes({3, 2});
  const auto base = posterior_label_probs(ps, prior, model);

  const std::vector<int> perm = {3, 0, 4, 1, 2};  // position i holds old point perm[i]
  PointSet shuffled;
  shuffled.points.resize(5, 2);
  for (int i = 0; i < 5; ++i) shuffled.points.row(i) = ps.points.row(perm[i]);
  const auto post = posterior_label_probs(shuffled, prior, model);

  // Match each permuted label function back to the original support.
  for (std::size_t s = 0; s < post.support.size(); ++s) {
    std::vector<int> unperm(5);
    for (int i = 0; i < 5; ++i) unperm[perm[i]] = post.support[s].labels[i];
    bool found = false;
    for (std::size_t t = 0; t < base.support.size(); ++t) {
      if (base.support[t].labels == unperm) {
        CHECK(post.probs[s] == doctest::Approx(base.probs[t]).epsilon(1e-10));
        found = true;
        break;
      }
    }
    CHECK(found);
  }
}

TEST_CASE("equal-kappa/nu specialization: determinant-only posterior") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto ps = points_1d({gauss(rng), gauss(rng), gauss(rng), gauss(rng)});
  NiwModel model;
  for (int y = 0; y < 2; ++y) {
    NiwLabelParams hp;
    hp.m = Eigen::VectorXd::Constant(1, y == 0 ? 0.4 : -0.3);
    hp.nu = 1.2;
    hp.kappa = 4.0;
    hp.psi = Eigen::MatrixXd::Constant(1, 1, y == 0 ? 0.8 : 1.4);
    model.labels.push_back(hp);
  }
  const auto prior = LabelPrior::fixed_sizes({3, 1});
  const auto post = posterior_label_probs(ps, prior, model);

  std::vector<double> direct(post.support.size());
  double z = 0.0;
  for (std::size_t s = 0; s < post.support.size(); ++s) {
    double logw = 0.0;
    for (int y = 1; y <= 2; ++y) {
      const auto& hp = model.labels[y - 1];
      std::vector<double> cl;
      for (int i = 0; i < 4; ++i)
        if (post.support[s].labels[i] == y) cl.push_back(ps.points(i, 0));
      const int ny = static_cast<int>(cl.size());
      double psi_star = 0.0;
      if (ny >= 1) {
        double mean = 0.0;
        for (double x : cl) mean += x;
        mean /= ny;
        double ss = 0.0;
        for (double x : cl) ss += (x - mean) * (x - mean);
        psi_star = ss + hp.nu * ny / (hp.nu + ny) * (mean - hp.m(0)) * (mean - hp.m(0));
      }
      logw += -0.5 * (hp.kappa + ny) * std::log(hp.psi(0, 0) + psi_star);
    }
    direct[s] = logw;
  }
  const double mx = *std::max_element(direct.begin(), direct.end());
  for (auto& v : direct) {
    v = std::exp(v - mx);
    z += v;
  }
  for (std::size_t s = 0; s < post.support.size(); ++s)
    CHECK(post.probs[s] == doctest::Approx(direct[s] / z).epsilon(1e-12));
}

TEST_CASE("partition_probs: normalization and label-switch pairing") {
  const auto ps = points_1d({0.1, -0.9, 1.4, 0.3});
  const auto model = NiwModel::symmetric(2, Eigen::VectorXd::Zero(1), 1.0, 3.0,
                                         Eigen::MatrixXd::Identity(1, 1));
  const auto prior = LabelPrior::fixed_sizes({2, 2});
  const auto post = posterior_label_probs(ps, prior, model);
  const auto probs = partition_probs(post);

  double total = 0.0;
  for (const auto& [p, pr] : probs) total += pr;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(probs.size() == 3);

  // Symmetric labels: each partition is induced by exactly two equally
  // probable label functions.
  for (const auto& [p, pr] : probs) {
    double lf_prob = -1.0;
    for (std::size_t s = 0; s < post.support.size(); ++s) {
      if (induced_partition(post.support[s]) == p) {
        lf_prob = post.probs[s];
        break;
      }
    }
    CHECK(pr == doctest::Approx(2.0 * lf_prob).epsilon(1e-10));
  }
}

TEST_CASE("log_sum_exp guards") {
  CHECK(log_sum_exp({0.0, 0.0}) == doctest::Approx(std::log(2.0)));
  CHECK(log_sum_exp({-1e308, -1e308}) < -1e307);
  CHECK_THROWS(log_sum_exp({}));
}
