// Shipped acceptance gate: one pass/fail line per criterion, nonzero exit on
// any failure. Tolerances are pinned here, next to each check.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "rlpp/baselines.hpp"
#include "rlpp/effective.hpp"
#include "rlpp/engine.hpp"
#include "rlpp/experiment.hpp"
#include "rlpp/granulometry.hpp"
#include "rlpp/sampling.hpp"

using namespace rlpp;

namespace {

int g_failures = 0;

void report(int idx, const std::string& name, bool ok, const std::string& detail) {
  std::printf("criterion %2d [%s] %s%s%s\n", idx, ok ? "PASS" : "FAIL", name.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

double now_s() {
  using Clock = std::chrono::steady_clock;
  static const Clock::time_point t0 = Clock::now();
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

NiwModel random_model(std::mt19937_64& rng, int d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  NiwModel model;
  for (int y = 0; y < 2; ++y) {
    NiwLabelParams hp;
    hp.m = Eigen::VectorXd::Zero(d);
    for (int j = 0; j < d; ++j) hp.m(j) = -1.0 + 2.0 * u(rng);
    hp.nu = 0.5 + 1.5 * u(rng);
    hp.kappa = d + 1.5 + 2.0 * u(rng);
    hp.psi = (0.5 + u(rng)) * Eigen::MatrixXd::Identity(d, d);
    model.labels.push_back(hp);
  }
  return model;
}

PointSet random_points(std::mt19937_64& rng, int n, int d) {
  std::normal_distribution<double> gauss(0.0, 1.2);
  PointSet ps;
  ps.points.resize(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) ps.points(i, j) = gauss(rng);
  return ps;
}

// ---------- criterion 1: Eq. 7 vs Eq. 8 partition-error equivalence ----------

double partition_error_oracle(const Partition& p, const LabelPosterior& post, int l) {
  const auto blocks = p.blocks();
  const int k = static_cast<int>(blocks.size());
  std::vector<int> perm(l);
  std::iota(perm.begin(), perm.end(), 1);
  std::vector<std::vector<int>> inducing;
  do {
    std::vector<int> labels(p.size(), 0);
    for (int b = 0; b < k; ++b)
      for (int idx : blocks[b]) labels[idx] = perm[b];
    if (std::find(inducing.begin(), inducing.end(), labels) == inducing.end())
      inducing.push_back(labels);
  } while (std::next_permutation(perm.begin(), perm.end()));

  double err = 0.0;
  for (std::size_t s = 0; s < post.support.size(); ++s) {
    double best = 1.0;
    for (const auto& labels : inducing) {
      int diff = 0;
      for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] != post.support[s].labels[i]) ++diff;
      best = std::min(best, diff / static_cast<double>(labels.size()));
    }
    err += best * post.probs[s];
  }
  return err;
}

void criterion_1() {
  std::mt19937_64 rng(1001);
  double worst = 0.0;
  for (int inst = 0; inst < 100; ++inst) {
    const int d = 1 + static_cast<int>(rng() % 2);
    const int n = 4 + static_cast<int>(rng() % 5);  // n <= 8
    const int n1 = n / 2;
    const auto ps = random_points(rng, n, d);
    const auto model = random_model(rng, d);
    const auto prior = LabelPrior::fixed_sizes({n1, n - n1});
    const auto post = posterior_label_probs(ps, prior, model);
    const auto probs = partition_probs(post);
    for (const auto& [p, unused] : probs) {
      const double a = partition_error(p, probs, 2);
      const double b = partition_error_oracle(p, post, 2);
      worst = std::max(worst, std::abs(a - b));
    }
  }
  report(1, "Eq.7/Eq.8 partition-error equivalence (100 models, n<=8)", worst <= 1e-12,
         "max |delta| = " + std::to_string(worst));
}

// ---------- criterion 2: natural-cost oracle and metric axioms ----------

std::int64_t overlap_oracle(const Partition& p, const Partition& q, int l) {
  auto pb = p.blocks();
  auto qb = q.blocks();
  while (static_cast<int>(pb.size()) < l) pb.push_back({});
  while (static_cast<int>(qb.size()) < l) qb.push_back({});
  std::vector<int> perm(l);
  std::iota(perm.begin(), perm.end(), 0);
  std::int64_t best = 0;
  do {
    std::int64_t w = 0;
    for (int b = 0; b < l; ++b)
      for (int idx : pb[b])
        if (std::count(qb[perm[b]].begin(), qb[perm[b]].end(), idx)) ++w;
    best = std::max(best, w);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

void criterion_2() {
  bool ok = true;
  std::string detail;

  // Assignment vs permutation brute force, every pair, n <= 7, l <= 4.
  for (int n = 2; n <= 7 && ok; ++n) {
    for (int l = 2; l <= 4 && ok; ++l) {
      const auto parts = enumerate_partitions(n, l);
      for (std::size_t i = 0; i < parts.size() && ok; ++i)
        for (std::size_t j = 0; j < parts.size() && ok; ++j)
          if (max_block_overlap(parts[i], parts[j], l) !=
              overlap_oracle(parts[i], parts[j], l)) {
            ok = false;
            detail = "overlap mismatch at n=" + std::to_string(n);
          }
    }
  }

  // Symmetry, identity of indiscernibles, triangle inequality: n <= 6
  // exhaustive over all partitions (l = n) via a precomputed cost matrix.
  for (int n = 2; n <= 6 && ok; ++n) {
    const auto parts = enumerate_partitions(n, n);
    const std::size_t b = parts.size();
    std::vector<std::vector<double>> c(b, std::vector<double>(b));
    for (std::size_t i = 0; i < b; ++i)
      for (std::size_t j = 0; j < b; ++j)
        c[i][j] = natural_cost(parts[i], parts[j], n);
    for (std::size_t i = 0; i < b && ok; ++i)
      for (std::size_t j = 0; j < b && ok; ++j) {
        if (c[i][j] != c[j][i]) { ok = false; detail = "symmetry"; }
        if ((c[i][j] == 0.0) != (i == j)) { ok = false; detail = "identity"; }
      }
    for (std::size_t i = 0; i < b && ok; ++i)
      for (std::size_t j = 0; j < b && ok; ++j)
        for (std::size_t k = 0; k < b; ++k)
          if (c[i][k] > c[i][j] + c[j][k] + 1e-12) {
            ok = false;
            detail = "triangle inequality at n=" + std::to_string(n);
            break;
          }
  }
  report(2, "natural-cost assignment oracle + metric axioms (n<=7/<=6)", ok, detail);
}

// ---------- criterion 3: posterior quadrature oracle ----------

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
    const double log_ig = a * std::log(b) - std::lgamma(a) - (a + 1.0) * t - b / var + t;
    const double sd_mu = std::sqrt(var / (n + hp.nu));
    double inner = 0.0;
    for (std::size_t mi = 0; mi < mn.size(); ++mi) {
      const double mu = mu_bar + 12.0 * sd_mu * mn[mi];
      double lp = -0.5 * (std::log(2.0 * std::numbers::pi * var / hp.nu) +
                          (mu - hp.m(0)) * (mu - hp.m(0)) * hp.nu / var);
      for (double x : xs)
        lp += -0.5 * (std::log(2.0 * std::numbers::pi * var) + (x - mu) * (x - mu) / var);
      inner += mw[mi] * std::exp(lp);
    }
    total += tw[ti] * std::exp(log_ig) * inner * 12.0 * sd_mu;
  }
  return total * 0.5 * (t_hi - t_lo);
}

void criterion_3() {
  std::mt19937_64 rng(3003);
  std::normal_distribution<double> gauss(0.0, 1.5);
  double worst = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const int n = 3 + static_cast<int>(rng() % 2);
    const std::vector<int> sizes = (n == 3) ? std::vector<int>{2, 1}
                                            : std::vector<int>{2, 2};
    std::vector<double> xs(n);
    for (auto& x : xs) x = gauss(rng);
    PointSet ps;
    ps.points.resize(n, 1);
    for (int i = 0; i < n; ++i) ps.points(i, 0) = xs[i];
    const auto model = random_model(rng, 1);
    const auto post =
        posterior_label_probs(ps, LabelPrior::fixed_sizes(sizes), model);

    std::vector<double> oracle(post.support.size());
    double z = 0.0;
    for (std::size_t s = 0; s < post.support.size(); ++s) {
      double prod = 1.0;
      for (int y = 1; y <= 2; ++y) {
        std::vector<double> cl;
        for (int i = 0; i < n; ++i)
          if (post.support[s].labels[i] == y) cl.push_back(xs[i]);
        prod *= cluster_marginal_quadrature(cl, model.labels[y - 1]);
      }
      oracle[s] = prod;
      z += prod;
    }
    for (std::size_t s = 0; s < post.support.size(); ++s)
      worst = std::max(worst, std::abs(post.probs[s] - oracle[s] / z) /
                                  std::max(oracle[s] / z, 1e-300));
  }
  report(3, "NIW posterior vs 2-d quadrature (20 instances, d=1, n<=4)",
         worst <= 1e-6, "max rel err = " + std::to_string(worst));
}

// ---------- criterion 4: effective-RLPP identity at the error level ----------

void criterion_4() {
  const std::vector<int> sizes = {5, 5};
  struct State {
    std::vector<Eigen::VectorXd> means;
    std::vector<Eigen::MatrixXd> covs;
    double weight;
  };
  std::vector<State> states;
  states.push_back({{Eigen::VectorXd::Constant(1, -1.0), Eigen::VectorXd::Constant(1, 1.0)},
                    {Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Identity(1, 1)},
                    0.3});
  states.push_back({{Eigen::VectorXd::Constant(1, -3.0), Eigen::VectorXd::Constant(1, 3.0)},
                    {0.5 * Eigen::MatrixXd::Identity(1, 1),
                     0.5 * Eigen::MatrixXd::Identity(1, 1)},
                    0.7});

  auto kmeans_error = [&](const GaussianDraw& draw, std::uint64_t seed) {
    BaselineConfig cfg;
    cfg.method = BaselineMethod::KMeans;
    cfg.k = 2;
    cfg.seed = seed;
    const auto res = run_baseline(draw.points, cfg);
    return natural_cost(res.partition,
                        Partition::from_label_function(draw.labels), 2);
  };

  const int reps = 10000;

  // Route A: expectation over theta of the state-conditional error.
  double mean_a = 0.0, sq_a = 0.0;
  {
    std::mt19937_64 pick(4001);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int r = 0; r < reps; ++r) {
      const State& st = (u(pick) < states[0].weight) ? states[0] : states[1];
      const auto draw =
          sample_gaussian_rlpp(st.means, st.covs, sizes, mix_seed(4002, r));
      const double e = kmeans_error(draw, mix_seed(4003, r));
      mean_a += e;
      sq_a += e * e;
    }
  }
  mean_a /= reps;
  const double se_a = std::sqrt(std::max(0.0, sq_a / reps - mean_a * mean_a) / reps);

  // Route B: the effective RLPP's own sampler.
  UncertaintyClass uc;
  for (std::size_t s = 0; s < states.size(); ++s) {
    const State& st = states[s];
    RlppState rs;
    rs.id = "state-" + std::to_string(s);
    rs.weight = st.weight;
    rs.log_likelihood = [](const PointSet&, const LabelFunction&) { return 0.0; };
    rs.sampler = [st, sizes](std::uint64_t seed) {
      const auto draw = sample_gaussian_rlpp(st.means, st.covs, sizes, seed);
      return LabeledSample{draw.points, draw.labels, ""};
    };
    uc.states.push_back(std::move(rs));
  }
  const EffectiveRlpp eff(uc);

  double mean_b = 0.0, sq_b = 0.0;
  for (int r = 0; r < reps; ++r) {
    const auto sample = eff.sample(mix_seed(4004, r));
    GaussianDraw draw;
    draw.points = sample.points;
    draw.labels = sample.labels;
    const double e = kmeans_error(draw, mix_seed(4005, r));
    mean_b += e;
    sq_b += e * e;
  }
  mean_b /= reps;
  const double se_b = std::sqrt(std::max(0.0, sq_b / reps - mean_b * mean_b) / reps);

  const double margin = 3.0 * std::sqrt(se_a * se_a + se_b * se_b);
  report(4, "effective-RLPP identity for kmeans error (10^4 reps)",
         std::abs(mean_a - mean_b) <= margin,
         "|" + std::to_string(mean_a) + " - " + std::to_string(mean_b) +
             "| vs 3se = " + std::to_string(margin));
}

// ---------- criterion 5: Gaussian experiment ordering ----------

void criterion_5() {
  bool ok = true;
  std::string detail;
  for (int d : {1, 2, 10}) {
    exp::GaussianExpConfig cfg;
    cfg.d = d;
    cfg.n1 = cfg.n2 = 5;
    cfg.reps = 200;
    cfg.seed = 500 + d;
    cfg.threads = 8;
    const auto result = exp::run_gaussian_experiment(cfg);
    const auto summary = result.summarize();

    double ibr = -1.0, random_mean = 0.0, random_se = 0.0;
    for (const auto& ms : summary)
      if (ms.method == "ibr") ibr = ms.mean_error;
    for (const auto& ms : summary) {
      if (ms.method == "ibr") continue;
      if (ms.method == "random") {
        random_mean = ms.mean_error;
        random_se = ms.std_error;
      }
      const bool strict = (d == 10);
      if ((strict && !(ibr < ms.mean_error)) || (!strict && !(ibr <= ms.mean_error))) {
        ok = false;
        detail = "d=" + std::to_string(d) + ": ibr " + std::to_string(ibr) +
                 " !< " + ms.method + " " + std::to_string(ms.mean_error);
      }
    }

    // Random's mean matches its enumerated expectation 5/14 within 3 SE.
    const double exact = 5.0 / 14.0;
    if (std::abs(random_mean - exact) > 3.0 * random_se) {
      ok = false;
      detail = "d=" + std::to_string(d) + ": random " + std::to_string(random_mean) +
               " vs exact " + std::to_string(exact);
    }
  }
  report(5, "Gaussian experiment: IBR best, Random at 5/14 (d=1,2,10 x 200 reps)",
         ok, detail);
}

// ---------- criterion 6: granulometric constants ----------

gran::BinaryImage render_single(gran::Primitive prim, double r) {
  gran::GrainScene scene;
  const int pad = static_cast<int>(3 * r) + 20;
  scene.width = scene.height = pad;
  scene.grains.push_back({prim, r, pad / 2.0, pad / 2.0});
  return gran::render_scene(scene);
}

void criterion_6() {
  // Large radius: the discrete sweep carries a one-pixel bias per run, and
  // the rod's thin dimension r/sqrt(5) drives the worst-case relative error.
  const double r = 1000.0;
  const auto pc = gran::primitive_constants();
  double worst = 0.0;
  for (int prim = 0; prim < 2; ++prim) {
    const auto img = render_single(
        prim == 0 ? gran::Primitive::Triangle : gran::Primitive::Rod, r);
    for (int se = 0; se < 2; ++se) {
      const auto dir = se == 0 ? gran::Direction::Vertical : gran::Direction::Horizontal;
      const auto omega =
          gran::opening_area_sweep(img, dir, std::max(img.width, img.height));
      const auto m = gran::pattern_spectrum_moments(omega);
      const double e1 = std::abs(m[0] / r - pc.mu[prim][se][0]) / pc.mu[prim][se][0];
      const double e2 =
          std::abs(m[1] / (r * r) - pc.mu[prim][se][1]) / pc.mu[prim][se][1];
      worst = std::max({worst, e1, e2});
    }
  }
  report(6, "all 8 granulometric constants from discrete sweeps (r=1000)",
         worst < 0.01, "max rel err = " + std::to_string(worst));
}

// ---------- criterion 7: Theorem-3 identity, exact and rendered ----------

void criterion_7() {
  const auto pc = gran::primitive_constants();
  auto uv = [&](const std::vector<double>& tri, const std::vector<double>& rod,
                int se, int k) {
    double u = 0.0, v = 0.0;
    for (double r : tri) {
      u += pc.mu[0][se - 1][k - 1] * std::pow(r, k + 2);
      v += r * r;
    }
    for (double r : rod) {
      u += pc.mu[1][se - 1][k - 1] * std::pow(r, k + 2);
      v += r * r;
    }
    return u / v;
  };

  std::mt19937_64 rng(7007);
  std::uniform_real_distribution<double> u(0.5, 4.0);
  double worst_exact = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> tri(1 + rng() % 8), rod(1 + rng() % 8);
    for (auto& x : tri) x = u(rng);
    for (auto& x : rod) x = u(rng);
    const auto f = gran::exact_features_from_radii(tri, rod);
    const double z0 = uv(tri, rod, 1, 1), z1 = uv(tri, rod, 2, 1);
    const double z2 = uv(tri, rod, 1, 2), z3 = uv(tri, rod, 2, 2);
    worst_exact = std::max({worst_exact, std::abs(f.z(0) - z0), std::abs(f.z(1) - z1),
                            std::abs(f.z(2) - z2), std::abs(f.z(3) - z3)});
  }

  // Rendered scene with radii >= 40 px against M x.
  std::uniform_real_distribution<double> big(40.0, 70.0);
  gran::GrainScene scene;
  scene.width = 900;
  scene.height = 620;
  std::vector<double> tri, rod;
  for (int i = 0; i < 3; ++i) {
    tri.push_back(big(rng));
    rod.push_back(big(rng));
    scene.grains.push_back({gran::Primitive::Triangle, tri.back(), 150.0 + 300.0 * i, 160.0});
    scene.grains.push_back({gran::Primitive::Rod, rod.back(), 150.0 + 300.0 * i, 450.0});
  }
  const auto meas = gran::measured_features(gran::render_scene(scene));
  const auto exact = gran::exact_features_from_radii(tri, rod);
  double worst_render = 0.0;
  for (int i = 0; i < 4; ++i)
    worst_render =
        std::max(worst_render, std::abs(meas.z(i) - exact.z(i)) / exact.z(i));

  report(7, "Theorem-3 z=Mx identity (1e-12) and rendered moments (3%)",
         worst_exact <= 1e-12 && worst_render < 0.03,
         "exact " + std::to_string(worst_exact) + ", rendered " +
             std::to_string(worst_render));
}

// ---------- criterion 8: Lemma-1 asymptotics ----------

void criterion_8() {
  const double a1 = 1.95, a2 = 1.97, beta = 2.0, b1 = 0.5;
  const int n_grains = 10000, sets = 2000;
  const auto law =
      gran::asymptotic_law(b1, 1.0 - b1, a1, a2, beta, static_cast<double>(n_grains));

  std::mt19937_64 rng(8008);
  std::gamma_distribution<double> tri(a1, beta), rod(a2, beta);
  std::vector<Eigen::Vector4d> xs(sets);
  Eigen::Vector4d mean = Eigen::Vector4d::Zero();
  for (int s = 0; s < sets; ++s) {
    std::vector<double> tr(n_grains / 2), ro(n_grains / 2);
    for (auto& r : tr) r = tri(rng);
    for (auto& r : ro) r = rod(rng);
    xs[s] = gran::exact_features_from_radii(tr, ro).x;
    mean += xs[s];
  }
  mean /= sets;

  double mean_err = 0.0;
  for (int i = 0; i < 4; ++i)
    mean_err = std::max(mean_err, std::abs(mean(i) - law.mean(i)) /
                                      std::abs(law.mean(i)));

  Eigen::Matrix4d cov = Eigen::Matrix4d::Zero();
  for (const auto& x : xs) cov += (x - mean) * (x - mean).transpose();
  cov /= sets - 1;

  // 3-SE band per entry, with the standard error of a covariance entry
  // estimated from the empirical fourth moments.
  bool cov_ok = true;
  double worst_sigma = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double m4 = 0.0;
      for (const auto& x : xs) {
        const double t = (x(i) - mean(i)) * (x(j) - mean(j));
        m4 += (t - cov(i, j)) * (t - cov(i, j));
      }
      const double se = std::sqrt(m4 / (sets - 1) / sets);
      const double dev = std::abs(cov(i, j) - law.cov(i, j));
      worst_sigma = std::max(worst_sigma, dev / se);
      if (dev > 3.0 * se) cov_ok = false;
    }

  report(8, "Lemma-1 mean within 5% and covariance within 3 SE (N=1e4, 2000 sets)",
         mean_err < 0.05 && cov_ok,
         "mean rel err " + std::to_string(mean_err) + ", worst cov dev " +
             std::to_string(worst_sigma) + " SE");
}

// ---------- criterion 9: granular experiment ----------

void criterion_9() {
  bool ok = true;
  std::string detail;
  for (const auto [n1, n2] : {std::pair{5, 5}, std::pair{6, 4}}) {
    exp::GranularExpConfig cfg;
    cfg.n1 = n1;
    cfg.n2 = n2;
    cfg.theta_states = 10;
    cfg.reps = 20;
    cfg.seed = 900 + n1;
    cfg.threads = 8;
    const auto result = exp::run_granular_experiment(cfg);
    const auto summary = result.summarize();

    double ibr = -1.0, random_mean = -1.0;
    for (const auto& ms : summary) {
      if (ms.method == "ibr") ibr = ms.mean_error;
      if (ms.method == "random") random_mean = ms.mean_error;
    }
    for (const auto& ms : summary)
      if (ms.method != "ibr" && !(ibr < ms.mean_error)) {
        ok = false;
        detail = "ibr not strict min vs " + ms.method;
      }
    if (!(ibr < 0.25)) {
      ok = false;
      detail = "ibr overall " + std::to_string(ibr) + " !< 0.25";
    }
    if (!(random_mean >= 0.30 && random_mean <= 0.45)) {
      ok = false;
      detail = "random overall " + std::to_string(random_mean) + " outside [0.30,0.45]";
    }

    // Peak location: the per-theta curve's maximum must sit at the grid
    // points nearest theta = 1.875 (states 4 and 5 are equidistant), judged
    // within the 3-SE Monte-Carlo margin used for all ordering claims.
    const auto by_state = result.summarize_by_state();
    for (const auto& method : cfg.methods) {
      double peak = -1.0, peak_se = 0.0, mid = -1.0, mid_se = 0.0;
      for (const auto& [s, ms] : by_state) {
        if (ms.method != method) continue;
        if (ms.mean_error > peak) {
          peak = ms.mean_error;
          peak_se = ms.std_error;
        }
        if ((s == 4 || s == 5) && ms.mean_error > mid) {
          mid = ms.mean_error;
          mid_se = ms.std_error;
        }
      }
      const double margin = 3.0 * std::sqrt(peak_se * peak_se + mid_se * mid_se);
      if (peak - mid > margin) {
        ok = false;
        detail = method + " peak " + std::to_string(peak) + " away from mid-grid " +
                 std::to_string(mid);
      }
    }
  }
  report(9, "granular experiment: IBR strict min, mid-theta peak, level bands", ok,
         detail);
}

// ---------- criterion 10: determinism across thread counts ----------

void criterion_10() {
  exp::GaussianExpConfig g;
  g.d = 2;
  g.reps = 24;
  g.seed = 1010;
  g.threads = 1;
  const auto g1 = exp::to_csv(exp::run_gaussian_experiment(g));
  g.threads = 8;
  const auto g8 = exp::to_csv(exp::run_gaussian_experiment(g));

  exp::GranularExpConfig r;
  r.theta_states = 4;
  r.rho_count = 25;
  r.reps = 3;
  r.seed = 2020;
  r.threads = 1;
  const auto r1 = exp::to_csv(exp::run_granular_experiment(r));
  r.threads = 8;
  const auto r8 = exp::to_csv(exp::run_granular_experiment(r));

  report(10, "byte-identical result CSVs with 1 and 8 worker threads",
         g1 == g8 && r1 == r8, "");
}

}  // namespace

int main() {
  const struct {
    void (*fn)();
  } criteria[] = {{criterion_1}, {criterion_2}, {criterion_3}, {criterion_4},
                  {criterion_5}, {criterion_6}, {criterion_7}, {criterion_8},
                  {criterion_9}, {criterion_10}};
  for (const auto& c : criteria) {
    const double t0 = now_s();
    c.fn();
    std::printf("            elapsed %.1fs\n", now_s() - t0);
  }
  if (g_failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criteria FAILED\n", g_failures);
  return 1;
}
