#include "rlpp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "rlpp/baselines.hpp"
#include "rlpp/engine.hpp"
#include "rlpp/sampling.hpp"

namespace rlpp::exp {

namespace {

const std::vector<std::string> kMethods = {
    "ibr", "ibr-exact", "ibr-pseed", "kmeans", "fcm",
    "hier-s", "hier-a", "hier-c", "em", "random"};

bool baseline_from_id(const std::string& id, BaselineMethod& out) {
  if (id == "kmeans") out = BaselineMethod::KMeans;
  else if (id == "fcm") out = BaselineMethod::FuzzyCMeans;
  else if (id == "hier-s") out = BaselineMethod::HierSingle;
  else if (id == "hier-a") out = BaselineMethod::HierAverage;
  else if (id == "hier-c") out = BaselineMethod::HierComplete;
  else if (id == "em") out = BaselineMethod::EmGmm;
  else if (id == "random") out = BaselineMethod::Random;
  else return false;
  return true;
}

using Clock = std::chrono::steady_clock;

// Runs one method against one draw; IBR variants get the posterior machinery
// through the callbacks so the Gaussian and granular paths share this code.
template <typename IbrExact, typename IbrPseed>
RunRecord score_method(const std::string& id, const PointSet& points,
                       const Partition& truth, const std::vector<int>& sizes,
                       std::uint64_t method_seed, bool with_timing,
                       const IbrExact& ibr_exact, const IbrPseed& ibr_pseed) {
  RunRecord rec;
  rec.method = id;
  const int l = static_cast<int>(sizes.size());
  const auto t0 = Clock::now();

  Partition result;
  if (id == "ibr") {
    result = (points.size() <= 12) ? ibr_exact() : ibr_pseed(method_seed);
  } else if (id == "ibr-exact") {
    result = ibr_exact();
  } else if (id == "ibr-pseed") {
    result = ibr_pseed(method_seed);
  } else {
    BaselineConfig bc;
    if (!baseline_from_id(id, bc.method))
      throw std::invalid_argument("unknown method: " + id);
    bc.k = l;
    bc.seed = method_seed;
    bc.random_sizes = sizes;
    result = run_baseline(points, bc).partition;
  }

  rec.error = natural_cost(result, truth, l);
  if (with_timing)
    rec.runtime_ms =
        std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  return rec;
}

// Fixed-width worker pool over `tasks` indices; each task fills its own
// preallocated slots, so the result is independent of scheduling.
template <typename Fn>
void run_pool(int tasks, int threads, const Fn& body) {
  threads = std::max(1, threads);
  if (threads == 1) {
    for (int t = 0; t < tasks; ++t) body(t);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int t = next.fetch_add(1);
        if (t >= tasks) return;
        try {
          body(t);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string format_double(double v, int precision) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

}  // namespace

bool is_known_method(const std::string& id) {
  return std::find(kMethods.begin(), kMethods.end(), id) != kMethods.end();
}

std::vector<std::string> default_methods() {
  return {"ibr", "kmeans", "fcm", "hier-s", "hier-a", "hier-c", "em", "random"};
}

RunResult run_gaussian_experiment(const GaussianExpConfig& cfg) {
  if (cfg.methods.empty())
    throw std::invalid_argument("gaussian experiment: no methods given");
  for (const auto& m : cfg.methods)
    if (!is_known_method(m))
      throw std::invalid_argument("gaussian experiment: unknown method " + m);
  if (cfg.d < 1 || cfg.n1 < 1 || cfg.n2 < 1 || cfg.reps < 1)
    throw std::invalid_argument("gaussian experiment: positive d, sizes, reps required");

  const std::vector<int> sizes = {cfg.n1, cfg.n2};
  const int n = cfg.n1 + cfg.n2;
  const auto model = NiwModel::symmetric(2, Eigen::VectorXd::Zero(cfg.d), 1.0,
                                         cfg.d + 2.0, Eigen::MatrixXd::Identity(cfg.d, cfg.d));
  const auto prior = LabelPrior::fixed_sizes(sizes);
  const auto loglik = [&model](const PointSet& s, const LabelFunction& lf) {
    return log_label_weight(s, lf, model);
  };

  const int m_count = static_cast<int>(cfg.methods.size());
  RunResult out;
  out.records.resize(static_cast<std::size_t>(cfg.reps) * m_count);

  run_pool(cfg.reps, cfg.threads, [&](int rep) {
    const auto draw =
        sample_niw_rlpp(model, sizes, mix_seed(cfg.seed, static_cast<std::uint64_t>(rep)));
    const Partition truth = Partition::from_label_function(draw.labels);

    for (int m = 0; m < m_count; ++m) {
      const std::uint64_t mseed =
          mix_seed(cfg.seed, static_cast<std::uint64_t>(rep), 1000 + m);
      RunRecord rec = score_method(
          cfg.methods[m], draw.points, truth, sizes, mseed, cfg.with_timing,
          [&] { return bayes_partition(draw.points, prior, model).partition; },
          [&](std::uint64_t s) {
            PseedConfig pc;
            pc.seed = s;
            pc.subset_size = std::min(10, n);
            return pseed_fast(draw.points, prior, loglik, pc).partition;
          });
      rec.experiment = "gaussian";
      rec.d = cfg.d;
      rec.n1 = cfg.n1;
      rec.n2 = cfg.n2;
      rec.state_index = rep;
      rec.rep = rep;
      out.records[static_cast<std::size_t>(rep) * m_count + m] = std::move(rec);
    }
  });
  return out;
}

RunResult run_granular_experiment(const GranularExpConfig& cfg) {
  if (cfg.methods.empty())
    throw std::invalid_argument("granular experiment: no methods given");
  for (const auto& m : cfg.methods)
    if (!is_known_method(m))
      throw std::invalid_argument("granular experiment: unknown method " + m);
  if (cfg.theta_states < 1 || cfg.rho_count < 1 || cfg.reps < 1 || cfg.n1 < 1 ||
      cfg.n2 < 1)
    throw std::invalid_argument("granular experiment: positive counts required");

  const auto theta_grid = gran::Grid::uniform(cfg.theta_lo, cfg.theta_hi, cfg.theta_states);
  const auto rho_grid = gran::Grid::uniform(cfg.rho_lo, cfg.rho_hi, cfg.rho_count);
  const gran::GranularLikelihood glik(cfg.model, rho_grid, theta_grid);

  const std::vector<int> sizes = {cfg.n1, cfg.n2};
  const int n = cfg.n1 + cfg.n2;
  const auto prior = LabelPrior::fixed_sizes(sizes);
  const int m_count = static_cast<int>(cfg.methods.size());
  const int n_grains = static_cast<int>(std::lround(cfg.model.n_grains));

  // One image's feature vector under class y at (rho, theta).
  auto draw_features = [&](std::mt19937_64& rng, int class_y, double rho,
                           double theta) -> Eigen::Vector4d {
    const double b1 = (class_y == 1) ? rho : 1.0 - rho;
    const double beta = (class_y == 1) ? theta : cfg.model.beta_sum - theta;
    const double a_tri =
        (class_y == 1) ? cfg.model.alpha_triangle_c1 : cfg.model.alpha_triangle_c2;
    const double a_rod =
        (class_y == 1) ? cfg.model.alpha_rod_c1 : cfg.model.alpha_rod_c2;

    if (cfg.rendered) {
      gran::SizingModel sizing;
      sizing.alpha_triangle = a_tri;
      sizing.alpha_rod = a_rod;
      sizing.beta = beta * cfg.radius_scale;
      const auto scene =
          gran::sample_scene(n_grains, b1, sizing, cfg.image_size, cfg.image_size,
                             cfg.min_radius_units * cfg.radius_scale, rng());
      const auto feat = gran::measured_features(gran::render_scene(scene));
      // Back to radius units: degree-1 entries scale with the pixel scale,
      // degree-2 entries with its square.
      Eigen::Vector4d x = feat.x;
      x(0) /= cfg.radius_scale;
      x(1) /= cfg.radius_scale;
      x(2) /= cfg.radius_scale * cfg.radius_scale;
      x(3) /= cfg.radius_scale * cfg.radius_scale;
      return x;
    }

    const int n1g = static_cast<int>(std::lround(b1 * n_grains));
    std::gamma_distribution<double> tri(a_tri, beta), rod(a_rod, beta);
    std::vector<double> tri_r(n1g), rod_r(n_grains - n1g);
    for (auto& r : tri_r) r = tri(rng);
    for (auto& r : rod_r) r = rod(rng);
    return gran::exact_features_from_radii(tri_r, rod_r).x;
  };

  const int tasks = cfg.theta_states * cfg.reps;
  RunResult out;
  out.records.resize(static_cast<std::size_t>(tasks) * m_count);

  run_pool(tasks, cfg.threads, [&](int task) {
    const int state = task / cfg.reps;
    const int rep = task % cfg.reps;
    const double theta = theta_grid.values[state];

    std::mt19937_64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(state),
                                 static_cast<std::uint64_t>(rep)));
    // rho ~ its grid prior, labels uniform over the size-valid assignments.
    const double rho =
        rho_grid.values[std::discrete_distribution<int>(
            rho_grid.weights.begin(), rho_grid.weights.end())(rng)];
    LabelFunction lf;
    lf.labels = sample_size_valid_labels(rng, sizes);
    lf.label_count = 2;

    PointSet features;
    features.points.resize(n, 4);
    for (int i = 0; i < n; ++i)
      features.points.row(i) = draw_features(rng, lf.labels[i], rho, theta).transpose();
    const Partition truth = Partition::from_label_function(lf);

    for (int m = 0; m < m_count; ++m) {
      const std::uint64_t mseed = mix_seed(
          cfg.seed, static_cast<std::uint64_t>(task), 1000 + m);
      RunRecord rec = score_method(
          cfg.methods[m], features, truth, sizes, mseed, cfg.with_timing,
          [&] {
            return bayes_partition_from_posterior(glik.posterior(features, prior), 2)
                .partition;
          },
          [&](std::uint64_t s) {
            PseedConfig pc;
            pc.seed = s;
            pc.subset_size = std::min(10, n);
            return pseed_fast(features, prior, glik.fn(), pc).partition;
          });
      rec.experiment = "granular";
      rec.d = 4;
      rec.n1 = cfg.n1;
      rec.n2 = cfg.n2;
      rec.state_index = state;
      rec.theta = theta;
      rec.rep = rep;
      out.records[static_cast<std::size_t>(task) * m_count + m] = std::move(rec);
    }
  });
  return out;
}

std::vector<MethodSummary> RunResult::summarize() const {
  std::vector<MethodSummary> out;
  std::vector<double> sum, sumsq;
  for (const auto& r : records) {
    std::size_t i = 0;
    while (i < out.size() && out[i].method != r.method) ++i;
    if (i == out.size()) {
      out.push_back({r.method, 0, 0.0, 0.0});
      sum.push_back(0.0);
      sumsq.push_back(0.0);
    }
    ++out[i].count;
    sum[i] += r.error;
    sumsq[i] += r.error * r.error;
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double nn = out[i].count;
    out[i].mean_error = sum[i] / nn;
    if (out[i].count > 1) {
      const double var =
          std::max(0.0, (sumsq[i] - nn * out[i].mean_error * out[i].mean_error) / (nn - 1));
      out[i].std_error = std::sqrt(var / nn);
    }
  }
  return out;
}

std::vector<std::pair<int, MethodSummary>> RunResult::summarize_by_state() const {
  std::vector<int> states;
  for (const auto& r : records)
    if (std::find(states.begin(), states.end(), r.state_index) == states.end())
      states.push_back(r.state_index);
  std::sort(states.begin(), states.end());

  std::vector<std::pair<int, MethodSummary>> out;
  for (int s : states) {
    RunResult slice;
    for (const auto& r : records)
      if (r.state_index == s) slice.records.push_back(r);
    for (auto& ms : slice.summarize()) out.emplace_back(s, std::move(ms));
  }
  return out;
}

std::string to_csv(const RunResult& result) {
  std::ostringstream os;
  os << "experiment,d,n1,n2,state_index,theta,rep,method,error,runtime_ms\n";
  for (const auto& r : result.records) {
    os << r.experiment << ',' << r.d << ',' << r.n1 << ',' << r.n2 << ','
       << r.state_index << ',' << format_double(r.theta, 6) << ',' << r.rep << ','
       << r.method << ',' << format_double(r.error, 10) << ','
       << format_double(r.runtime_ms, 3) << '\n';
  }
  return os.str();
}

std::string summary_csv(const RunResult& result) {
  std::ostringstream os;
  os << "method,count,mean_error,std_error\n";
  for (const auto& ms : result.summarize())
    os << ms.method << ',' << ms.count << ',' << format_double(ms.mean_error, 10)
       << ',' << format_double(ms.std_error, 10) << '\n';
  return os.str();
}

std::string per_state_csv(const RunResult& result) {
  // Theta per state taken from the records (0 for the Gaussian experiment).
  std::ostringstream os;
  os << "state_index,theta,method,count,mean_error,std_error\n";
  for (const auto& [s, ms] : result.summarize_by_state()) {
    double theta = 0.0;
    for (const auto& r : result.records)
      if (r.state_index == s) {
        theta = r.theta;
        break;
      }
    os << s << ',' << format_double(theta, 6) << ',' << ms.method << ',' << ms.count
       << ',' << format_double(ms.mean_error, 10) << ','
       << format_double(ms.std_error, 10) << '\n';
  }
  return os.str();
}

}  // namespace rlpp::exp
