// Command-line front end: clustering, partition costs, granulometry sweeps,
// scene rendering/sampling and the Monte-Carlo experiments.
//
// Exit codes: 0 success, 1 usage/input error, 2 runtime error.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rlpp/baselines.hpp"
#include "rlpp/engine.hpp"
#include "rlpp/experiment.hpp"
#include "rlpp/granulometry.hpp"
#include "rlpp/io.hpp"
#include "rlpp/sampling.hpp"

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<int> parse_sizes(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stoi(tok));
    } catch (...) {
      throw UsageError("--sizes expects comma-separated integers");
    }
    if (out.back() < 1) throw UsageError("--sizes entries must be >= 1");
  }
  if (out.empty()) throw UsageError("--sizes is empty");
  return out;
}

std::vector<std::string> parse_methods(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!rlpp::exp::is_known_method(tok)) throw UsageError("unknown method: " + tok);
    out.push_back(tok);
  }
  if (out.empty()) throw UsageError("--methods is empty");
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

// Scene text format: one header line "width height", then one grain per
// line: "triangle|rod radius cx cy". '#' starts a comment line.
rlpp::gran::GrainScene read_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open scene file: " + path);
  rlpp::gran::GrainScene scene;
  std::string line;
  int lineno = 0;
  bool have_dims = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    if (!have_dims) {
      if (!(ls >> scene.width >> scene.height))
        throw UsageError(path + ":" + std::to_string(lineno) + ": expected 'width height'");
      have_dims = true;
      continue;
    }
    std::string kind;
    rlpp::gran::Grain g;
    if (!(ls >> kind >> g.radius >> g.cx >> g.cy))
      throw UsageError(path + ":" + std::to_string(lineno) +
                       ": expected 'triangle|rod radius cx cy'");
    if (kind == "triangle") g.primitive = rlpp::gran::Primitive::Triangle;
    else if (kind == "rod") g.primitive = rlpp::gran::Primitive::Rod;
    else throw UsageError(path + ":" + std::to_string(lineno) + ": unknown primitive " + kind);
    scene.grains.push_back(g);
  }
  if (!have_dims) throw UsageError(path + ": empty scene file");
  return scene;
}

void write_scene(const std::string& path, const rlpp::gran::GrainScene& scene) {
  std::ostringstream os;
  os.precision(17);
  os << scene.width << ' ' << scene.height << '\n';
  for (const auto& g : scene.grains)
    os << (g.primitive == rlpp::gran::Primitive::Triangle ? "triangle" : "rod") << ' '
       << g.radius << ' ' << g.cx << ' ' << g.cy << '\n';
  write_text(path, os.str());
}

// ---- cluster ----

struct ClusterOpts {
  std::string input, model, method = "ibr-exact", sizes_str, output;
  std::uint64_t seed = 0;
  bool have_seed = false;
  int k = 2;
};

int cmd_cluster(const ClusterOpts& o) {
  const bool is_ibr = o.method == "ibr-exact" || o.method == "ibr-pseed";
  const bool randomized =
      o.method == "ibr-pseed" || o.method == "kmeans" || o.method == "fcm" ||
      o.method == "em" || o.method == "random";
  if (randomized && !o.have_seed) throw UsageError("--seed is required for " + o.method);
  if (is_ibr && o.sizes_str.empty()) throw UsageError("--sizes is required for " + o.method);
  if (is_ibr && o.model.empty()) throw UsageError("--model is required for " + o.method);

  const rlpp::PointSet points = rlpp::io::read_points_csv(o.input);

  rlpp::ClusterResult result;
  if (is_ibr) {
    const auto sizes = parse_sizes(o.sizes_str);
    const auto spec = rlpp::io::read_model_spec(o.model);
    if (spec.model.dim() != points.dim())
      throw UsageError("model dimension " + std::to_string(spec.model.dim()) +
                       " does not match data dimension " + std::to_string(points.dim()));
    const auto prior = rlpp::LabelPrior::fixed_sizes(sizes);
    if (o.method == "ibr-exact") {
      result = rlpp::bayes_partition(points, prior, spec.model);
    } else {
      rlpp::PseedConfig pc;
      pc.seed = o.seed;
      pc.subset_size = std::min(10, points.size());
      const auto& model = spec.model;
      result = rlpp::pseed_fast(
          points, prior,
          [&model](const rlpp::PointSet& s, const rlpp::LabelFunction& lf) {
            return rlpp::log_label_weight(s, lf, model);
          },
          pc);
    }
  } else {
    rlpp::BaselineConfig bc;
    if (!o.sizes_str.empty()) {
      bc.random_sizes = parse_sizes(o.sizes_str);
      bc.k = static_cast<int>(bc.random_sizes.size());
    } else {
      bc.k = o.k;
    }
    bc.seed = o.seed;
    if (o.method == "kmeans") bc.method = rlpp::BaselineMethod::KMeans;
    else if (o.method == "fcm") bc.method = rlpp::BaselineMethod::FuzzyCMeans;
    else if (o.method == "hier-s") bc.method = rlpp::BaselineMethod::HierSingle;
    else if (o.method == "hier-a") bc.method = rlpp::BaselineMethod::HierAverage;
    else if (o.method == "hier-c") bc.method = rlpp::BaselineMethod::HierComplete;
    else if (o.method == "em") bc.method = rlpp::BaselineMethod::EmGmm;
    else if (o.method == "random") bc.method = rlpp::BaselineMethod::Random;
    else throw UsageError("unknown method: " + o.method);
    result = rlpp::run_baseline(points, bc);
  }

  std::ostringstream os;
  os << result.partition.to_line() << '\n'
     << rlpp::io::partition_to_structured(result.partition) << '\n';
  if (!o.output.empty()) write_text(o.output, os.str());
  std::cout << os.str() << "method " << result.method << "\nscore " << result.score
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian robust clustering over random labeled point processes"};
  app.require_subcommand(1);

  // cluster
  ClusterOpts cl;
  auto* cluster = app.add_subcommand("cluster", "Cluster a CSV point set");
  cluster->add_option("--input", cl.input, "points CSV (n rows x d columns)")->required();
  cluster->add_option("--model", cl.model, "model spec JSON (required for ibr-*)");
  cluster->add_option("--method", cl.method,
                      "ibr-exact|ibr-pseed|kmeans|fcm|hier-s|hier-a|hier-c|em|random");
  cluster->add_option("--sizes", cl.sizes_str, "cluster sizes, e.g. 5,5");
  cluster->add_option("--k", cl.k, "cluster count for baselines without --sizes");
  auto* seed_opt = cluster->add_option("--seed", cl.seed, "RNG seed");
  cluster->add_option("--output", cl.output, "partition output file");

  // cost
  std::string cost_p, cost_q;
  int cost_l = 2;
  auto* cost = app.add_subcommand("cost", "Natural cost between two partition files");
  cost->add_option("--p", cost_p, "first partition file (label line)")->required();
  cost->add_option("--q", cost_q, "second partition file")->required();
  cost->add_option("--labels", cost_l, "label count l")->required();

  // granulometry
  std::string g_image, g_se = "vertical", g_out;
  int g_tmax = 64;
  auto* gran = app.add_subcommand("granulometry", "Opening sweep of a PBM image");
  gran->add_option("--image", g_image, "plain PBM (P1) input")->required();
  gran->add_option("--se", g_se, "vertical|horizontal");
  gran->add_option("--tmax", g_tmax, "maximum structuring-element index t");
  gran->add_option("--out", g_out, "sweep CSV output (t,omega,phi)")->required();

  // render
  std::string r_scene, r_out;
  auto* render = app.add_subcommand("render", "Rasterize a scene file to PBM");
  render->add_option("--scene", r_scene, "scene text file")->required();
  render->add_option("--out", r_out, "PBM output")->required();

  // sample
  std::string s_kind = "gaussian", s_model, s_sizes, s_out, s_labels_out, s_render;
  std::uint64_t s_seed = 0;
  int s_grains = 1000, s_width = 550, s_height = 550;
  double s_b1 = 0.5, s_alpha_tri = 2.0, s_alpha_rod = 2.0, s_beta = 2.0, s_minr = 8.0;
  auto* sample = app.add_subcommand("sample", "Draw a point set or a grain scene");
  sample->add_option("--kind", s_kind, "gaussian|scene");
  sample->add_option("--model", s_model, "model spec JSON (gaussian)");
  sample->add_option("--sizes", s_sizes, "cluster sizes (gaussian)");
  sample->add_option("--seed", s_seed, "RNG seed")->required();
  sample->add_option("--output", s_out, "points CSV / scene file")->required();
  sample->add_option("--labels-out", s_labels_out, "label line output (gaussian)");
  sample->add_option("--render", s_render, "also rasterize to this PBM (scene)");
  sample->add_option("--grains", s_grains, "grain count (scene)");
  sample->add_option("--b1", s_b1, "triangle proportion (scene)");
  sample->add_option("--alpha-tri", s_alpha_tri, "gamma shape, triangles (scene)");
  sample->add_option("--alpha-rod", s_alpha_rod, "gamma shape, rods (scene)");
  sample->add_option("--beta", s_beta, "gamma scale in pixels (scene)");
  sample->add_option("--width", s_width, "image width (scene)");
  sample->add_option("--height", s_height, "image height (scene)");
  sample->add_option("--min-radius", s_minr, "radius floor in pixels (scene)");

  // gaussian-exp
  rlpp::exp::GaussianExpConfig gx;
  std::string gx_methods, gx_out, gx_summary, gx_state;
  int gx_n = 10;
  bool gx_have_n = false;
  auto* gexp = app.add_subcommand("gaussian-exp", "Gaussian-uncertainty Monte Carlo");
  gexp->add_option("--dims", gx.d, "point dimension d");
  auto* gx_n_opt = gexp->add_option("--n", gx_n, "total points (split n/2, n/2)");
  gexp->add_option("--n1", gx.n1, "cluster-1 size");
  gexp->add_option("--n2", gx.n2, "cluster-2 size");
  gexp->add_option("--reps", gx.reps, "states of nature");
  gexp->add_option("--methods", gx_methods, "comma-separated method ids");
  gexp->add_option("--seed", gx.seed, "master seed")->required();
  gexp->add_option("--threads", gx.threads, "worker threads");
  gexp->add_flag("--timing", gx.with_timing, "record wall-clock runtimes");
  gexp->add_option("--out", gx_out, "per-rep results CSV")->required();
  gexp->add_option("--summary", gx_summary, "per-method summary CSV");
  gexp->add_option("--per-state", gx_state, "per-state summary CSV");

  // granular-exp
  rlpp::exp::GranularExpConfig rx;
  std::string rx_methods, rx_out, rx_summary, rx_state;
  auto* rexp = app.add_subcommand("granular-exp", "Granular-imaging Monte Carlo");
  rexp->add_option("--theta-states", rx.theta_states, "theta grid size");
  rexp->add_option("--theta-lo", rx.theta_lo, "theta grid lower end");
  rexp->add_option("--theta-hi", rx.theta_hi, "theta grid upper end");
  rexp->add_option("--rho-count", rx.rho_count, "rho grid size");
  rexp->add_option("--rho-lo", rx.rho_lo, "rho grid lower end");
  rexp->add_option("--rho-hi", rx.rho_hi, "rho grid upper end");
  rexp->add_option("--reps", rx.reps, "image sets per theta state");
  rexp->add_option("--n1", rx.n1, "class-1 image count");
  rexp->add_option("--n2", rx.n2, "class-2 image count");
  rexp->add_option("--grains", rx.model.n_grains, "grains per image");
  rexp->add_flag("--rendered", rx.rendered, "rasterized pipeline instead of analytic");
  rexp->add_option("--methods", rx_methods, "comma-separated method ids");
  rexp->add_option("--seed", rx.seed, "master seed")->required();
  rexp->add_option("--threads", rx.threads, "worker threads");
  rexp->add_flag("--timing", rx.with_timing, "record wall-clock runtimes");
  rexp->add_option("--out", rx_out, "per-rep results CSV")->required();
  rexp->add_option("--summary", rx_summary, "per-method summary CSV");
  rexp->add_option("--per-state", rx_state, "per-state summary CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*cluster) {
      cl.have_seed = seed_opt->count() > 0;
      return cmd_cluster(cl);
    }
    if (*cost) {
      const auto p = rlpp::io::read_partition_file(cost_p);
      const auto q = rlpp::io::read_partition_file(cost_q);
      std::cout << rlpp::natural_cost(p, q, cost_l) << '\n';
      return 0;
    }
    if (*gran) {
      if (g_se != "vertical" && g_se != "horizontal")
        throw UsageError("--se must be vertical or horizontal");
      const auto img = rlpp::io::read_pbm(g_image);
      const auto dir = g_se == "vertical" ? rlpp::gran::Direction::Vertical
                                          : rlpp::gran::Direction::Horizontal;
      const auto omega = rlpp::gran::opening_area_sweep(img, dir, g_tmax);
      std::ostringstream os;
      os << "t,omega,phi\n";
      const double total = static_cast<double>(omega[0]);
      for (std::size_t t = 0; t < omega.size(); ++t) {
        const double phi = total > 0 ? 1.0 - omega[t] / total : 0.0;
        os << t << ',' << omega[t] << ',' << phi << '\n';
      }
      write_text(g_out, os.str());
      return 0;
    }
    if (*render) {
      rlpp::io::write_pbm(r_out, rlpp::gran::render_scene(read_scene(r_scene)));
      return 0;
    }
    if (*sample) {
      if (s_kind == "gaussian") {
        if (s_model.empty() || s_sizes.empty())
          throw UsageError("--model and --sizes are required for --kind gaussian");
        const auto spec = rlpp::io::read_model_spec(s_model);
        const auto sizes = parse_sizes(s_sizes);
        const auto draw = rlpp::sample_niw_rlpp(spec.model, sizes, s_seed);
        rlpp::io::write_points_csv(s_out, draw.points);
        if (!s_labels_out.empty()) {
          std::ostringstream os;
          for (std::size_t i = 0; i < draw.labels.labels.size(); ++i)
            os << (i ? " " : "") << draw.labels.labels[i];
          os << '\n';
          write_text(s_labels_out, os.str());
        }
      } else if (s_kind == "scene") {
        rlpp::gran::SizingModel sizing;
        sizing.alpha_triangle = s_alpha_tri;
        sizing.alpha_rod = s_alpha_rod;
        sizing.beta = s_beta;
        const auto scene = rlpp::gran::sample_scene(s_grains, s_b1, sizing, s_width,
                                                    s_height, s_minr, s_seed);
        write_scene(s_out, scene);
        if (!s_render.empty())
          rlpp::io::write_pbm(s_render, rlpp::gran::render_scene(scene));
      } else {
        throw UsageError("--kind must be gaussian or scene");
      }
      return 0;
    }
    if (*gexp) {
      if (gx_n_opt->count() > 0) {
        gx_have_n = true;
        gx.n1 = gx_n / 2;
        gx.n2 = gx_n - gx.n1;
      }
      (void)gx_have_n;
      if (!gx_methods.empty()) gx.methods = parse_methods(gx_methods);
      const auto result = rlpp::exp::run_gaussian_experiment(gx);
      write_text(gx_out, rlpp::exp::to_csv(result));
      if (!gx_summary.empty()) write_text(gx_summary, rlpp::exp::summary_csv(result));
      if (!gx_state.empty()) write_text(gx_state, rlpp::exp::per_state_csv(result));
      return 0;
    }
    if (*rexp) {
      if (!rx_methods.empty()) rx.methods = parse_methods(rx_methods);
      const auto result = rlpp::exp::run_granular_experiment(rx);
      write_text(rx_out, rlpp::exp::to_csv(result));
      if (!rx_summary.empty()) write_text(rx_summary, rlpp::exp::summary_csv(result));
      if (!rx_state.empty()) write_text(rx_state, rlpp::exp::per_state_csv(result));
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
