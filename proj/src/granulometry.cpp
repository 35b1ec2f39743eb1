#include "rlpp/granulometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "rlpp/sampling.hpp"

namespace rlpp::gran {

std::int64_t BinaryImage::area() const {
  std::int64_t a = 0;
  for (auto p : pixels) a += p;
  return a;
}

PrimitiveConstants primitive_constants() {
  PrimitiveConstants c;
  // triangle, vertical / horizontal
  c.mu[0][0][0] = 2.0 * std::pow(3.0, -0.75);
  c.mu[0][0][1] = std::sqrt(3.0) / 2.0;
  c.mu[0][1][0] = 4.0 * std::pow(3.0, -1.25);
  c.mu[0][1][1] = 2.0 / std::sqrt(3.0);
  // rod, vertical / horizontal
  c.mu[1][0][0] = std::sqrt(5.0);
  c.mu[1][0][1] = 5.0;
  c.mu[1][1][0] = 1.0 / std::sqrt(5.0);
  c.mu[1][1][1] = 0.2;
  return c;
}

Eigen::Matrix4d moment_matrix() {
  const auto c = primitive_constants();
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m(0, 0) = c.mu[0][0][0];
  m(0, 1) = c.mu[1][0][0];
  m(1, 0) = c.mu[0][1][0];
  m(1, 1) = c.mu[1][1][0];
  m(2, 2) = c.mu[0][0][1];
  m(2, 3) = c.mu[1][0][1];
  m(3, 2) = c.mu[0][1][1];
  m(3, 3) = c.mu[1][1][1];
  return m;
}

namespace {

// Bounding half-extents of a grain in pixels.
void grain_extents(const Grain& g, double& hx, double& hy) {
  if (g.primitive == Primitive::Triangle) {
    const double side = 2.0 * g.radius * std::pow(3.0, -0.25);
    const double height = g.radius * std::pow(3.0, 0.25);
    hx = side / 2.0;
    hy = height / 2.0;
  } else {
    const double base = g.radius / std::sqrt(5.0);
    const double height = g.radius * std::sqrt(5.0);
    hx = base / 2.0;
    hy = height / 2.0;
  }
}

bool grain_contains(const Grain& g, double px, double py) {
  double hx, hy;
  grain_extents(g, hx, hy);
  const double dx = px - g.cx;
  const double dy = py - g.cy;
  if (g.primitive == Primitive::Rod)
    return std::abs(dx) <= hx && std::abs(dy) <= hy;
  // Triangle: apex at the top (smaller y), horizontal base at the bottom.
  if (dy < -hy || dy > hy) return false;
  const double depth = dy + hy;            // distance from the apex, in [0, 2 hy]
  const double halfwidth = hx * depth / (2.0 * hy);
  return std::abs(dx) <= halfwidth;
}

void rasterize(const Grain& g, const std::function<void(int, int)>& emit) {
  double hx, hy;
  grain_extents(g, hx, hy);
  const int x0 = static_cast<int>(std::floor(g.cx - hx)) - 1;
  const int x1 = static_cast<int>(std::ceil(g.cx + hx)) + 1;
  const int y0 = static_cast<int>(std::floor(g.cy - hy)) - 1;
  const int y1 = static_cast<int>(std::ceil(g.cy + hy)) + 1;
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x)
      if (grain_contains(g, x + 0.5, y + 0.5)) emit(x, y);
}

}  // namespace

BinaryImage render_scene(const GrainScene& scene) {
  if (scene.width <= 0 || scene.height <= 0)
    throw std::invalid_argument("render_scene: image dimensions must be positive");
  BinaryImage img;
  img.width = scene.width;
  img.height = scene.height;
  img.pixels.assign(static_cast<std::size_t>(scene.width) * scene.height, 0);
  for (const auto& g : scene.grains) {
    rasterize(g, [&](int x, int y) {
      if (x < 0 || x >= img.width || y < 0 || y >= img.height)
        throw std::invalid_argument("render_scene: grain out of image bounds");
      if (img.at(x, y)) throw std::invalid_argument("render_scene: grains overlap");
      img.set(x, y, 1);
    });
  }
  return img;
}

double gamma_moment_ratio(double alpha, double k) {
  if (alpha <= 0.0) throw std::invalid_argument("gamma_moment_ratio: alpha > 0");
  return std::exp(std::lgamma(alpha + k) - std::lgamma(alpha));
}

GrainScene sample_scene(int n_grains, double b1, const SizingModel& sizing, int width,
                        int height, double min_radius, std::uint64_t seed) {
  if (b1 < 0.0 || b1 > 1.0) throw std::invalid_argument("sample_scene: b1 in [0,1]");
  const int n1 = static_cast<int>(std::lround(b1 * n_grains));
  const int n2 = n_grains - n1;

  std::mt19937_64 rng(seed);
  GrainScene scene;
  scene.width = width;
  scene.height = height;

  // Scratch raster of already-placed grains, dilated by one pixel so that
  // accepted grains never touch.
  BinaryImage occ;
  occ.width = width;
  occ.height = height;
  occ.pixels.assign(static_cast<std::size_t>(width) * height, 0);

  auto place = [&](Primitive prim, double alpha) {
    std::gamma_distribution<double> gamma(alpha, sizing.beta);
    Grain g;
    g.primitive = prim;
    do {
      g.radius = gamma(rng);
    } while (g.radius < min_radius);

    double hx, hy;
    grain_extents(g, hx, hy);
    if (2 * hx + 2 >= width || 2 * hy + 2 >= height)
      throw std::runtime_error("sample_scene: grain larger than image; enlarge image");
    std::uniform_real_distribution<double> ux(hx + 1.0, width - hx - 1.0);
    std::uniform_real_distribution<double> uy(hy + 1.0, height - hy - 1.0);

    for (int attempt = 0; attempt < 10000; ++attempt) {
      g.cx = ux(rng);
      g.cy = uy(rng);
      bool clash = false;
      rasterize(g, [&](int x, int y) {
        if (clash) return;
        for (int dy = -1; dy <= 1 && !clash; ++dy)
          for (int dx = -1; dx <= 1 && !clash; ++dx) {
            const int xx = x + dx, yy = y + dy;
            if (xx >= 0 && xx < width && yy >= 0 && yy < height && occ.at(xx, yy))
              clash = true;
          }
      });
      if (!clash) {
        rasterize(g, [&](int x, int y) { occ.set(x, y, 1); });
        scene.grains.push_back(g);
        return;
      }
    }
    throw std::runtime_error("sample_scene: packing failed; enlarge the image");
  };

  for (int i = 0; i < n1; ++i) place(Primitive::Triangle, sizing.alpha_triangle);
  for (int i = 0; i < n2; ++i) place(Primitive::Rod, sizing.alpha_rod);
  return scene;
}

std::vector<std::int64_t> opening_area_sweep(const BinaryImage& img, Direction dir,
                                             int t_max) {
  if (t_max < 1) throw std::invalid_argument("opening_area_sweep: t_max >= 1");

  // Opening by a 1-D line keeps exactly the runs of length >= SE length, so
  // the whole sweep reduces to a run-length histogram per column/row.
  std::vector<std::int64_t> run_pixels(t_max + 2, 0);  // run_pixels[L] = L * (#runs of length L), L capped
  auto note_run = [&](int len) {
    if (len <= 0) return;
    const int capped = std::min(len, t_max + 1);
    run_pixels[capped] += len;
  };

  if (dir == Direction::Vertical) {
    for (int x = 0; x < img.width; ++x) {
      int run = 0;
      for (int y = 0; y < img.height; ++y) {
        if (img.at(x, y)) {
          ++run;
        } else {
          note_run(run);
          run = 0;
        }
      }
      note_run(run);
    }
  } else {
    for (int y = 0; y < img.height; ++y) {
      int run = 0;
      for (int x = 0; x < img.width; ++x) {
        if (img.at(x, y)) {
          ++run;
        } else {
          note_run(run);
          run = 0;
        }
      }
      note_run(run);
    }
  }

  std::vector<std::int64_t> omega(t_max + 1, 0);
  std::int64_t acc = 0;
  for (int t = t_max; t >= 0; --t) {
    acc += run_pixels[t + 1];
    omega[t] = acc;
  }
  return omega;
}

std::array<double, 2> pattern_spectrum_moments(const std::vector<std::int64_t>& omega) {
  if (omega.empty() || omega[0] <= 0)
    throw std::invalid_argument("pattern_spectrum_moments: Omega(0) must be > 0");
  if (omega.back() != 0)
    throw std::invalid_argument("pattern_spectrum_moments: Omega(t_max) must be 0");
  for (std::size_t t = 1; t < omega.size(); ++t)
    if (omega[t] > omega[t - 1])
      throw std::invalid_argument("pattern_spectrum_moments: sweep not non-increasing");

  const double total = static_cast<double>(omega[0]);
  double mu1 = 0.0, mu2 = 0.0;
  for (std::size_t t = 0; t + 1 < omega.size(); ++t) {
    const double mass =
        (static_cast<double>(omega[t]) - static_cast<double>(omega[t + 1])) / total;
    const double td = static_cast<double>(t);
    mu1 += td * mass;
    mu2 += td * td * mass;
  }
  return {mu1, mu2};
}

FeatureVector exact_features_from_radii(const std::vector<double>& triangle_radii,
                                        const std::vector<double>& rod_radii) {
  if (triangle_radii.empty() && rod_radii.empty())
    throw std::invalid_argument("exact_features_from_radii: no grains");
  double denom = 0.0;
  double t3 = 0.0, t4 = 0.0, r3 = 0.0, r4 = 0.0;
  for (double r : triangle_radii) {
    denom += r * r;
    t3 += r * r * r;
    t4 += r * r * r * r;
  }
  for (double r : rod_radii) {
    denom += r * r;
    r3 += r * r * r;
    r4 += r * r * r * r;
  }
  FeatureVector f;
  f.x << t3 / denom, r3 / denom, t4 / denom, r4 / denom;
  f.z = moment_matrix() * f.x;
  return f;
}

FeatureVector measured_features(const BinaryImage& img) {
  const int t_max = std::max(img.width, img.height);
  auto mv = pattern_spectrum_moments(opening_area_sweep(img, Direction::Vertical, t_max));
  auto mh = pattern_spectrum_moments(opening_area_sweep(img, Direction::Horizontal, t_max));
  // The sweep's jump at index t corresponds to a structuring element of
  // length t+1 pixels; shift the moments back to length units so a run of
  // w pixels measures as w, not w-1.
  for (auto* m : {&mv, &mh}) {
    (*m)[1] += 2.0 * (*m)[0] + 1.0;
    (*m)[0] += 1.0;
  }
  FeatureVector f;
  f.z << mv[0], mh[0], mv[1], mh[1];
  f.x = moment_matrix().inverse() * f.z;
  return f;
}

AsymptoticLaw asymptotic_law(double b1, double b2, double alpha1, double alpha2,
                             double beta, double n_grains) {
  if (b1 < 0.0 || b2 < 0.0 || std::abs(b1 + b2 - 1.0) > 1e-12)
    throw std::invalid_argument("asymptotic_law: proportions must be >= 0 and sum to 1");
  if (n_grains < 1.0) throw std::invalid_argument("asymptotic_law: N >= 1");

  // gamma_{prim, order}; prim in {1, 2}
  auto g = [&](int prim, int order) {
    return gamma_moment_ratio(prim == 1 ? alpha1 : alpha2, static_cast<double>(order));
  };
  auto cc = [&](int i, int j, int k) { return g(k, i + j + 4) - g(k, i + 2) * g(k, j + 2); };
  auto bb = [&](int i, int j, int k, int l, int p) {
    return cc(0, 0, p) * g(k, i + 2) * g(l, j + 2) - g(p, 2) * g(k, i + 2) * cc(0, j, l) -
           g(p, 2) * cc(i, 0, k) * g(l, j + 2);
  };

  const double denom = b1 * g(1, 2) + b2 * g(2, 2);
  const double bprop[3] = {0.0, b1, b2};

  AsymptoticLaw law;
  law.mean << b1 * g(1, 3) * beta, b2 * g(2, 3) * beta, b1 * g(1, 4) * beta * beta,
      b2 * g(2, 4) * beta * beta;
  law.mean /= denom;

  law.cov.setZero();
  for (int i = 1; i <= 2; ++i) {
    for (int j = 1; j <= 2; ++j) {
      Eigen::Matrix2d a;
      for (int k = 1; k <= 2; ++k) {
        for (int l = 1; l <= 2; ++l) {
          double e = bprop[k] * bprop[l] *
                     (bprop[1] * bb(i, j, k, l, 1) + bprop[2] * bb(i, j, k, l, 2));
          if (k == l) e += bprop[k] * denom * denom * cc(i, j, k);
          a(k - 1, l - 1) = e;
        }
      }
      law.cov.block<2, 2>(2 * (i - 1), 2 * (j - 1)) =
          a * std::pow(beta, i + j) / (n_grains * std::pow(denom, 4));
    }
  }
  return law;
}

double gaussian_log_density(const Eigen::Vector4d& x, const AsymptoticLaw& law) {
  Eigen::LLT<Eigen::Matrix4d> llt(law.cov);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("gaussian_log_density: covariance not positive-definite");
  const double logdet =
      2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const Eigen::Vector4d dm = x - law.mean;
  return -0.5 * (4.0 * std::log(2.0 * std::numbers::pi) + logdet +
                 dm.dot(llt.solve(dm)));
}

AsymptoticLaw GranularModelConfig::law_for(int class_y, double rho, double theta) const {
  const double b1 = (class_y == 1) ? rho : 1.0 - rho;
  const double beta = (class_y == 1) ? theta : beta_sum - theta;
  const double a_tri = (class_y == 1) ? alpha_triangle_c1 : alpha_triangle_c2;
  const double a_rod = (class_y == 1) ? alpha_rod_c1 : alpha_rod_c2;
  return asymptotic_law(b1, 1.0 - b1, a_tri, a_rod, beta, n_grains);
}

double granular_log_likelihood(const std::vector<Eigen::Vector4d>& class_features,
                               int class_y, double rho, double theta,
                               const GranularModelConfig& cfg) {
  if (class_features.empty()) return 0.0;
  const AsymptoticLaw law = cfg.law_for(class_y, rho, theta);
  double total = 0.0;
  for (const auto& x : class_features) total += gaussian_log_density(x, law);
  return total;
}

Grid Grid::uniform(double lo, double hi, int count) {
  if (count < 1) throw std::invalid_argument("grid: count >= 1");
  Grid g;
  g.values.resize(count);
  g.weights.assign(count, 1.0 / count);
  for (int i = 0; i < count; ++i)
    g.values[i] = (count == 1) ? (lo + hi) / 2.0
                               : lo + (hi - lo) * i / static_cast<double>(count - 1);
  return g;
}

GranularLikelihood::GranularLikelihood(GranularModelConfig cfg, Grid rho_grid,
                                       Grid theta_grid)
    : cfg_(cfg), rho_grid_(std::move(rho_grid)), theta_grid_(std::move(theta_grid)) {
  table_.reserve(rho_grid_.values.size() * theta_grid_.values.size());
  for (std::size_t ti = 0; ti < theta_grid_.values.size(); ++ti) {
    for (std::size_t ri = 0; ri < rho_grid_.values.size(); ++ri) {
      std::array<Gauss, 2> pair;
      for (int y = 1; y <= 2; ++y) {
        const AsymptoticLaw law =
            cfg_.law_for(y, rho_grid_.values[ri], theta_grid_.values[ti]);
        Eigen::LLT<Eigen::Matrix4d> llt(law.cov);
        if (llt.info() != Eigen::Success)
          throw std::runtime_error("granular likelihood: covariance not positive-definite");
        Gauss& gs = pair[y - 1];
        gs.mean = law.mean;
        gs.cov_inv = llt.solve(Eigen::Matrix4d::Identity());
        const double logdet =
            2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
        gs.log_norm = -0.5 * (4.0 * std::log(2.0 * std::numbers::pi) + logdet);
      }
      table_.push_back(pair);
      log_prior_.push_back(std::log(theta_grid_.weights[ti]) +
                           std::log(rho_grid_.weights[ri]));
    }
  }
}

double GranularLikelihood::log_likelihood(const PointSet& features,
                                          const LabelFunction& phi) const {
  if (features.dim() != 4)
    throw std::invalid_argument("granular likelihood: features must be 4-dimensional");
  if (phi.size() != features.size())
    throw std::invalid_argument("granular likelihood: label length mismatch");

  std::vector<double> terms(table_.size());
  for (std::size_t gidx = 0; gidx < table_.size(); ++gidx) {
    double ll = log_prior_[gidx];
    for (int i = 0; i < features.size(); ++i) {
      const Gauss& gs = table_[gidx][phi.labels[i] - 1];
      const Eigen::Vector4d dm = features.points.row(i).transpose() - gs.mean;
      ll += gs.log_norm - 0.5 * dm.dot(gs.cov_inv * dm);
    }
    terms[gidx] = ll;
  }
  return log_sum_exp(terms);
}

LogLikelihoodFn GranularLikelihood::fn() const {
  return [this](const PointSet& s, const LabelFunction& lf) {
    return log_likelihood(s, lf);
  };
}

LabelPosterior GranularLikelihood::posterior(const PointSet& features,
                                             const LabelPrior& prior) const {
  if (features.dim() != 4)
    throw std::invalid_argument("granular likelihood: features must be 4-dimensional");
  const int n = features.size();
  const std::size_t g = table_.size();

  // Per-image, per-grid-point, per-class log densities, computed once.
  std::vector<double> lp(static_cast<std::size_t>(n) * g * 2);
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector4d x = features.points.row(i).transpose();
    for (std::size_t gidx = 0; gidx < g; ++gidx) {
      for (int y = 0; y < 2; ++y) {
        const Gauss& gs = table_[gidx][y];
        const Eigen::Vector4d dm = x - gs.mean;
        lp[(static_cast<std::size_t>(i) * g + gidx) * 2 + y] =
            gs.log_norm - 0.5 * dm.dot(gs.cov_inv * dm);
      }
    }
  }

  const int l = prior.label_count();
  auto supp = prior.support(n, l);
  LabelPosterior post;
  post.support.reserve(supp.size());
  post.log_weights.reserve(supp.size());
  std::vector<double> terms(g);
  for (const auto& [lf, pr] : supp) {
    for (std::size_t gidx = 0; gidx < g; ++gidx) {
      double ll = log_prior_[gidx];
      for (int i = 0; i < n; ++i)
        ll += lp[(static_cast<std::size_t>(i) * g + gidx) * 2 + (lf.labels[i] - 1)];
      terms[gidx] = ll;
    }
    post.support.push_back(lf);
    post.log_weights.push_back(std::log(pr) + log_sum_exp(terms));
  }
  const double z = log_sum_exp(post.log_weights);
  post.probs.resize(post.log_weights.size());
  for (std::size_t i = 0; i < post.probs.size(); ++i)
    post.probs[i] = std::exp(post.log_weights[i] - z);
  return post;
}

}  // namespace rlpp::gran
