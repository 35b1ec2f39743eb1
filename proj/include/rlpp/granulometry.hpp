// T-grain image synthesis, morphological openings and pattern spectra,
// exact and asymptotic granulometric moment features, and the granular
// robust-clustering posterior.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rlpp/niw.hpp"

namespace rlpp::gran {

enum class Primitive { Triangle, Rod };
enum class Direction { Vertical, Horizontal };

// One grain: unit-area primitive scaled by `radius` (foreground area is
// radius^2 pixels) centered at (cx, cy) in pixel coordinates.
struct Grain {
  Primitive primitive = Primitive::Triangle;
  double radius = 1.0;
  double cx = 0.0;
  double cy = 0.0;
};

struct GrainScene {
  std::vector<Grain> grains;
  int width = 0;
  int height = 0;
};

struct BinaryImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, 0/1

  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  void set(int x, int y, std::uint8_t v) { pixels[static_cast<std::size_t>(y) * width + x] = v; }
  std::int64_t area() const;
};

// The eight closed-form constants mu^(k)(A_i, B_j) for the unit-area
// horizontal-base triangle A1 and 5:1 vertical rod A2 under vertical (B1)
// and horizontal (B2) linear structuring elements.
struct PrimitiveConstants {
  // [primitive i-1][structuring element j-1][moment k-1]
  std::array<std::array<std::array<double, 2>, 2>, 2> mu;
};
PrimitiveConstants primitive_constants();

// The fixed transform z = M x built from the primitive constants.
Eigen::Matrix4d moment_matrix();

// Rasterizes the scene (center-of-pixel inclusion); throws if grains go out
// of bounds or overlap after rasterization.
BinaryImage render_scene(const GrainScene& scene);

// Gamma sizing law for grain radii: radius ~ gamma(alpha_i, beta) per
// primitive; gamma_ik = Gamma(alpha_i + k) / Gamma(alpha_i).
struct SizingModel {
  double alpha_triangle = 2.0;
  double alpha_rod = 2.0;
  double beta = 1.0;
};
double gamma_moment_ratio(double alpha, double k);

// Grain counts are rounded proportions of n_grains; radii are gamma draws
// truncated below at min_radius; centers placed by rejection sampling until
// grains are pairwise disjoint with a one-pixel gap (at most 10^4 attempts
// per grain).
GrainScene sample_scene(int n_grains, double b1, const SizingModel& sizing, int width,
                        int height, double min_radius, std::uint64_t seed);

// Omega(t) = foreground area of the opening by a linear structuring element
// of length t+1 pixels, t = 0..t_max. Non-increasing, Omega(0) = area.
std::vector<std::int64_t> opening_area_sweep(const BinaryImage& img, Direction dir,
                                             int t_max);

// First and second moments of the pattern spectrum
// Phi(t) = 1 - Omega(t)/Omega(0), mu^(k) = sum_t t^k [Phi(t+1) - Phi(t)].
// Requires Omega(0) > 0, Omega(t_max) = 0 and a non-increasing sweep.
std::array<double, 2> pattern_spectrum_moments(const std::vector<std::int64_t>& omega);

struct FeatureVector {
  Eigen::Vector4d x;  // (x11, x21, x12, x22)
  Eigen::Vector4d z;  // (mu1(I,B1), mu1(I,B2), mu2(I,B1), mu2(I,B2)) = M x
};

// Eq-level features from the radius lists; bypasses rasterization.
FeatureVector exact_features_from_radii(const std::vector<double>& triangle_radii,
                                        const std::vector<double>& rod_radii);

// Measured z from opening sweeps of a rendered image, and x = M^{-1} z.
FeatureVector measured_features(const BinaryImage& img);

struct AsymptoticLaw {
  Eigen::Vector4d mean;
  Eigen::Matrix4d cov;
};

// Asymptotic Gaussian law of x for N grains with triangle proportion b1,
// gamma shapes (alpha1 triangles, alpha2 rods) and shared scale beta.
AsymptoticLaw asymptotic_law(double b1, double b2, double alpha1, double alpha2,
                             double beta, double n_grains);

double gaussian_log_density(const Eigen::Vector4d& x, const AsymptoticLaw& law);

// Experiment model: class y determines the triangle proportion map
// (class 1: b1 = rho, class 2: b1 = 1 - rho), the per-class gamma shapes,
// and the scale pair (beta1 = theta, beta2 = beta_sum - theta).
struct GranularModelConfig {
  double n_grains = 1000;
  double alpha_triangle_c1 = 1.95;
  double alpha_triangle_c2 = 1.97;
  double alpha_rod_c1 = 1.97;
  double alpha_rod_c2 = 1.95;
  double beta_sum = 3.75;

  AsymptoticLaw law_for(int class_y, double rho, double theta) const;
};

// Sum over the class-y feature vectors of the asymptotic Gaussian log
// density; 0 for an empty set.
double granular_log_likelihood(const std::vector<Eigen::Vector4d>& class_features,
                               int class_y, double rho, double theta,
                               const GranularModelConfig& cfg);

struct Grid {
  std::vector<double> values;
  std::vector<double> weights;  // sum to 1

  static Grid uniform(double lo, double hi, int count);
};

// Discretized robust posterior over image label functions: per label
// function, logsumexp over the (rho, theta) grid of the class likelihoods
// weighted by f(rho) pi(theta). Gaussian tables are precomputed once.
class GranularLikelihood {
 public:
  GranularLikelihood(GranularModelConfig cfg, Grid rho_grid, Grid theta_grid);

  // Feature vectors as rows of a PointSet (d = 4).
  double log_likelihood(const PointSet& features, const LabelFunction& phi) const;
  LogLikelihoodFn fn() const;

  // Fast enumerated posterior reusing per-image density caches.
  LabelPosterior posterior(const PointSet& features, const LabelPrior& prior) const;

  const GranularModelConfig& config() const { return cfg_; }

 private:
  struct Gauss {
    Eigen::Vector4d mean;
    Eigen::Matrix4d cov_inv;
    double log_norm = 0.0;
  };

  GranularModelConfig cfg_;
  Grid rho_grid_, theta_grid_;
  std::vector<std::array<Gauss, 2>> table_;  // per (theta, rho) grid pair
  std::vector<double> log_prior_;            // log f(rho) + log pi(theta)
};

}  // namespace rlpp::gran
