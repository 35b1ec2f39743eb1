// Seeded sampling for Gaussian RLPPs: Wishart/inverse-Wishart draws via the
// Bartlett construction, labeled point-set generation, substream seeding.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "rlpp/effective.hpp"
#include "rlpp/niw.hpp"

namespace rlpp {

// splitmix64-style mixing for deterministic substream seeds.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

Eigen::MatrixXd sample_wishart(std::mt19937_64& rng, double dof,
                               const Eigen::MatrixXd& scale);
Eigen::MatrixXd sample_inverse_wishart(std::mt19937_64& rng, double dof,
                                       const Eigen::MatrixXd& psi);

Eigen::VectorXd sample_gaussian(std::mt19937_64& rng, const Eigen::VectorXd& mean,
                                const Eigen::MatrixXd& cov);

// Uniform draw over the support of the fixed-sizes prior: the size multiset
// is permuted across labels, then point positions are shuffled.
std::vector<int> sample_size_valid_labels(std::mt19937_64& rng,
                                          const std::vector<int>& sizes);

struct GaussianDraw {
  PointSet points;
  LabelFunction labels;
  std::vector<Eigen::VectorXd> means;  // realized rho
  std::vector<Eigen::MatrixXd> covs;   // realized theta (or NIW covariance draw)
};

// Draws rho ~ NIW (Sigma_y ~ IW(kappa, Psi), mu_y ~ N(m, Sigma/nu)), then
// points i.i.d. per label. Labels: the size multiset is permuted uniformly
// over labels, then point positions are shuffled. Fully seed-determined.
GaussianDraw sample_niw_rlpp(const NiwModel& model, const std::vector<int>& sizes,
                             std::uint64_t seed);

// Same labeling convention with fixed per-label means and covariances.
GaussianDraw sample_gaussian_rlpp(const std::vector<Eigen::VectorXd>& means,
                                  const std::vector<Eigen::MatrixXd>& covs,
                                  const std::vector<int>& sizes, std::uint64_t seed);

}  // namespace rlpp
