#include "rlpp/sampling.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace rlpp {

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(master) ^ a) ^ b);
}

Eigen::MatrixXd sample_wishart(std::mt19937_64& rng, double dof,
                               const Eigen::MatrixXd& scale) {
  const int d = static_cast<int>(scale.rows());
  if (dof <= d - 1) throw std::invalid_argument("sample_wishart: dof must be > d-1");
  Eigen::LLT<Eigen::MatrixXd> llt(scale);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("sample_wishart: scale not positive-definite");
  const Eigen::MatrixXd l = llt.matrixL();

  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    std::chi_squared_distribution<double> chi2(dof - i);
    a(i, i) = std::sqrt(chi2(rng));
    for (int j = 0; j < i; ++j) a(i, j) = normal(rng);
  }
  const Eigen::MatrixXd la = l * a;
  return la * la.transpose();
}

Eigen::MatrixXd sample_inverse_wishart(std::mt19937_64& rng, double dof,
                                       const Eigen::MatrixXd& psi) {
  const Eigen::MatrixXd w = sample_wishart(rng, dof, psi.inverse());
  return w.inverse();
}

Eigen::VectorXd sample_gaussian(std::mt19937_64& rng, const Eigen::VectorXd& mean,
                                const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("sample_gaussian: covariance not positive-definite");
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(mean.size());
  for (int i = 0; i < z.size(); ++i) z(i) = normal(rng);
  return mean + llt.matrixL() * z;
}

std::vector<int> sample_size_valid_labels(std::mt19937_64& rng,
                                          const std::vector<int>& sizes) {
  const int l = static_cast<int>(sizes.size());
  std::vector<int> perm(l);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);

  std::vector<int> labels;
  for (int y = 0; y < l; ++y)
    labels.insert(labels.end(), sizes[perm[y]], y + 1);
  std::shuffle(labels.begin(), labels.end(), rng);
  return labels;
}

GaussianDraw sample_gaussian_rlpp(const std::vector<Eigen::VectorXd>& means,
                                  const std::vector<Eigen::MatrixXd>& covs,
                                  const std::vector<int>& sizes, std::uint64_t seed) {
  if (means.size() != covs.size() || means.size() != sizes.size())
    throw std::invalid_argument("sample_gaussian_rlpp: per-label inputs mismatch");
  const int n = std::accumulate(sizes.begin(), sizes.end(), 0);
  const int d = static_cast<int>(means[0].size());

  std::mt19937_64 rng(seed);
  GaussianDraw draw;
  draw.means = means;
  draw.covs = covs;
  draw.labels.labels = sample_size_valid_labels(rng, sizes);
  draw.labels.label_count = static_cast<int>(sizes.size());
  draw.points.points.resize(n, d);
  for (int i = 0; i < n; ++i) {
    const int y = draw.labels.labels[i];
    draw.points.points.row(i) = sample_gaussian(rng, means[y - 1], covs[y - 1]);
  }
  return draw;
}

GaussianDraw sample_niw_rlpp(const NiwModel& model, const std::vector<int>& sizes,
                             std::uint64_t seed) {
  model.validate();
  if (static_cast<int>(sizes.size()) != model.label_count())
    throw std::invalid_argument("sample_niw_rlpp: sizes/labels mismatch");

  std::mt19937_64 rng(seed);
  std::vector<Eigen::MatrixXd> covs;
  std::vector<Eigen::VectorXd> means;
  for (const auto& hp : model.labels) {
    Eigen::MatrixXd sigma = sample_inverse_wishart(rng, hp.kappa, hp.psi);
    means.push_back(sample_gaussian(rng, hp.m, sigma / hp.nu));
    covs.push_back(std::move(sigma));
  }
  return sample_gaussian_rlpp(means, covs, sizes, rng());
}

}  // namespace rlpp
