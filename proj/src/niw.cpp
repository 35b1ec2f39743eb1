#include "rlpp/niw.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

namespace rlpp {

void PointSet::validate() const {
  if (points.rows() < 1) throw std::invalid_argument("point set: n >= 1 required");
  if (!points.allFinite()) throw std::invalid_argument("point set: non-finite coordinate");
}

void NiwModel::validate() const {
  if (labels.empty()) throw std::invalid_argument("niw model: no labels");
  const int d = dim();
  for (const auto& p : labels) {
    if (p.m.size() != d || p.psi.rows() != d || p.psi.cols() != d)
      throw std::invalid_argument("niw model: inconsistent dimensions");
    if (p.nu <= 0.0) throw std::invalid_argument("niw model: nu must be > 0");
    if (p.kappa <= d - 1) throw std::invalid_argument("niw model: kappa must be > d-1");
    if (!p.psi.isApprox(p.psi.transpose(), 1e-10))
      throw std::invalid_argument("niw model: Psi not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(p.psi);
    if (llt.info() != Eigen::Success)
      throw std::invalid_argument("niw model: Psi not positive-definite");
  }
}

NiwModel NiwModel::symmetric(int l, const Eigen::VectorXd& m, double nu, double kappa,
                             const Eigen::MatrixXd& psi) {
  NiwModel model;
  model.labels.assign(l, NiwLabelParams{m, nu, kappa, psi});
  model.validate();
  return model;
}

LabelPrior LabelPrior::fixed_sizes(std::vector<int> s) {
  LabelPrior p;
  p.kind = Kind::FixedSizesUniform;
  p.sizes = std::move(s);
  return p;
}

LabelPrior LabelPrior::explicit_table(std::vector<std::pair<LabelFunction, double>> t) {
  LabelPrior p;
  p.kind = Kind::ExplicitTable;
  p.table = std::move(t);
  double sum = 0.0;
  for (const auto& [lf, prob] : p.table) sum += prob;
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("label prior: table probabilities must sum to 1");
  return p;
}

int LabelPrior::label_count() const {
  if (kind == Kind::FixedSizesUniform) return static_cast<int>(sizes.size());
  int l = 0;
  for (const auto& [lf, prob] : table) l = std::max(l, lf.label_count);
  return l;
}

std::vector<std::pair<LabelFunction, double>> LabelPrior::support(int n, int l) const {
  if (kind == Kind::ExplicitTable) return table;
  auto lfs = enumerate_label_functions(n, l, sizes);
  if (lfs.empty()) throw std::invalid_argument("label prior: empty support");
  const double p = 1.0 / static_cast<double>(lfs.size());
  std::vector<std::pair<LabelFunction, double>> out;
  out.reserve(lfs.size());
  for (auto& lf : lfs) out.emplace_back(std::move(lf), p);
  return out;
}

double log_multivariate_gamma(int d, double a) {
  if (d < 1) throw std::invalid_argument("log_multivariate_gamma: d >= 1");
  if (a <= (d - 1) / 2.0)
    throw std::invalid_argument("log_multivariate_gamma: a > (d-1)/2 required");
  double out = d * (d - 1) / 4.0 * std::log(std::numbers::pi);
  for (int j = 1; j <= d; ++j) out += std::lgamma(a + (1.0 - j) / 2.0);
  return out;
}

ClusterStats cluster_stats(const Eigen::MatrixXd& subset) {
  ClusterStats st;
  st.count = static_cast<int>(subset.rows());
  if (st.count == 0) return st;
  st.mean = subset.colwise().mean();
  if (st.count >= 2) {
    Eigen::MatrixXd centered = subset.rowwise() - st.mean.transpose();
    st.cov = centered.transpose() * centered / static_cast<double>(st.count - 1);
  }
  return st;
}

namespace {

double log_det_spd(const Eigen::MatrixXd& a) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("log_det_spd: matrix not positive-definite");
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

}  // namespace

double log_label_weight(const PointSet& points, const LabelFunction& phi,
                        const NiwModel& model) {
  points.validate();
  phi.validate();
  if (phi.size() != points.size())
    throw std::invalid_argument("log_label_weight: label function length mismatch");
  if (phi.label_count > model.label_count())
    throw std::invalid_argument("log_label_weight: more labels than model provides");
  const int d = points.dim();
  if (model.dim() != d)
    throw std::invalid_argument("log_label_weight: model dimension mismatch");

  double total = 0.0;
  for (int y = 1; y <= phi.label_count; ++y) {
    const auto& hp = model.labels[y - 1];
    std::vector<int> idx;
    for (int i = 0; i < points.size(); ++i)
      if (phi.labels[i] == y) idx.push_back(i);
    const int ny = static_cast<int>(idx.size());

    Eigen::MatrixXd psi_star = Eigen::MatrixXd::Zero(d, d);
    if (ny >= 1) {
      Eigen::MatrixXd sub(ny, d);
      for (int i = 0; i < ny; ++i) sub.row(i) = points.points.row(idx[i]);
      const ClusterStats st = cluster_stats(sub);
      const Eigen::VectorXd dm = st.mean - hp.m;
      psi_star = hp.nu * ny / (hp.nu + ny) * dm * dm.transpose();
      if (ny >= 2) psi_star += (ny - 1) * st.cov;
    }

    const double a = (hp.kappa + ny) / 2.0;
    total += log_multivariate_gamma(d, a);
    total -= d / 2.0 * std::log(ny + hp.nu);
    total -= a * log_det_spd(hp.psi + psi_star);
  }
  return total;
}

double log_sum_exp(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("log_sum_exp: empty input");
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

LabelPosterior posterior_label_probs(const PointSet& points, const LabelPrior& prior,
                                     const LogLikelihoodFn& loglik) {
  const int l = prior.label_count();
  auto supp = prior.support(points.size(), l);
  if (supp.empty()) throw std::invalid_argument("posterior: empty prior support");

  LabelPosterior post;
  post.support.reserve(supp.size());
  post.log_weights.reserve(supp.size());
  for (const auto& [lf, p] : supp) {
    post.support.push_back(lf);
    post.log_weights.push_back(std::log(p) + loglik(points, lf));
  }
  const double z = log_sum_exp(post.log_weights);
  post.probs.resize(post.log_weights.size());
  for (std::size_t i = 0; i < post.probs.size(); ++i)
    post.probs[i] = std::exp(post.log_weights[i] - z);
  return post;
}

LabelPosterior posterior_label_probs(const PointSet& points, const LabelPrior& prior,
                                     const NiwModel& model) {
  return posterior_label_probs(
      points, prior, [&model](const PointSet& s, const LabelFunction& lf) {
        return log_label_weight(s, lf, model);
      });
}

std::vector<std::pair<Partition, double>> partition_probs(const LabelPosterior& post) {
  std::map<Partition, double> acc;
  for (std::size_t i = 0; i < post.support.size(); ++i)
    acc[induced_partition(post.support[i])] += post.probs[i];
  return {acc.begin(), acc.end()};
}

std::vector<std::pair<Partition, double>> partition_probs(const PointSet& points,
                                                          const LabelPrior& prior,
                                                          const NiwModel& model) {
  return partition_probs(posterior_label_probs(points, prior, model));
}

}  // namespace rlpp
