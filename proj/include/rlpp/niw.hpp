// Separable Gaussian RLPPs with normal-inverse-Wishart priors: marginal
// label-function weights, posterior label and partition probabilities.
#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rlpp/partition.hpp"

namespace rlpp {

// n points in d dimensions, one point per row.
struct PointSet {
  Eigen::MatrixXd points;

  int size() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }
  void validate() const;  // finite coordinates, n >= 1
};

// Per-label hyperparameters (m, nu, kappa, Psi) of the Gaussian RLPP.
struct NiwLabelParams {
  Eigen::VectorXd m;     // prior mean
  double nu = 1.0;       // mean-precision scale, > 0
  double kappa = 0.0;    // degrees of freedom, > d-1
  Eigen::MatrixXd psi;   // d x d SPD scale matrix
};

struct NiwModel {
  std::vector<NiwLabelParams> labels;

  int label_count() const { return static_cast<int>(labels.size()); }
  int dim() const { return labels.empty() ? 0 : static_cast<int>(labels[0].m.size()); }
  void validate() const;  // SPD checked by Cholesky factorization

  // Identical hyperparameters for every label.
  static NiwModel symmetric(int l, const Eigen::VectorXd& m, double nu, double kappa,
                            const Eigen::MatrixXd& psi);
};

// Prior P(Phi = phi) on label functions.
struct LabelPrior {
  enum class Kind { FixedSizesUniform, ExplicitTable };

  Kind kind = Kind::FixedSizesUniform;
  // FixedSizesUniform: support = label functions whose multiset of cluster
  // sizes equals `sizes`, uniform on that support.
  std::vector<int> sizes;
  std::vector<std::pair<LabelFunction, double>> table;

  static LabelPrior fixed_sizes(std::vector<int> s);
  static LabelPrior explicit_table(std::vector<std::pair<LabelFunction, double>> t);

  // Enumerated support with prior probabilities, deterministic order.
  // Guarded at n <= 15 for the fixed-sizes kind.
  std::vector<std::pair<LabelFunction, double>> support(int n, int l) const;
  int label_count() const;
};

// log Gamma_d(a) via the product formula; requires a > (d-1)/2.
double log_multivariate_gamma(int d, double a);

struct ClusterStats {
  int count = 0;
  Eigen::VectorXd mean;  // defined for count >= 1
  Eigen::MatrixXd cov;   // unbiased, defined for count >= 2
};

ClusterStats cluster_stats(const Eigen::MatrixXd& points_subset);

// Log of the per-label product in the NIW marginal: for each label y,
//   log Gamma_d((kappa+n_y)/2) - (d/2) log(n_y+nu)
//     - ((kappa+n_y)/2) log|Psi + Psi*_y|,
// with Psi*_y the posterior scale update (n_y >= 2 uses the sample
// covariance form, n_y = 1 the mean-only form, n_y = 0 gives Psi* = 0).
// Excludes P(Phi = phi) and the normalizer.
double log_label_weight(const PointSet& points, const LabelFunction& phi,
                        const NiwModel& model);

// Generic log-likelihood log f(S | phi) up to an additive constant.
using LogLikelihoodFn = std::function<double(const PointSet&, const LabelFunction&)>;

// Posterior over an enumerated support of label functions.
struct LabelPosterior {
  std::vector<LabelFunction> support;
  std::vector<double> probs;        // normalized, sums to 1
  std::vector<double> log_weights;  // unnormalized log P(Phi=phi) + log f(S|phi)
};

LabelPosterior posterior_label_probs(const PointSet& points, const LabelPrior& prior,
                                     const LogLikelihoodFn& loglik);
LabelPosterior posterior_label_probs(const PointSet& points, const LabelPrior& prior,
                                     const NiwModel& model);

// P_S(Q) = sum of posterior label probabilities over label functions
// inducing Q; deterministic canonical order, sums to 1.
std::vector<std::pair<Partition, double>> partition_probs(const LabelPosterior& post);
std::vector<std::pair<Partition, double>> partition_probs(const PointSet& points,
                                                          const LabelPrior& prior,
                                                          const NiwModel& model);

// log( sum_i exp(v_i) ) guarded against empty input and -inf.
double log_sum_exp(const std::vector<double>& v);

}  // namespace rlpp
