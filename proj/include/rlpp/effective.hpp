// Effective RLPP construction over a finite uncertainty class of states.
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rlpp/niw.hpp"

namespace rlpp {

struct LabeledSample {
  PointSet points;
  LabelFunction labels;
  std::string state_id;  // which state generated the sample
};

using StateSampler = std::function<LabeledSample(std::uint64_t seed)>;

// One state of nature: prior weight, state-conditional log-likelihood
// log f(S | phi, theta) and (optionally) a generator.
struct RlppState {
  std::string id;
  double weight = 0.0;
  LogLikelihoodFn log_likelihood;
  StateSampler sampler;  // may be empty when only evaluation is needed
};

struct UncertaintyClass {
  std::vector<RlppState> states;
  void validate() const;  // nonnegative weights summing to 1 within 1e-12
};

// Separable RLPP with joint parameter [theta, rho]: its likelihood is the
// pi-weighted mixture of the state likelihoods, its sampler draws
// theta ~ pi and delegates.
class EffectiveRlpp {
 public:
  explicit EffectiveRlpp(UncertaintyClass uc);

  // log f(S | phi) = log sum_theta pi(theta) f(S | phi, theta).
  double log_likelihood(const PointSet& points, const LabelFunction& phi) const;
  LogLikelihoodFn log_likelihood_fn() const;

  LabeledSample sample(std::uint64_t seed) const;

  const UncertaintyClass& uncertainty_class() const { return uc_; }

 private:
  UncertaintyClass uc_;
};

}  // namespace rlpp
