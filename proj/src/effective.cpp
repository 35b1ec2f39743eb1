#include "rlpp/effective.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace rlpp {

void UncertaintyClass::validate() const {
  if (states.empty()) throw std::invalid_argument("uncertainty class: no states");
  double sum = 0.0;
  for (const auto& st : states) {
    if (st.weight < 0.0) throw std::invalid_argument("uncertainty class: negative weight");
    if (!st.log_likelihood)
      throw std::invalid_argument("uncertainty class: state without likelihood");
    sum += st.weight;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("uncertainty class: weights must sum to 1");
}

EffectiveRlpp::EffectiveRlpp(UncertaintyClass uc) : uc_(std::move(uc)) {
  uc_.validate();
}

double EffectiveRlpp::log_likelihood(const PointSet& points,
                                     const LabelFunction& phi) const {
  std::vector<double> terms;
  terms.reserve(uc_.states.size());
  for (const auto& st : uc_.states) {
    if (st.weight == 0.0) continue;
    terms.push_back(std::log(st.weight) + st.log_likelihood(points, phi));
  }
  return log_sum_exp(terms);
}

LogLikelihoodFn EffectiveRlpp::log_likelihood_fn() const {
  return [this](const PointSet& s, const LabelFunction& lf) {
    return log_likelihood(s, lf);
  };
}

LabeledSample EffectiveRlpp::sample(std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double acc = 0.0;
  const RlppState* chosen = &uc_.states.back();
  for (const auto& st : uc_.states) {
    acc += st.weight;
    if (u < acc) {
      chosen = &st;
      break;
    }
  }
  if (!chosen->sampler)
    throw std::runtime_error("effective rlpp: selected state has no sampler");
  LabeledSample s = chosen->sampler(rng());
  s.state_id = chosen->id;
  return s;
}

}  // namespace rlpp
