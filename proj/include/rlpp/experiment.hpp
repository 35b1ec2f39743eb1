// Monte-Carlo experiment harness: Gaussian-uncertainty and granular-imaging
// studies, scored by the natural cost against the generating partition.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rlpp/granulometry.hpp"
#include "rlpp/niw.hpp"

namespace rlpp::exp {

// Method identifiers accepted by the harness: "ibr" (exact for n <= 12,
// pseed beyond), "ibr-exact", "ibr-pseed", "kmeans", "fcm", "hier-s",
// "hier-a", "hier-c", "em", "random".
bool is_known_method(const std::string& id);
std::vector<std::string> default_methods();

struct GaussianExpConfig {
  int d = 1;
  int n1 = 5;
  int n2 = 5;
  int reps = 200;            // independent states of nature, one draw each
  std::vector<std::string> methods = default_methods();
  std::uint64_t seed = 0;
  int threads = 1;
  bool with_timing = false;  // off: runtime_ms column fixed at 0 for bit-stable CSVs
};

struct GranularExpConfig {
  int theta_states = 10;
  double theta_lo = 1.75;
  double theta_hi = 2.0;
  int rho_count = 500;
  double rho_lo = 0.45;
  double rho_hi = 0.55;
  int reps = 20;  // image sets per theta state
  int n1 = 5;
  int n2 = 5;
  bool rendered = false;  // rasterize scenes instead of radius-level features
  gran::GranularModelConfig model;
  std::vector<std::string> methods = default_methods();
  std::uint64_t seed = 0;
  int threads = 1;
  bool with_timing = false;

  // Rendered mode only: pixels per radius unit, image size, and the radius
  // floor (in units) that bounds discretization error.
  double radius_scale = 10.0;
  int image_size = 550;
  double min_radius_units = 0.8;
};

struct RunRecord {
  std::string experiment;
  int d = 0;
  int n1 = 0;
  int n2 = 0;
  int state_index = 0;
  double theta = 0.0;
  int rep = 0;
  std::string method;
  double error = 0.0;
  double runtime_ms = 0.0;
};

struct MethodSummary {
  std::string method;
  int count = 0;
  double mean_error = 0.0;
  double std_error = 0.0;  // standard error of the mean
};

struct RunResult {
  std::vector<RunRecord> records;  // fixed order: task-major, then method

  // Overall per-method aggregates, in first-appearance method order.
  std::vector<MethodSummary> summarize() const;
  // Per-(state, method) aggregates, state-major.
  std::vector<std::pair<int, MethodSummary>> summarize_by_state() const;
};

RunResult run_gaussian_experiment(const GaussianExpConfig& cfg);
RunResult run_granular_experiment(const GranularExpConfig& cfg);

// CSV emitters. Schema of the record table:
//   experiment,d,n1,n2,state_index,theta,rep,method,error,runtime_ms
std::string to_csv(const RunResult& result);
std::string summary_csv(const RunResult& result);
std::string per_state_csv(const RunResult& result);

}  // namespace rlpp::exp
