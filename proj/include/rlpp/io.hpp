// File I/O: points CSV, plain PBM (P1) images, partition text formats and
// the structured model spec.
#pragma once

#include <string>

#include "rlpp/granulometry.hpp"
#include "rlpp/niw.hpp"
#include "rlpp/partition.hpp"

namespace rlpp::io {

// CSV of n rows x d numeric columns ('.' decimal, optional header row).
// Throws std::runtime_error with a line number on malformed input.
PointSet read_points_csv(const std::string& path);
void write_points_csv(const std::string& path, const PointSet& points);

gran::BinaryImage read_pbm(const std::string& path);
void write_pbm(const std::string& path, const gran::BinaryImage& img);

// Structured partition output: list of 0-based index lists, e.g. [[0,1],[2]].
std::string partition_to_structured(const Partition& p);
Partition read_partition_file(const std::string& path);  // single label line

// Model spec (JSON): {"dimension": d, "labels": [{"m": [...], "nu": ...,
// "kappa": ..., "psi": [[...]]}, ...], "prior": {"kind":
// "fixed-sizes-uniform", "sizes": [...]}}.
struct ModelSpec {
  NiwModel model;
  LabelPrior prior;
};
ModelSpec read_model_spec(const std::string& path);

}  // namespace rlpp::io
