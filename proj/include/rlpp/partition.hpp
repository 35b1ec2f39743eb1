// Partitions, label functions, enumeration and the natural partition cost.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rlpp {

// Explicit index -> label map. Labels are 1-based and live in {1..label_count}.
struct LabelFunction {
  std::vector<int> labels;
  int label_count = 0;

  int size() const { return static_cast<int>(labels.size()); }
  void validate() const;  // throws std::invalid_argument on bad labels
};

// Canonical partition of {0..n-1}. The encoding relabels blocks in
// first-occurrence order, so two partitions are equal iff encodings are equal.
class Partition {
 public:
  Partition() = default;

  // Accepts any integer labeling and canonicalizes it.
  static Partition from_labels(const std::vector<int>& labels);
  static Partition from_label_function(const LabelFunction& lf);
  // Blocks hold 0-based indices; they must be disjoint and cover {0..n-1}.
  static Partition from_blocks(const std::vector<std::vector<int>>& blocks, int n);

  const std::vector<int>& encoding() const { return enc_; }
  int size() const { return static_cast<int>(enc_.size()); }
  int block_count() const { return blocks_; }
  std::vector<std::vector<int>> blocks() const;
  std::vector<int> block_sizes() const;

  bool operator==(const Partition& o) const { return enc_ == o.enc_; }
  bool operator<(const Partition& o) const { return enc_ < o.enc_; }

  // Single line of space-separated 1-based canonical labels.
  std::string to_line() const;
  static Partition from_line(const std::string& line);

 private:
  std::vector<int> enc_;
  int blocks_ = 0;
};

// Fraction of positions where the two label functions disagree, Eq-style
// [0,1]. Lengths must match.
double label_mismatch(const LabelFunction& a, const LabelFunction& b);

Partition induced_partition(const LabelFunction& a);

// Maximum total overlap over injective assignments of p-blocks to q-blocks,
// padding with empty blocks up to l. Brute force over permutations for
// l <= 5, assignment solver beyond.
std::int64_t max_block_overlap(const Partition& p, const Partition& q, int l);

// Natural partition cost (n - W)/n in [0, 1-1/n]. Throws if either
// partition has more than l blocks or sizes differ.
double natural_cost(const Partition& p, const Partition& q, int l);

// All distinct partitions of {0..n-1} with at most l blocks, in the
// deterministic order induced by restricted-growth strings. Guarded at
// n <= 15. If `sizes` is given, only partitions whose block-size multiset
// equals it are returned (sizes must sum to n).
std::vector<Partition> enumerate_partitions(
    int n, int l, const std::optional<std::vector<int>>& sizes = std::nullopt);

// All label functions on n points with labels in {1..l} whose per-label
// count vector is a permutation of `sizes` (padded with zeros up to l).
// Deterministic lexicographic order.
std::vector<LabelFunction> enumerate_label_functions(int n, int l,
                                                     const std::vector<int>& sizes);

// Entry (i,j) = natural_cost(cands[i], refs[j], l).
Eigen::MatrixXd cost_matrix(const std::vector<Partition>& cands,
                            const std::vector<Partition>& refs, int l);

}  // namespace rlpp
