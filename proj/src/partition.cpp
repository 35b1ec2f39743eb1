#include "rlpp/partition.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "rlpp/hungarian.hpp"

namespace rlpp {

void LabelFunction::validate() const {
  if (labels.empty()) throw std::invalid_argument("label function: empty");
  for (int v : labels) {
    if (v < 1 || v > label_count)
      throw std::invalid_argument("label function: label out of {1..l}");
  }
}

Partition Partition::from_labels(const std::vector<int>& labels) {
  if (labels.empty()) throw std::invalid_argument("partition: empty labeling");
  Partition p;
  p.enc_.resize(labels.size());
  std::vector<std::pair<int, int>> seen;  // (raw label, canonical id)
  for (std::size_t i = 0; i < labels.size(); ++i) {
    int canon = -1;
    for (const auto& [raw, id] : seen) {
      if (raw == labels[i]) {
        canon = id;
        break;
      }
    }
    if (canon < 0) {
      canon = static_cast<int>(seen.size());
      seen.emplace_back(labels[i], canon);
    }
    p.enc_[i] = canon;
  }
  p.blocks_ = static_cast<int>(seen.size());
  return p;
}

Partition Partition::from_label_function(const LabelFunction& lf) {
  lf.validate();
  return from_labels(lf.labels);
}

Partition Partition::from_blocks(const std::vector<std::vector<int>>& blocks, int n) {
  std::vector<int> labels(n, -1);
  int id = 0;
  for (const auto& blk : blocks) {
    for (int idx : blk) {
      if (idx < 0 || idx >= n) throw std::invalid_argument("partition: index out of range");
      if (labels[idx] != -1) throw std::invalid_argument("partition: blocks overlap");
      labels[idx] = id;
    }
    ++id;
  }
  for (int v : labels) {
    if (v == -1) throw std::invalid_argument("partition: blocks do not cover all indices");
  }
  return from_labels(labels);
}

std::vector<std::vector<int>> Partition::blocks() const {
  std::vector<std::vector<int>> out(blocks_);
  for (int i = 0; i < size(); ++i) out[enc_[i]].push_back(i);
  return out;
}

std::vector<int> Partition::block_sizes() const {
  std::vector<int> out(blocks_, 0);
  for (int v : enc_) ++out[v];
  return out;
}

std::string Partition::to_line() const {
  std::ostringstream os;
  for (int i = 0; i < size(); ++i) {
    if (i) os << ' ';
    os << enc_[i] + 1;
  }
  return os.str();
}

Partition Partition::from_line(const std::string& line) {
  std::istringstream is(line);
  std::vector<int> labels;
  int v;
  while (is >> v) labels.push_back(v);
  std::string rest;
  if (is.clear(), std::getline(is, rest) && rest.find_first_not_of(" \t\r") != std::string::npos)
    throw std::invalid_argument("partition line: trailing garbage");
  if (labels.empty()) throw std::invalid_argument("partition line: no labels");
  return from_labels(labels);
}

double label_mismatch(const LabelFunction& a, const LabelFunction& b) {
  if (a.labels.size() != b.labels.size() || a.labels.empty())
    throw std::invalid_argument("label_mismatch: length mismatch");
  int diff = 0;
  for (std::size_t i = 0; i < a.labels.size(); ++i)
    if (a.labels[i] != b.labels[i]) ++diff;
  return static_cast<double>(diff) / static_cast<double>(a.labels.size());
}

Partition induced_partition(const LabelFunction& a) {
  return Partition::from_label_function(a);
}

std::int64_t max_block_overlap(const Partition& p, const Partition& q, int l) {
  if (p.size() != q.size())
    throw std::invalid_argument("natural_cost: partitions over different n");
  if (p.block_count() > l || q.block_count() > l)
    throw std::invalid_argument("natural_cost: block count exceeds label count l");

  // Overlap matrix padded with empty blocks up to l x l.
  std::vector<std::vector<std::int64_t>> ov(l, std::vector<std::int64_t>(l, 0));
  const auto& pe = p.encoding();
  const auto& qe = q.encoding();
  for (int i = 0; i < p.size(); ++i) ++ov[pe[i]][qe[i]];

  if (l <= 5) {
    std::vector<int> perm(l);
    std::iota(perm.begin(), perm.end(), 0);
    std::int64_t best = 0;
    do {
      std::int64_t w = 0;
      for (int i = 0; i < l; ++i) w += ov[i][perm[i]];
      best = std::max(best, w);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  }

  // Assignment solver on negated overlaps.
  std::vector<std::vector<double>> cost(l, std::vector<double>(l, 0.0));
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j) cost[i][j] = -static_cast<double>(ov[i][j]);
  std::vector<int> assign;
  const double total = solve_assignment(cost, assign);
  return static_cast<std::int64_t>(std::llround(-total));
}

double natural_cost(const Partition& p, const Partition& q, int l) {
  const std::int64_t w = max_block_overlap(p, q, l);
  const auto n = static_cast<double>(p.size());
  return (n - static_cast<double>(w)) / n;
}

namespace {

void enumerate_rgs(int n, int l, const std::optional<std::vector<int>>& sizes,
                   std::vector<int>& a, int pos, int used,
                   std::vector<int>& counts, std::vector<Partition>& out) {
  if (pos == n) {
    if (sizes) {
      std::vector<int> got(counts.begin(), counts.begin() + used);
      std::sort(got.begin(), got.end());
      std::vector<int> want = *sizes;
      want.erase(std::remove(want.begin(), want.end(), 0), want.end());
      std::sort(want.begin(), want.end());
      if (got != want) return;
    }
    out.push_back(Partition::from_labels(a));
    return;
  }
  const int limit = std::min(used, l - 1);
  for (int lab = 0; lab <= limit; ++lab) {
    a[pos] = lab;
    const bool fresh = (lab == used);
    ++counts[lab];
    enumerate_rgs(n, l, sizes, a, pos + 1, used + (fresh ? 1 : 0), counts, out);
    --counts[lab];
  }
}

}  // namespace

std::vector<Partition> enumerate_partitions(int n, int l,
                                            const std::optional<std::vector<int>>& sizes) {
  if (n < 1 || l < 1) throw std::invalid_argument("enumerate_partitions: n, l >= 1");
  if (n > 15) throw std::invalid_argument("enumerate_partitions: n > 15 guard exceeded");
  if (sizes) {
    const int total = std::accumulate(sizes->begin(), sizes->end(), 0);
    if (total != n) throw std::invalid_argument("enumerate_partitions: sizes must sum to n");
    if (static_cast<int>(sizes->size()) > l)
      throw std::invalid_argument("enumerate_partitions: more sizes than labels");
  }
  std::vector<int> a(n, 0);
  std::vector<int> counts(l, 0);
  std::vector<Partition> out;
  enumerate_rgs(n, l, sizes, a, 0, 0, counts, out);
  return out;
}

std::vector<LabelFunction> enumerate_label_functions(int n, int l,
                                                     const std::vector<int>& sizes) {
  if (std::accumulate(sizes.begin(), sizes.end(), 0) != n)
    throw std::invalid_argument("enumerate_label_functions: sizes must sum to n");
  if (static_cast<int>(sizes.size()) > l)
    throw std::invalid_argument("enumerate_label_functions: more sizes than labels");
  if (n > 15) throw std::invalid_argument("enumerate_label_functions: n > 15 guard exceeded");

  std::vector<int> want = sizes;
  want.resize(l, 0);
  std::sort(want.begin(), want.end());

  std::vector<LabelFunction> out;
  std::vector<int> labels(n, 1);
  std::vector<int> counts(l, 0);
  // Lexicographic DFS over label vectors; prune on per-label capacity.
  const int cap = *std::max_element(want.begin(), want.end());
  std::function<void(int)> rec = [&](int pos) {
    if (pos == n) {
      std::vector<int> got = counts;
      std::sort(got.begin(), got.end());
      if (got == want) {
        LabelFunction lf{labels, l};
        out.push_back(lf);
      }
      return;
    }
    for (int lab = 0; lab < l; ++lab) {
      if (counts[lab] >= cap) continue;
      labels[pos] = lab + 1;
      ++counts[lab];
      rec(pos + 1);
      --counts[lab];
    }
  };
  rec(0);
  return out;
}

Eigen::MatrixXd cost_matrix(const std::vector<Partition>& cands,
                            const std::vector<Partition>& refs, int l) {
  Eigen::MatrixXd m(cands.size(), refs.size());
  for (std::size_t i = 0; i < cands.size(); ++i)
    for (std::size_t j = 0; j < refs.size(); ++j)
      m(i, j) = natural_cost(cands[i], refs[j], l);
  return m;
}

}  // namespace rlpp
