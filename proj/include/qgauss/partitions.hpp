#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qgauss/sign_function.hpp"

namespace qgauss {

// A perfect matching of {1..2r}. Blocks are (s, t) with s < t, stored sorted
// by s, so two partitions are equal iff their block lists are equal.
struct PairPartition {
  std::vector<std::pair<int, int>> blocks;

  int r() const { return static_cast<int>(blocks.size()); }

  // Throws DomainError unless the blocks form a canonical perfect matching.
  void validate() const;

  bool operator==(const PairPartition&) const = default;
  auto operator<=>(const PairPartition&) const = default;
};

// Block-index pairs (l, m), 0-based, with s_l < s_m < t_l < t_m.
struct CrossingSet {
  std::vector<std::pair<int, int>> pairs;
  int count = 0;
};

inline constexpr int kDefaultPartitionCap = 8;

// All (2r-1)!! pair partitions of {1..2r}, lexicographic on block lists.
std::vector<PairPartition> enumerate_pair_partitions(
    int r, int cap = kDefaultPartitionCap);

CrossingSet crossings(const PairPartition& v);

// Cached enumeration with crossing counts, shared by the moment formulas.
struct PartitionTable {
  std::vector<PairPartition> partitions;
  std::vector<int> crossing_counts;
};
const PartitionTable& partition_table(int r);

struct TStatistic {
  double value = 0.0;
  double std_error = 0.0;  // 0 for exact enumeration
  bool exact = true;
  std::uint64_t terms = 0;  // injective tuples summed (or samples drawn)
};

struct TStatisticOptions {
  double exact_term_cap = 1e8;  // N^r threshold for direct enumeration
  std::uint64_t samples = 400000;
  std::uint64_t seed = 0;
};

// (1/N^r) Σ over injective (i_1..i_r) in {0..N-1} of Π_{(l,m) ∈ I(V)} ε(i_l, i_m).
// Uses the first N indices of eps.
TStatistic t_statistic(const PairPartition& v, const SignFunction& eps, int n,
                       const TStatisticOptions& options = {});

// N!/((N-r)! N^r): the value of t(V) for ε ≡ +1 or for non-crossing V.
double falling_ratio(int n, int r);

std::string to_string(const PairPartition& v);

}  // namespace qgauss
