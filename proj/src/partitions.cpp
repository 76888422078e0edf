#include "qgauss/partitions.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <sstream>

#include "qgauss/common.hpp"
#include "qgauss/rng.hpp"

namespace qgauss {

void PairPartition::validate() const {
  const int two_r = 2 * r();
  std::vector<char> seen(two_r + 1, 0);
  int prev_s = 0;
  for (const auto& [s, t] : blocks) {
    if (s < 1 || t > two_r || s >= t)
      throw DomainError("invalid block in pair partition " + to_string(*this));
    if (s <= prev_s)
      throw DomainError("pair partition blocks must be sorted by left endpoint");
    if (seen[s] || seen[t])
      throw DomainError("point repeated in pair partition " + to_string(*this));
    seen[s] = seen[t] = 1;
    prev_s = s;
  }
}

namespace {

void extend(std::vector<char>& used, int two_r, PairPartition& current,
            std::vector<PairPartition>& out) {
  int first = 1;
  while (first <= two_r && used[first]) ++first;
  if (first > two_r) {
    out.push_back(current);
    return;
  }
  used[first] = 1;
  for (int partner = first + 1; partner <= two_r; ++partner) {
    if (used[partner]) continue;
    used[partner] = 1;
    current.blocks.emplace_back(first, partner);
    extend(used, two_r, current, out);
    current.blocks.pop_back();
    used[partner] = 0;
  }
  used[first] = 0;
}

}  // namespace

std::vector<PairPartition> enumerate_pair_partitions(int r, int cap) {
  if (r < 1) throw DomainError("pair partitions need r >= 1");
  if (r > cap)
    throw SizeLimitError("pair partition enumeration capped at r = " +
                         std::to_string(cap));
  std::vector<PairPartition> out;
  std::vector<char> used(2 * r + 1, 0);
  PairPartition current;
  extend(used, 2 * r, current, out);
  return out;
}

CrossingSet crossings(const PairPartition& v) {
  CrossingSet result;
  const int r = v.r();
  for (int l = 0; l < r; ++l) {
    for (int m = 0; m < r; ++m) {
      const auto [sl, tl] = v.blocks[l];
      const auto [sm, tm] = v.blocks[m];
      if (sl < sm && sm < tl && tl < tm) result.pairs.emplace_back(l, m);
    }
  }
  result.count = static_cast<int>(result.pairs.size());
  return result;
}

const PartitionTable& partition_table(int r) {
  static std::array<PartitionTable, kDefaultPartitionCap + 1> tables;
  static std::array<std::once_flag, kDefaultPartitionCap + 1> flags;
  if (r < 1) throw DomainError("pair partitions need r >= 1");
  if (r > kDefaultPartitionCap)
    throw SizeLimitError("pair partition enumeration capped at r = " +
                         std::to_string(kDefaultPartitionCap));
  std::call_once(flags[r], [r] {
    PartitionTable& t = tables[r];
    t.partitions = enumerate_pair_partitions(r);
    t.crossing_counts.reserve(t.partitions.size());
    for (const auto& v : t.partitions)
      t.crossing_counts.push_back(crossings(v).count);
  });
  return tables[r];
}

double falling_ratio(int n, int r) {
  double value = 1.0;
  for (int i = 0; i < r; ++i)
    value *= static_cast<double>(n - i) / static_cast<double>(n);
  return value;
}

namespace {

// partners[m] lists the blocks l < m that cross block m.
std::vector<std::vector<int>> crossing_partners(const PairPartition& v) {
  std::vector<std::vector<int>> partners(v.r());
  for (const auto& [l, m] : crossings(v).pairs) {
    const int lo = std::min(l, m);
    const int hi = std::max(l, m);
    partners[hi].push_back(lo);
  }
  return partners;
}

struct ExactSum {
  const SignFunction& eps;
  const std::vector<std::vector<int>>& partners;
  int n;
  std::vector<int> assigned;
  std::vector<char> used;
  long long sum = 0;
  std::uint64_t terms = 0;

  void run(int block, int sign) {
    if (block == static_cast<int>(partners.size())) {
      sum += sign;
      ++terms;
      return;
    }
    for (int i = 0; i < n; ++i) {
      if (used[i]) continue;
      int s = sign;
      for (int l : partners[block]) s *= eps(i, assigned[l]);
      used[i] = 1;
      assigned[block] = i;
      run(block + 1, s);
      used[i] = 0;
    }
  }
};

}  // namespace

TStatistic t_statistic(const PairPartition& v, const SignFunction& eps, int n,
                       const TStatisticOptions& options) {
  v.validate();
  const int r = v.r();
  if (n < r) throw DomainError("t statistic needs N >= r");
  if (static_cast<std::size_t>(n) > eps.size())
    throw DomainError("sign function smaller than N");
  const auto partners = crossing_partners(v);
  const double norm = std::pow(static_cast<double>(n), r);

  TStatistic result;
  if (norm <= options.exact_term_cap) {
    ExactSum exact{eps, partners, n, std::vector<int>(r, 0),
                   std::vector<char>(n, 0)};
    exact.run(0, 1);
    result.value = static_cast<double>(exact.sum) / norm;
    result.terms = exact.terms;
    return result;
  }

  // Uniform injective tuples by rejection; r is small compared with N here.
  const Philox4x32 rng(options.seed);
  double mean = 0.0;
  double m2 = 0.0;
  std::vector<int> tuple(r);
  for (std::uint64_t s = 0; s < options.samples; ++s) {
    std::uint32_t draw = 0;
    for (int l = 0; l < r; ++l) {
      for (;;) {
        const int i = static_cast<int>(rng.bits(s, draw++) % static_cast<std::uint64_t>(n));
        bool clash = false;
        for (int m = 0; m < l; ++m) clash = clash || tuple[m] == i;
        if (!clash) {
          tuple[l] = i;
          break;
        }
      }
    }
    int sign = 1;
    for (int m = 0; m < r; ++m)
      for (int l : partners[m]) sign *= eps(tuple[m], tuple[l]);
    const double delta = sign - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (sign - mean);
  }
  const double ratio = falling_ratio(n, r);
  const double samples = static_cast<double>(options.samples);
  result.exact = false;
  result.terms = options.samples;
  result.value = ratio * mean;
  result.std_error =
      samples > 1 ? ratio * std::sqrt(m2 / (samples - 1.0) / samples) : 0.0;
  return result;
}

std::string to_string(const PairPartition& v) {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < v.blocks.size(); ++i) {
    if (i) os << ',';
    os << '(' << v.blocks[i].first << ',' << v.blocks[i].second << ')';
  }
  os << '}';
  return os.str();
}

}  // namespace qgauss
