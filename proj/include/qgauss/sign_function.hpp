#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace qgauss {

// Symmetric ±1 table over an index set {0..n-1} with -1 on the diagonal.
// Entry (i, j) decides whether generators i and j commute (+1) or
// anticommute (-1).
class SignFunction {
 public:
  // Off-diagonal entries all equal to off_diagonal (±1).
  explicit SignFunction(std::size_t n, int off_diagonal = 1);

  // Validates symmetry, ±1 entries and the -1 diagonal.
  static SignFunction from_table(const std::vector<std::vector<int>>& table);

  std::size_t size() const { return n_; }

  int operator()(std::size_t i, std::size_t j) const {
    return values_[i * n_ + j];
  }

  // Sets (i, j) and (j, i). Diagonal entries are fixed at -1.
  void set(std::size_t i, std::size_t j, int value);

  // Mean of ε(i, j) over ordered pairs i != j (0 when n < 2).
  double off_diagonal_mean() const;

  // Restriction to the first m indices.
  SignFunction leading(std::size_t m) const;

  bool operator==(const SignFunction&) const = default;

 private:
  std::size_t n_;
  std::vector<std::int8_t> values_;
};

}  // namespace qgauss
