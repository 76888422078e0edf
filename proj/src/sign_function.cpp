#include "qgauss/sign_function.hpp"

#include "qgauss/common.hpp"

namespace qgauss {

SignFunction::SignFunction(std::size_t n, int off_diagonal)
    : n_(n), values_(n * n, static_cast<std::int8_t>(off_diagonal)) {
  if (off_diagonal != 1 && off_diagonal != -1)
    throw DomainError("sign function entries must be +1 or -1");
  for (std::size_t i = 0; i < n_; ++i) values_[i * n_ + i] = -1;
}

SignFunction SignFunction::from_table(
    const std::vector<std::vector<int>>& table) {
  SignFunction eps(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i].size() != table.size())
      throw DomainError("sign table must be square");
    for (std::size_t j = 0; j < table.size(); ++j) {
      const int v = table[i][j];
      if (v != 1 && v != -1)
        throw DomainError("sign table entries must be +1 or -1");
      if (i == j && v != -1)
        throw DomainError("sign table diagonal must be -1");
      if (table[j][i] != v) throw DomainError("sign table must be symmetric");
      eps.values_[i * eps.n_ + j] = static_cast<std::int8_t>(v);
    }
  }
  return eps;
}

void SignFunction::set(std::size_t i, std::size_t j, int value) {
  if (i >= n_ || j >= n_) throw DomainError("sign index out of range");
  if (value != 1 && value != -1)
    throw DomainError("sign function entries must be +1 or -1");
  if (i == j) {
    if (value != -1) throw DomainError("sign function diagonal is fixed at -1");
    return;
  }
  values_[i * n_ + j] = static_cast<std::int8_t>(value);
  values_[j * n_ + i] = static_cast<std::int8_t>(value);
}

double SignFunction::off_diagonal_mean() const {
  if (n_ < 2) return 0.0;
  long long sum = 0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (i != j) sum += values_[i * n_ + j];
  return static_cast<double>(sum) / static_cast<double>(n_ * (n_ - 1));
}

SignFunction SignFunction::leading(std::size_t m) const {
  if (m > n_) throw DomainError("restriction larger than the sign table");
  SignFunction out(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) out.values_[i * m + j] = values_[i * n_ + j];
  return out;
}

}  // namespace qgauss
