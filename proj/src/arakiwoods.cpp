#include "qgauss/arakiwoods.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qgauss {

namespace {

constexpr double kSpectralTolerance = 1e-10;

double deform(double lambda) { return 2.0 * lambda / (1.0 + lambda); }

}  // namespace

SpectralData::SpectralData(std::vector<double> eigenvalues, Eigen::MatrixXcd eigenvectors,
                           std::vector<int> pairing)
    : values_(std::move(eigenvalues)), vectors_(std::move(eigenvectors)),
      pairing_(std::move(pairing)) {
  const auto d = static_cast<std::size_t>(vectors_.rows());
  if (vectors_.cols() != vectors_.rows() || values_.size() != d)
    throw DomainError("spectral data needs one eigenvalue per basis vector");
  for (double l : values_)
    if (!(l > 0.0)) throw DomainError("eigenvalues must be positive");
  const double ortho =
      (vectors_.adjoint() * vectors_ - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff();
  if (ortho > kSpectralTolerance) throw DomainError("eigenvectors are not orthonormal");
  if (!pairing_.empty()) {
    if (pairing_.size() != d) throw DomainError("pairing must cover every eigenvector");
    for (std::size_t i = 0; i < d; ++i) {
      const int p = pairing_[i];
      if (p < 0 || static_cast<std::size_t>(p) >= d || pairing_[p] != static_cast<int>(i))
        throw DomainError("pairing is not an involution");
      if (std::abs(values_[i] * values_[p] - 1.0) > kSpectralTolerance)
        throw DomainError("paired eigenvalues must be reciprocal");
    }
  }
}

SpectralData SpectralData::identity(int d) {
  if (d < 1) throw DomainError("dimension must be >= 1");
  std::vector<int> pairing(d);
  for (int i = 0; i < d; ++i) pairing[i] = i;
  return SpectralData(std::vector<double>(d, 1.0), Eigen::MatrixXcd::Identity(d, d),
                      std::move(pairing));
}

Eigen::VectorXcd SpectralData::coordinates(const Eigen::VectorXcd& xi) const {
  if (xi.size() != vectors_.rows()) throw DomainError("vector dimension mismatch");
  return vectors_.adjoint() * xi;
}

SpectralData rotation_spectral_data(const std::vector<double>& lambda) {
  const int k = static_cast<int>(lambda.size());
  if (k < 1) throw DomainError("rotation data needs at least one lambda");
  const int d = 2 * k;
  Eigen::MatrixXcd vectors = Eigen::MatrixXcd::Zero(d, d);
  std::vector<double> values(d);
  std::vector<int> pairing(d);
  const double r = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < k; ++j) {
    if (!(lambda[j] >= 1.0)) throw DomainError("lambda_j must be >= 1");
    const int u = 2 * j, v = 2 * j + 1;
    vectors(u, u) = r;
    vectors(v, u) = -kI * r;
    vectors(u, v) = r;
    vectors(v, v) = kI * r;
    values[u] = lambda[j];
    values[v] = 1.0 / lambda[j];
    pairing[u] = v;
    pairing[v] = u;
  }
  return SpectralData(std::move(values), std::move(vectors), std::move(pairing));
}

Complex deformed_inner(const Eigen::VectorXcd& xi, const Eigen::VectorXcd& eta,
                       const SpectralData& spec, const std::vector<double>& mapped) {
  if (mapped.size() != spec.eigenvalues().size())
    throw DomainError("eigenvalue map has the wrong length");
  const Eigen::VectorXcd a = spec.coordinates(xi);
  const Eigen::VectorXcd b = spec.coordinates(eta);
  Complex total = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    total += deform(mapped[i]) * std::conj(a(i)) * b(i);
  return total;
}

Complex deformed_inner(const Eigen::VectorXcd& xi, const Eigen::VectorXcd& eta,
                       const SpectralData& spec) {
  return deformed_inner(xi, eta, spec, spec.eigenvalues());
}

int signed_column(int j, int k) {
  if (j == 0 || std::abs(j) > k) throw DomainError("signed index out of range");
  return j < 0 ? k + j : k + j - 1;
}

Eigen::MatrixXcd fhat_basis(const std::vector<double>& lambda) {
  const int k = static_cast<int>(lambda.size());
  if (k < 1) throw DomainError("f-hat basis needs at least one lambda");
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(2 * k, 2 * k);
  for (int j = 1; j <= k; ++j) {
    const double l = lambda[j - 1];
    if (!(l >= 1.0)) throw DomainError("lambda_j must be >= 1");
    const double mu = std::pow(l, 0.25);
    const double norm = 1.0 / std::sqrt(mu * mu + 1.0 / (mu * mu));
    const int minus = signed_column(-j, k), plus = signed_column(j, k);
    out(minus, plus) = norm * mu;
    out(plus, plus) = norm / mu;
    out(minus, minus) = kI * norm * mu;
    out(plus, minus) = -kI * norm / mu;
  }
  return out;
}

StepValue discretize(double t, int n) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("f_n needs a finite t > 0");
  if (n < 1) throw DomainError("discretization level must be >= 1");
  if (n > 52) throw DomainError("discretization level capped at 52");
  if (t == 1.0) return {1, 1};
  const bool below = t < 1.0;
  const double u = below ? 1.0 / t : t;
  const std::int64_t grid = std::int64_t{1} << n;
  StepValue g;
  if (u >= n) {
    g = {n, 1};
  } else if (u < 1.0 + 1.0 / static_cast<double>(grid)) {
    g = {1, 1};
  } else {
    g = {static_cast<std::int64_t>(std::floor(std::ldexp(u, n))), grid};
    const std::int64_t common = std::gcd(g.num, g.den);
    g = {g.num / common, g.den / common};
  }
  return below ? StepValue{g.den, g.num} : g;
}

double discretize_value(double t, int n) { return discretize(t, n).value(); }

std::vector<InnerConvergenceRow> inner_convergence(const Eigen::VectorXcd& xi,
                                                   const Eigen::VectorXcd& eta,
                                                   const SpectralData& spec,
                                                   const std::vector<int>& n_values) {
  const Complex limit = deformed_inner(xi, eta, spec);
  // Per eigenvalue |g(f_n(λ)) - g(λ)| <= 2^{-n}/2 once n passes max(λ, 1/λ);
  // the bound carries a safety factor of 6 over that.
  const double scale = xi.norm() * eta.norm();
  std::vector<InnerConvergenceRow> rows;
  for (int n : n_values) {
    std::vector<double> mapped;
    for (double l : spec.eigenvalues()) mapped.push_back(discretize_value(l, n));
    InnerConvergenceRow row;
    row.n = n;
    row.value = deformed_inner(xi, eta, spec, mapped);
    row.limit = limit;
    row.error = std::abs(row.value - limit);
    row.bound = 3.0 * std::ldexp(1.0, -n) * scale;
    rows.push_back(row);
  }
  return rows;
}

double sigma_bound_norm(const Eigen::VectorXcd& e, const SpectralData& spec, double r, int n,
                        double k_bound) {
  if (!(k_bound >= 1.0)) throw DomainError("support bound K must be >= 1");
  const Eigen::VectorXcd c = spec.coordinates(e);
  double total = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double weight = std::norm(c(i));
    if (weight == 0.0) continue;
    const double l = spec.eigenvalues()[i];
    if (l < 1.0 / k_bound || l > k_bound)
      throw DomainError("spectral support leaves [1/K, K]");
    const double f = n == 0 ? l : discretize_value(l, n);
    total += weight * 2.0 * std::exp((2.0 * r + 1.0) * std::log(f)) / (1.0 + f);
  }
  return total;
}

}  // namespace qgauss
