#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qgauss/common.hpp"

namespace qgauss {

// Finite spectral data of a positive generator A on C^d: eigenvalues and an
// orthonormal eigenvector basis (columns). When pairing is non-empty,
// pairing[i] is the index of the eigenvector at 1/λ_i, and the map must be
// an involution.
class SpectralData {
 public:
  SpectralData(std::vector<double> eigenvalues, Eigen::MatrixXcd eigenvectors,
               std::vector<int> pairing = {});

  // A = Id on C^d.
  static SpectralData identity(int d);

  int dim() const { return static_cast<int>(vectors_.rows()); }
  const std::vector<double>& eigenvalues() const { return values_; }
  const Eigen::MatrixXcd& eigenvectors() const { return vectors_; }
  const std::vector<int>& pairing() const { return pairing_; }
  bool conjugation_compatible() const { return !pairing_.empty(); }

  // Coordinates v_i^H ξ.
  Eigen::VectorXcd coordinates(const Eigen::VectorXcd& xi) const;

 private:
  std::vector<double> values_;
  Eigen::MatrixXcd vectors_;
  std::vector<int> pairing_;
};

// A on the real space R^{2k} with basis (u_1, v_1, .., u_k, v_k) generating
// the rotations U_t = A^{it} by angle t ln λ_j in each plane (u_j, v_j).
// Eigenvectors (u ∓ iv)/√2 carry λ_j and 1/λ_j and are paired.
SpectralData rotation_spectral_data(const std::vector<double>& lambda);

// ⟨2A(1+A)^{-1} ξ, η⟩, antilinear in ξ.
Complex deformed_inner(const Eigen::VectorXcd& xi, const Eigen::VectorXcd& eta,
                       const SpectralData& spec);

// Same with A replaced by f(A) for the given eigenvalue map.
Complex deformed_inner(const Eigen::VectorXcd& xi, const Eigen::VectorXcd& eta,
                       const SpectralData& spec, const std::vector<double>& mapped);

// f̂_j and f̂_{-j} in C^{2k}; coordinates ordered e_{-k}..e_{-1}, e_1..e_k.
// Result columns ordered f̂_{-k}..f̂_{-1}, f̂_1..f̂_k.
Eigen::MatrixXcd fhat_basis(const std::vector<double>& lambda);

// Column of fhat_basis / of the coordinate basis holding signed index j.
int signed_column(int j, int k);

// f_n(t) as an exact rational num/den.
struct StepValue {
  std::int64_t num = 1;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Dyadic step approximation with f_n(1) = 1 and f_n(t) f_n(1/t) = 1:
//   t > 1: n if t >= n, 1 if t < 1 + 2^{-n}, floor(t 2^n)/2^n otherwise;
//   t < 1: 1/f_n(1/t).
StepValue discretize(double t, int n);
double discretize_value(double t, int n);

struct InnerConvergenceRow {
  int n = 0;
  Complex value;
  Complex limit;
  double error = 0.0;
  double bound = 0.0;  // 3 · 2^{-n} · ‖ξ‖ ‖η‖
};

std::vector<InnerConvergenceRow> inner_convergence(const Eigen::VectorXcd& xi,
                                                   const Eigen::VectorXcd& eta,
                                                   const SpectralData& spec,
                                                   const std::vector<int>& n_values);

// ‖A_n^r e‖^2 in the deformed inner product of A_n = f_n(A):
// Σ_i |v_i^H e|^2 · 2 f_n(λ_i)^{2r+1} / (1 + f_n(λ_i)). n = 0 means A itself.
// Throws DomainError if e has spectral weight outside [1/K, K].
double sigma_bound_norm(const Eigen::VectorXcd& e, const SpectralData& spec, double r,
                        int n, double k_bound);

}  // namespace qgauss
