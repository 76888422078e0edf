#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qgauss/babyfock.hpp"

namespace qgauss {

// Modular data of the vacuum state on a twisted model.
//
// Δ is diagonal in the subset basis with eigenvalue Π λ_j^{χ_j - χ_{-j}}
// (product over sites). J is antilinear and sends x_{a1}...x_{am} to
// x_{-am}...x_{-a1}; rewritten in the model's basis order that is
// ±x_{-A}, the sign being Π ε(a, b) over the pairs a < b of A whose order
// the mirror preserves. For the order -k < .. < -1 < 1 < .. < k no pair
// qualifies and J is the bare mirror.
class ModularData {
 public:
  explicit ModularData(const SpinModel& model);

  double log_weight(std::uint64_t b) const { return log_weight_[b]; }
  std::uint64_t j_target(std::uint64_t b) const;
  int j_sign(std::uint64_t b) const;

  // χ_(s,j) - χ_(s,-j) for every site s and j = 1..k, site-major.
  std::vector<int> delta_exponents(std::uint64_t b) const;

  const SpinModel& model() const { return model_; }

 private:
  SpinModel model_;
  std::vector<double> log_weight_;
  std::vector<std::uint64_t> keep_mask_;
};

// Multiplies each amplitude by Δ_b^power (power = it gives the phase Δ^{it}).
SpinVector delta_apply(const SpinVector& v, const SpinModel& model, Complex power);
SparseVector delta_apply(const SparseVector& v, const ModularData& data, Complex power);

SpinVector j_apply(const SpinVector& v, const SpinModel& model);
SparseVector j_apply(const SparseVector& v, const ModularData& data);

// S = J Δ^{1/2}.
SpinVector s_apply(const SpinVector& v, const SpinModel& model);
SparseVector s_apply(const SparseVector& v, const ModularData& data);

// λ^{iz} = exp(iz ln λ): the factor with σ_z(γ_j) = λ_j^{iz} γ_j.
Complex sigma_generator(Complex z, double lambda);

// Coefficients (on g_j, on g_{-j}) of σ_z(g_j) for j > 0, and
// (on g_{-j}, on g_j) of σ_z(g_{-j}) for j < 0: (cos θ, ∓sin θ), θ = z ln λ.
std::pair<Complex, Complex> sigma_gaussian_rotation(Complex z, int j, double lambda);

struct ModularReport {
  std::vector<ResidualRow> rows;
  std::size_t dim = 0;
  std::string params;
  double tolerance = kRelationTolerance;

  bool passed() const;
  double max_residual() const;
};

ModularReport verify_modular(const SpinModel& model);

// All words of length 1..max_length over the given letters.
std::vector<OperatorWord> all_words(const std::vector<Letter>& letters, int max_length);

}  // namespace qgauss
