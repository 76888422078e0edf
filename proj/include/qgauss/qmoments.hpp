#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qgauss/common.hpp"

namespace qgauss {

// Covariance of the letters at word positions (s, t), s < t, 0-based.
using CovarianceKernel = std::function<Complex(int, int)>;

// Σ over pair partitions V of {1..p} of q^{i(V)} Π_l cov(s_l, t_l); exactly 0
// for odd p. p is capped at 2 * kDefaultPartitionCap.
Complex pairing_moment(int p, const CovarianceKernel& cov, double q);

// --- q-circular variables -------------------------------------------------

// q together with the weights μ_j = λ_j^{1/4} >= 1 (generator j is 1-based).
class CircularParams {
 public:
  CircularParams(double q, std::vector<double> mu);
  static CircularParams from_lambda(double q, const std::vector<double>& lambda);

  double q() const { return q_; }
  int k() const { return static_cast<int>(mu_.size()); }
  double mu(int j) const { return mu_.at(j - 1); }
  double lambda(int j) const;
  const std::vector<double>& mu() const { return mu_; }

 private:
  double q_;
  std::vector<double> mu_;
};

// Letter c_j (star = false) or c_j^* (star = true).
struct StarLetter {
  int j = 1;
  bool star = false;

  int k() const { return star ? -1 : 1; }
  bool operator==(const StarLetter&) const = default;
};

using StarWord = std::vector<StarLetter>;

// φ(c_{j1}^{k1} c_{j2}^{k2}) = μ_{j1}^{2 k1} δ_{k1,-k2} δ_{j1,j2}.
Complex circular_covariance(const StarLetter& first, const StarLetter& second,
                            const CircularParams& params);

Complex circular_star_moment(const StarWord& word, const CircularParams& params);

// Parses "c1 c1* c2" style words.
StarWord parse_star_word(const std::string& text);
std::string to_string(const StarWord& word);

// --- ν_q ----------------------------------------------------------------------

struct NuQBounds {
  double lower = 0.0;
  double upper = 0.0;
  double norm_factor = 0.0;  // ‖G(f)‖ / ‖f‖ = 2/√(1-q)
};

NuQBounds nu_q_bounds(double q);

// --- Truncated q-Fock space over C^d ---------------------------------------

// Tensor word over the orthonormal basis e_0..e_{d-1}; the empty word is Ω.
using TensorWord = std::vector<int>;

// Finite linear combination of tensor words; the level of a term is the
// length of its word.
class FockVector {
 public:
  FockVector() = default;
  static FockVector vacuum();
  static FockVector basis(const TensorWord& word, Complex coef = 1.0);

  void add(const TensorWord& word, Complex coef);
  const std::map<TensorWord, Complex>& terms() const { return terms_; }
  int max_level() const;

  Complex coefficient(const TensorWord& word) const;

  FockVector& operator+=(const FockVector& other);
  FockVector operator*(Complex scale) const;

 private:
  std::map<TensorWord, Complex> terms_;
};

// q-inner product of basis words (antilinear in the first argument).
Complex qfock_inner(const TensorWord& u, const TensorWord& v, double q);
Complex qfock_inner(const FockVector& u, const FockVector& v, double q);

// a^*(h) (create = true) or a(h) for h given by coordinates in C^d.
struct FockLetter {
  bool create = true;
  std::vector<Complex> h;
};

// Right-to-left application of a word of creation/annihilation letters.
FockVector qfock_apply(std::span<const FockLetter> word, const FockVector& v,
                       double q, int level_cutoff);

// Multiplies the level-n component by e^{-tn}.
FockVector ou_apply(double t, const FockVector& v);

}  // namespace qgauss
