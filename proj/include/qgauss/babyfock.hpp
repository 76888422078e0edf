#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qgauss/common.hpp"
#include "qgauss/sign_function.hpp"

namespace qgauss {

// Generator label. In twisted mode gen runs over ±1..±k; in untwisted mode
// over 1..k. Sites are 0-based.
struct Index {
  int site = 0;
  int gen = 1;

  auto operator<=>(const Index&) const = default;
};

std::string to_string(const Index& index);

enum class Mode { untwisted, twisted };

std::string to_string(Mode mode);

// Index set with a total order, a sign function and (twisted mode) the
// weights μ_j. Basis vector x_A of L²(A(I, ε)) is stored at the bitmask whose
// bit p is set iff the p-th label of the order belongs to A.
class SpinModel {
 public:
  using SignRule = std::function<int(const Index&, const Index&)>;

  SpinModel(Mode mode, std::vector<Index> order, const SignRule& eps,
            std::vector<double> lambda = {});

  // Labels (s, j), j = 1..k, site-major; ε((s,j),(s',j')) = site_signs(s, s').
  static SpinModel untwisted(const SignFunction& site_signs, int k = 1);

  // Labels (s, -k..-1, 1..k), site-major; the lifted sign function satisfies
  // the mirror condition automatically.
  static SpinModel twisted(const SignFunction& site_signs,
                           std::vector<double> lambda);

  // Same algebra with a different total order on the labels.
  SpinModel reordered(std::vector<Index> order) const;

  Mode mode() const { return mode_; }
  int size() const { return static_cast<int>(order_.size()); }
  std::size_t dim() const { return std::size_t{1} << order_.size(); }
  int k() const { return k_; }
  int n_sites() const { return n_sites_; }

  const std::vector<Index>& order() const { return order_; }
  const Index& label(int pos) const { return order_[pos]; }
  int position(const Index& index) const;
  bool contains(const Index& index) const;

  int eps(int p, int q) const { return (neg_mask_[p] >> q) & 1U ? -1 : 1; }
  int eps(const Index& a, const Index& b) const {
    return eps(position(a), position(b));
  }

  // Π_{a ∈ set, a before p} ε(p, a), via the parity of a masked popcount.
  int left_sign(int p, std::uint64_t set) const {
    return parity(set & neg_mask_[p] & ((std::uint64_t{1} << p) - 1));
  }
  // Π_{a ∈ set, a after p} ε(p, a).
  int right_sign(int p, std::uint64_t set) const {
    return parity(set & neg_mask_[p] & ~((std::uint64_t{2} << p) - 1));
  }

  double lambda(int gen) const { return lambda_.at(std::abs(gen) - 1); }
  double mu(int gen) const { return mu_.at(std::abs(gen) - 1); }
  const std::vector<double>& lambdas() const { return lambda_; }

  // Twisted generators (s, j), j > 0, or every label in untwisted mode.
  std::vector<Index> generators() const;

  // Position of (s, -j) for the label at p (twisted mode only).
  int mirror_position(int p) const { return mirror_.at(p); }

 private:
  static int parity(std::uint64_t bits) {
    return (__builtin_popcountll(bits) & 1) ? -1 : 1;
  }

  Mode mode_;
  std::vector<Index> order_;
  std::vector<std::uint64_t> neg_mask_;
  std::vector<double> lambda_;
  std::vector<double> mu_;
  std::vector<int> mirror_;
  std::vector<std::pair<Index, int>> lookup_;  // sorted label -> position
  int k_ = 0;
  int n_sites_ = 0;
};

enum class Side { left, right };

// Sign of rewriting x_i x_A (left) or x_A x_i (right) as ±x_{A ∪ {i}}.
// Throws ContractViolation if i ∈ A.
int insertion_sign(const SpinModel& model, int pos, std::uint64_t set, Side side);

// Dense amplitude vector over the subset basis.
struct SpinVector {
  std::vector<Complex> amplitudes;

  static SpinVector zero(std::size_t dim) { return {std::vector<Complex>(dim)}; }
  static SpinVector vacuum(std::size_t dim) { return basis(dim, 0); }
  static SpinVector basis(std::size_t dim, std::uint64_t b) {
    SpinVector v = zero(dim);
    v.amplitudes.at(b) = 1.0;
    return v;
  }

  std::size_t dim() const { return amplitudes.size(); }
  Complex operator[](std::size_t b) const { return amplitudes[b]; }
};

Complex inner(const SpinVector& u, const SpinVector& v);
double max_abs_diff(const SpinVector& u, const SpinVector& v);

enum class Op {
  beta,          // β_i
  beta_star,     // β_i^*
  alpha,         // α_i
  alpha_star,    // α_i^*
  gamma,         // μ^{-1} β_i^* + μ β_{-i}        (twisted, i > 0)
  gamma_star,    // μ^{-1} β_i + μ β_{-i}^*
  delta,         // μ α_i^* + μ^{-1} α_{-i}
  delta_star,    // μ α_i + μ^{-1} α_{-i}^*
  gamma_plain,   // β_i^* + β_i
  delta_plain,   // α_i^* + α_i
};

std::string to_string(Op op);
Op adjoint(Op op);

struct Letter {
  Op op = Op::beta;
  Index index;
  Complex coef{1.0};
};

// Operator product written left to right; applied to a vector right to left.
using OperatorWord = std::vector<Letter>;

OperatorWord adjoint(const OperatorWord& word);
std::string to_string(const OperatorWord& word);

// Sparse vector keyed by basis bitmask, kept sorted and merged.
using SparseVector = std::vector<std::pair<std::uint64_t, Complex>>;

SpinVector apply_generator(const Letter& letter, const SpinVector& v,
                           const SpinModel& model);

// out += scale * letter(in)
void accumulate(const Letter& letter, const SpinVector& in, SpinVector& out,
                Complex scale, const SpinModel& model);

SpinVector apply_word(const OperatorWord& word, const SpinVector& v,
                      const SpinModel& model);
SparseVector apply_word(const OperatorWord& word, const SparseVector& v,
                        const SpinModel& model);

// φ^ε(w) = ⟨e_∅, w e_∅⟩.
Complex vacuum_state(const OperatorWord& word, const SpinModel& model);

// Linear combination of operator words.
using OperatorSum = std::vector<std::pair<Complex, OperatorWord>>;

// max over basis vectors e_b and output coordinates of |(Σ c_w w) e_b|.
double residual(const OperatorSum& sum, const SpinModel& model);

struct ResidualRow {
  std::string identity;
  double max_residual = 0.0;
  int instances = 0;
};

struct RelationReport {
  std::vector<ResidualRow> rows;
  std::size_t dim = 0;
  double tolerance = kRelationTolerance;

  bool passed() const;
  double max_residual() const;
};

// Every creation/annihilation relation on every basis vector; twisted models
// also get the γ/δ relations and the commutant inclusion.
RelationReport verify_relations(const SpinModel& model);

enum class Family { gamma, delta };

struct CyclicSpan {
  int rank = 0;
  std::vector<OperatorWord> words;  // words whose vacuum images form a basis
};

// Rank of span{w e_∅ : w a γ- (or δ-) word of length <= max_length}.
CyclicSpan cyclic_span(const SpinModel& model, int max_length,
                       Family family = Family::gamma);
int cyclic_rank(const SpinModel& model, int max_length,
                Family family = Family::gamma);

struct EnlargementReport {
  double max_discrepancy = 0.0;
  int words_checked = 0;
};

// Vacuum states of the given words agree in the small and the large model.
EnlargementReport enlargement_consistency(const SpinModel& small,
                                          const SpinModel& large,
                                          const std::vector<OperatorWord>& words);

// Deterministic random words over the given ops and labels.
std::vector<OperatorWord> random_words(const std::vector<Index>& labels,
                                       const std::vector<Op>& ops, int count,
                                       int length, std::uint64_t seed);

}  // namespace qgauss
