#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qgauss/babyfock.hpp"
#include "qgauss/qmoments.hpp"
#include "qgauss/sign_function.hpp"

namespace qgauss {

// Random sign table on N sites: off-diagonal ε(i, j) = +1 with probability
// (1+q)/2, independently per unordered pair, from a Philox block keyed by
// (seed, i, j). Any prefix of the table is the table of a smaller N.
SignFunction sample_signs(std::size_t n, double q, std::uint64_t seed);

enum class CltMode { tracial, twisted };

std::string to_string(CltMode mode);

struct CltConfig {
  CltMode mode = CltMode::tracial;
  int k = 1;
  std::vector<double> lambda;  // twisted only, one per generator, each >= 1
  double q = 0.5;
  int n = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

// Site-major model on n sites; the sign of two labels is ε(site, site').
SpinModel build_model(const CltConfig& cfg, const SignFunction& site_signs);
SpinModel build_model(const CltConfig& cfg);

// Letters of the normalized sums:
//   s<j>   s_{n,j} = n^{-1/2} Σ_i γ_{i,j}          (twisted)
//   s<j>*  its adjoint                             (twisted)
//   g<j>   (s + s^*)/2 twisted, n^{-1/2} Σ_i (β^*_{i,j} + β_{i,j}) tracial
//   g-<j>  (s - s^*)/(2i)                          (twisted)
struct SumLetter {
  enum class Kind { s, s_star, g_plus, g_minus };
  Kind kind = Kind::g_plus;
  int j = 1;

  bool operator==(const SumLetter&) const = default;
};

using SumWord = std::vector<SumLetter>;

SumWord parse_sum_word(const std::string& text);
std::string to_string(const SumWord& word);

inline constexpr int kMaxMomentLength = 8;

// φ^ε of the word at finite n, applying every site term of each letter to
// the current vector (right to left) without forming matrices.
Complex moment(const SpinModel& model, const SumWord& word);

// Closed form of φ(g^4) for the tracial k = 1 model:
// (n-1)(2+ε̄)/n + 1/n with ε̄ the mean of ε over ordered pairs of sites.
double tracial_fourth_moment_oracle(const SpinModel& model);

// Limit of the moment as n → ∞ from the pairing formula: circular
// covariances in twisted mode, unit covariances δ_ab in tracial mode.
Complex limit_value(const CltConfig& cfg, const SumWord& word);

struct ConvergenceRow {
  int n = 0;
  std::string word;
  Complex value;      // seed average
  Complex limit;
  double error = 0.0;  // |value - limit|
  std::vector<Complex> per_seed;
  bool flagged = false;  // error grew by more than the slack
};

struct ConvergenceOptions {
  std::vector<int> n_values;
  std::vector<std::uint64_t> seeds{0};
  double slack = 0.05;
};

// Rows ordered by word, then n. A row is flagged when its error exceeds the
// previous n's error for the same word by more than the slack.
std::vector<ConvergenceRow> convergence_report(const CltConfig& cfg,
                                               const std::vector<SumWord>& words,
                                               const ConvergenceOptions& options);

struct EmpiricalSpectralMeasure {
  std::vector<double> eigenvalues;
  std::vector<double> weights;  // |⟨v_i, e_∅⟩|^2

  double total_mass() const;
  // Σ f(λ_i) w_i for f(x) = x^p.
  double power_moment(int p) const;
};

double tail_mass(const EmpiricalSpectralMeasure& measure, double c);
double spectral_radius(const EmpiricalSpectralMeasure& measure);

// Dense matrix of a single self-adjoint sum letter (g<j>, g-<j>).
Eigen::MatrixXcd dense_matrix(const SpinModel& model, const SumLetter& letter);

struct TruncatedVariable {
  Eigen::MatrixXcd original;
  Eigen::MatrixXcd truncated;  // χ_{(-C,C)}(g) g
  EmpiricalSpectralMeasure measure;  // spectral measure of g in the vacuum
  double cutoff = 0.0;
  double norm = 0.0;  // operator norm of the truncation
};

// Hermitian eigendecomposition; eigenvalues with |λ| >= C are zeroed.
TruncatedVariable truncate_matrix(const Eigen::MatrixXcd& g, double c);
TruncatedVariable truncate_variable(const SpinModel& model, const SumLetter& letter,
                                    double c);

// Default cutoff 2/√(1-q) · max_j ‖f_j‖ + 0.5 with ‖f_j‖^2 the letter's
// limiting variance.
double default_cutoff(const CltConfig& cfg);

// max-norm of Δ^{it} g̃ Δ^{-it} - h(Δ^{it} g Δ^{-it}), h(x) = χ_{(-C,C)}(x) x.
double truncation_modular_covariance(const SpinModel& model, const SumLetter& letter,
                                     double t, double c);

}  // namespace qgauss
