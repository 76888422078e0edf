#include "qgauss/clt.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "qgauss/modular.hpp"
#include "qgauss/rng.hpp"

namespace qgauss {

SignFunction sample_signs(std::size_t n, double q, std::uint64_t seed) {
  if (n < 1) throw DomainError("sign sampling needs at least one site");
  if (!(q >= -1.0 && q <= 1.0)) throw DomainError("q must lie in [-1, 1]");
  const Philox4x32 rng(seed);
  const double threshold = (1.0 + q) / 2.0;
  SignFunction eps(n);
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      eps.set(i, j, rng.uniform(i, j) < threshold ? 1 : -1);
  return eps;
}

std::string to_string(CltMode mode) {
  return mode == CltMode::tracial ? "tracial" : "twisted";
}

void CltConfig::validate() const {
  if (k < 1) throw DomainError("k must be >= 1");
  if (n < 1) throw DomainError("n must be >= 1");
  if (!(q > -1.0 && q < 1.0)) throw DomainError("q must lie in (-1, 1)");
  if (mode == CltMode::twisted) {
    if (static_cast<int>(lambda.size()) != k)
      throw DomainError("twisted mode needs one lambda per generator");
    for (double l : lambda)
      if (!(l >= 1.0)) throw DomainError("lambda_j must be >= 1");
  } else if (!lambda.empty()) {
    throw DomainError("tracial mode takes no lambda");
  }
  const int bits = (mode == CltMode::twisted ? 2 : 1) * k * n;
  if (bits >= 63 || (std::size_t{1} << bits) > max_vector_dim())
    throw SizeLimitError("model dimension 2^" + std::to_string(bits) +
                         " exceeds the cap " + std::to_string(max_vector_dim()));
}

SpinModel build_model(const CltConfig& cfg, const SignFunction& site_signs) {
  cfg.validate();
  if (site_signs.size() < static_cast<std::size_t>(cfg.n))
    throw DomainError("sign table smaller than the site count");
  const SignFunction eps = site_signs.leading(cfg.n);
  return cfg.mode == CltMode::twisted ? SpinModel::twisted(eps, cfg.lambda)
                                      : SpinModel::untwisted(eps, cfg.k);
}

SpinModel build_model(const CltConfig& cfg) {
  cfg.validate();
  return build_model(cfg, sample_signs(cfg.n, cfg.q, cfg.seed));
}

// ---------------------------------------------------------------------------

SumWord parse_sum_word(const std::string& text) {
  SumWord word;
  std::size_t i = 0;
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (i < text.size()) {
    if (is_space(text[i])) {
      ++i;
      continue;
    }
    SumLetter letter;
    if (text[i] == 's') {
      letter.kind = SumLetter::Kind::s;
    } else if (text[i] == 'g') {
      letter.kind = SumLetter::Kind::g_plus;
    } else {
      throw ParseError("expected letter 's' or 'g'", i);
    }
    ++i;
    if (letter.kind == SumLetter::Kind::g_plus && i < text.size() && text[i] == '-') {
      letter.kind = SumLetter::Kind::g_minus;
      ++i;
    }
    int j = 0;
    std::size_t digits = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      j = 10 * j + (text[i] - '0');
      ++i;
      ++digits;
    }
    if (digits == 0 || j < 1) throw ParseError("expected positive generator index", i);
    letter.j = j;
    if (i < text.size() && text[i] == '*') {
      if (letter.kind != SumLetter::Kind::s)
        throw ParseError("'*' only applies to s letters", i);
      letter.kind = SumLetter::Kind::s_star;
      ++i;
    }
    if (i < text.size() && !is_space(text[i]))
      throw ParseError("unexpected character in word", i);
    word.push_back(letter);
  }
  if (word.empty()) throw ParseError("empty word", 0);
  return word;
}

std::string to_string(const SumWord& word) {
  std::ostringstream os;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i) os << ' ';
    switch (word[i].kind) {
      case SumLetter::Kind::s: os << 's' << word[i].j; break;
      case SumLetter::Kind::s_star: os << 's' << word[i].j << '*'; break;
      case SumLetter::Kind::g_plus: os << 'g' << word[i].j; break;
      case SumLetter::Kind::g_minus: os << "g-" << word[i].j; break;
    }
  }
  return os.str();
}

namespace {

// The site-independent part of a sum letter: (op, coefficient) pairs.
std::vector<std::pair<Op, Complex>> letter_ops(const SpinModel& model, const SumLetter& letter) {
  if (letter.j < 1 || letter.j > model.k())
    throw DomainError("generator index " + std::to_string(letter.j) + " out of range");
  if (model.mode() == Mode::untwisted) {
    if (letter.kind != SumLetter::Kind::g_plus)
      throw ModeError("tracial models only have g<j> letters");
    return {{Op::gamma_plain, 1.0}};
  }
  switch (letter.kind) {
    case SumLetter::Kind::s: return {{Op::gamma, 1.0}};
    case SumLetter::Kind::s_star: return {{Op::gamma_star, 1.0}};
    case SumLetter::Kind::g_plus: return {{Op::gamma, 0.5}, {Op::gamma_star, 0.5}};
    case SumLetter::Kind::g_minus: return {{Op::gamma, 0.5 / kI}, {Op::gamma_star, -0.5 / kI}};
  }
  return {};
}

// Every term of the letter, normalization included.
std::vector<Letter> letter_terms(const SpinModel& model, const SumLetter& letter) {
  const auto ops = letter_ops(model, letter);
  const double norm = 1.0 / std::sqrt(static_cast<double>(model.n_sites()));
  std::vector<Letter> out;
  for (int site = 0; site < model.n_sites(); ++site)
    for (const auto& [op, coef] : ops) out.push_back({op, {site, letter.j}, coef * norm});
  return out;
}

// Coefficients of the letter on (c_j, c_j^*) in the limit.
std::pair<Complex, Complex> circular_coefficients(const SumLetter& letter) {
  switch (letter.kind) {
    case SumLetter::Kind::s: return {1.0, 0.0};
    case SumLetter::Kind::s_star: return {0.0, 1.0};
    case SumLetter::Kind::g_plus: return {0.5, 0.5};
    case SumLetter::Kind::g_minus: return {0.5 / kI, -0.5 / kI};
  }
  return {0.0, 0.0};
}

}  // namespace

Complex moment(const SpinModel& model, const SumWord& word) {
  if (word.empty()) throw DomainError("moment word must be non-empty");
  if (static_cast<int>(word.size()) > kMaxMomentLength)
    throw SizeLimitError("moment words capped at length " + std::to_string(kMaxMomentLength));
  SpinVector current = SpinVector::vacuum(model.dim());
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    SpinVector next = SpinVector::zero(model.dim());
    for (const Letter& term : letter_terms(model, *it))
      accumulate(term, current, next, 1.0, model);
    current = std::move(next);
  }
  return current.amplitudes[0];
}

double tracial_fourth_moment_oracle(const SpinModel& model) {
  if (model.mode() != Mode::untwisted || model.k() != 1)
    throw ModeError("fourth-moment closed form needs the tracial k = 1 model");
  const int n = model.n_sites();
  double mean = 0.0;
  if (n > 1) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) sum += model.eps(Index{i, 1}, Index{j, 1});
    mean = sum / (static_cast<double>(n) * (n - 1));
  }
  return (n - 1) * (2.0 + mean) / n + 1.0 / n;
}

Complex limit_value(const CltConfig& cfg, const SumWord& word) {
  for (const SumLetter& l : word) {
    if (l.j < 1 || l.j > cfg.k)
      throw DomainError("generator index " + std::to_string(l.j) + " out of range");
    if (cfg.mode == CltMode::tracial && l.kind != SumLetter::Kind::g_plus)
      throw ModeError("tracial models only have g<j> letters");
  }
  const int p = static_cast<int>(word.size());
  if (cfg.mode == CltMode::tracial) {
    return pairing_moment(
        p, [&](int s, int t) { return Complex(word[s].j == word[t].j ? 1.0 : 0.0); }, cfg.q);
  }
  const CircularParams params = CircularParams::from_lambda(cfg.q, cfg.lambda);
  return pairing_moment(
      p,
      [&](int s, int t) {
        const auto [as, bs] = circular_coefficients(word[s]);
        const auto [at, bt] = circular_coefficients(word[t]);
        const StarLetter cs{word[s].j, false}, cs_star{word[s].j, true};
        const StarLetter ct{word[t].j, false}, ct_star{word[t].j, true};
        return as * at * circular_covariance(cs, ct, params) +
               as * bt * circular_covariance(cs, ct_star, params) +
               bs * at * circular_covariance(cs_star, ct, params) +
               bs * bt * circular_covariance(cs_star, ct_star, params);
      },
      cfg.q);
}

std::vector<ConvergenceRow> convergence_report(const CltConfig& cfg,
                                               const std::vector<SumWord>& words,
                                               const ConvergenceOptions& options) {
  if (options.seeds.empty()) throw DomainError("convergence needs at least one seed");
  if (options.n_values.empty()) throw DomainError("convergence needs at least one n");
  std::vector<ConvergenceRow> rows;
  for (const SumWord& word : words) {
    const Complex limit = limit_value(cfg, word);
    double previous = -1.0;
    for (int n : options.n_values) {
      CltConfig at = cfg;
      at.n = n;
      ConvergenceRow row;
      row.n = n;
      row.word = to_string(word);
      row.limit = limit;
      Complex total = 0.0;
      for (std::uint64_t seed : options.seeds) {
        at.seed = seed;
        const Complex value = moment(build_model(at), word);
        row.per_seed.push_back(value);
        total += value;
      }
      row.value = total / static_cast<double>(options.seeds.size());
      row.error = std::abs(row.value - limit);
      row.flagged = previous >= 0.0 && row.error > previous + options.slack;
      previous = row.error;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------

double EmpiricalSpectralMeasure::total_mass() const {
  double total = 0.0;
  for (double w : weights) total += w;
  return total;
}

double EmpiricalSpectralMeasure::power_moment(int p) const {
  double total = 0.0;
  for (std::size_t i = 0; i < eigenvalues.size(); ++i)
    total += std::pow(eigenvalues[i], p) * weights[i];
  return total;
}

double tail_mass(const EmpiricalSpectralMeasure& measure, double c) {
  double total = 0.0;
  for (std::size_t i = 0; i < measure.eigenvalues.size(); ++i)
    if (std::abs(measure.eigenvalues[i]) >= c) total += measure.weights[i];
  return total;
}

double spectral_radius(const EmpiricalSpectralMeasure& measure) {
  double r = 0.0;
  for (double e : measure.eigenvalues) r = std::max(r, std::abs(e));
  return r;
}

Eigen::MatrixXcd dense_matrix(const SpinModel& model, const SumLetter& letter) {
  if (model.dim() > max_dense_dim())
    throw SizeLimitError("dense matrices capped at dimension " + std::to_string(max_dense_dim()));
  const auto terms = letter_terms(model, letter);
  const auto dim = static_cast<Eigen::Index>(model.dim());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    const SparseVector e{{static_cast<std::uint64_t>(c), 1.0}};
    for (const Letter& term : terms)
      for (const auto& [r, v] : apply_word(OperatorWord{term}, e, model))
        m(static_cast<Eigen::Index>(r), c) += v;
  }
  return m;
}

TruncatedVariable truncate_matrix(const Eigen::MatrixXcd& g, double c) {
  if (!(c > 0.0)) throw DomainError("truncation constant must be positive");
  if (g.rows() != g.cols()) throw DomainError("truncation needs a square matrix");
  if (static_cast<std::size_t>(g.rows()) > max_dense_dim())
    throw SizeLimitError("dense matrices capped at dimension " + std::to_string(max_dense_dim()));
  const double asym = (g - g.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-10)
    throw ContractViolation("matrix is not Hermitian (residual " + std::to_string(asym) + ")");
  const Eigen::MatrixXcd h = (g + g.adjoint()) / 2.0;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  const Eigen::VectorXd& values = solver.eigenvalues();
  const Eigen::MatrixXcd& vectors = solver.eigenvectors();

  TruncatedVariable out;
  out.original = g;
  out.cutoff = c;
  Eigen::VectorXd kept(values.size());
  bool cut = false;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    kept(i) = std::abs(values(i)) < c ? values(i) : 0.0;
    cut = cut || std::abs(values(i)) >= c;
    out.norm = std::max(out.norm, std::abs(kept(i)));
    out.measure.eigenvalues.push_back(values(i));
    out.measure.weights.push_back(std::norm(vectors(0, i)));
  }
  // Nothing cut: χ ≡ 1 on the spectrum, so g̃ = g without reconstruction error.
  out.truncated = cut ? Eigen::MatrixXcd(vectors * kept.asDiagonal() * vectors.adjoint()) : g;
  return out;
}

TruncatedVariable truncate_variable(const SpinModel& model, const SumLetter& letter, double c) {
  if (letter.kind == SumLetter::Kind::s || letter.kind == SumLetter::Kind::s_star)
    throw ContractViolation("only self-adjoint letters g<j>, g-<j> can be truncated");
  return truncate_matrix(dense_matrix(model, letter), c);
}

double default_cutoff(const CltConfig& cfg) {
  double worst = 1.0;
  if (cfg.mode == CltMode::twisted) {
    worst = 0.0;
    for (double l : cfg.lambda) {
      const double mu2 = std::sqrt(l);
      worst = std::max(worst, std::sqrt((mu2 + 1.0 / mu2) / 4.0));
    }
  }
  return nu_q_bounds(cfg.q).norm_factor * worst + 0.5;
}

double truncation_modular_covariance(const SpinModel& model, const SumLetter& letter,
                                     double t, double c) {
  const Eigen::MatrixXcd g = dense_matrix(model, letter);
  const auto dim = g.rows();
  Eigen::VectorXcd phase = Eigen::VectorXcd::Ones(dim);
  if (model.mode() == Mode::twisted) {
    const ModularData data(model);
    for (Eigen::Index b = 0; b < dim; ++b)
      phase(b) = std::exp(kI * t * data.log_weight(static_cast<std::uint64_t>(b)));
  }
  auto conjugate = [&](const Eigen::MatrixXcd& m) {
    return Eigen::MatrixXcd(phase.asDiagonal() * m * phase.conjugate().asDiagonal());
  };
  const Eigen::MatrixXcd lhs = conjugate(truncate_matrix(g, c).truncated);
  const Eigen::MatrixXcd rhs = truncate_matrix(conjugate(g), c).truncated;
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

}  // namespace qgauss
