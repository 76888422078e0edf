#include "qgauss/qmoments.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

#include "qgauss/partitions.hpp"

namespace qgauss {

Complex pairing_moment(int p, const CovarianceKernel& cov, double q) {
  if (p < 1) throw DomainError("moment word must be non-empty");
  if (p > 2 * kDefaultPartitionCap)
    throw SizeLimitError("pairing sums capped at word length " +
                         std::to_string(2 * kDefaultPartitionCap));
  if (p % 2 == 1) return 0.0;
  const int r = p / 2;

  std::vector<Complex> table(static_cast<std::size_t>(p * p), 0.0);
  for (int s = 0; s < p; ++s)
    for (int t = s + 1; t < p; ++t) table[s * p + t] = cov(s, t);

  std::vector<double> q_power(r * (r - 1) / 2 + 1, 1.0);
  for (std::size_t i = 1; i < q_power.size(); ++i) q_power[i] = q_power[i - 1] * q;

  const PartitionTable& parts = partition_table(r);
  Complex total = 0.0;
  for (std::size_t idx = 0; idx < parts.partitions.size(); ++idx) {
    Complex product = q_power[parts.crossing_counts[idx]];
    for (const auto& [s, t] : parts.partitions[idx].blocks) {
      product *= table[(s - 1) * p + (t - 1)];
      if (product == Complex(0.0)) break;
    }
    total += product;
  }
  return total;
}

// ---------------------------------------------------------------------------

CircularParams::CircularParams(double q, std::vector<double> mu)
    : q_(q), mu_(std::move(mu)) {
  if (!(q_ > -1.0 && q_ < 1.0)) throw DomainError("q must lie in (-1, 1)");
  for (double m : mu_)
    if (!(m >= 1.0)) throw DomainError("circular weights must satisfy mu >= 1");
}

CircularParams CircularParams::from_lambda(double q,
                                           const std::vector<double>& lambda) {
  std::vector<double> mu;
  mu.reserve(lambda.size());
  for (double l : lambda) {
    if (!(l >= 1.0)) throw DomainError("eigenvalues lambda_j must be >= 1");
    mu.push_back(std::pow(l, 0.25));
  }
  return CircularParams(q, std::move(mu));
}

double CircularParams::lambda(int j) const {
  const double m = mu(j);
  return m * m * m * m;
}

Complex circular_covariance(const StarLetter& first, const StarLetter& second,
                            const CircularParams& params) {
  if (first.j < 1 || first.j > params.k() || second.j < 1 ||
      second.j > params.k())
    throw DomainError("circular generator index out of range");
  if (first.j != second.j || first.k() != -second.k()) return 0.0;
  return std::pow(params.mu(first.j), 2 * first.k());
}

Complex circular_star_moment(const StarWord& word, const CircularParams& params) {
  return pairing_moment(
      static_cast<int>(word.size()),
      [&](int s, int t) { return circular_covariance(word[s], word[t], params); },
      params.q());
}

StarWord parse_star_word(const std::string& text) {
  StarWord word;
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    // s<j> names the same limit variable as c<j>.
    if (text[i] != 'c' && text[i] != 's') throw ParseError("expected letter 'c' or 's'", start);
    ++i;
    std::size_t digits = 0;
    int j = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      j = 10 * j + (text[i] - '0');
      ++i;
      ++digits;
    }
    if (digits == 0 || j < 1)
      throw ParseError("expected positive generator index", i);
    StarLetter letter{j, false};
    if (i < text.size() && text[i] == '*') {
      letter.star = true;
      ++i;
    }
    if (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])))
      throw ParseError("unexpected character in word", i);
    word.push_back(letter);
  }
  if (word.empty()) throw ParseError("empty word", 0);
  return word;
}

std::string to_string(const StarWord& word) {
  std::ostringstream os;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i) os << ' ';
    os << 'c' << word[i].j << (word[i].star ? "*" : "");
  }
  return os.str();
}

NuQBounds nu_q_bounds(double q) {
  if (!(q > -1.0 && q < 1.0)) throw DomainError("q must lie in (-1, 1)");
  const double factor = 2.0 / std::sqrt(1.0 - q);
  return {-factor, factor, factor};
}

// ---------------------------------------------------------------------------

FockVector FockVector::vacuum() { return basis({}, 1.0); }

FockVector FockVector::basis(const TensorWord& word, Complex coef) {
  FockVector v;
  v.add(word, coef);
  return v;
}

void FockVector::add(const TensorWord& word, Complex coef) {
  if (coef == Complex(0.0)) return;
  auto [it, inserted] = terms_.try_emplace(word, coef);
  if (!inserted) {
    it->second += coef;
    if (it->second == Complex(0.0)) terms_.erase(it);
  }
}

int FockVector::max_level() const {
  int level = 0;
  for (const auto& [w, c] : terms_) level = std::max(level, static_cast<int>(w.size()));
  return level;
}

Complex FockVector::coefficient(const TensorWord& word) const {
  const auto it = terms_.find(word);
  return it == terms_.end() ? Complex(0.0) : it->second;
}

FockVector& FockVector::operator+=(const FockVector& other) {
  for (const auto& [w, c] : other.terms_) add(w, c);
  return *this;
}

FockVector FockVector::operator*(Complex scale) const {
  FockVector out;
  for (const auto& [w, c] : terms_) out.add(w, c * scale);
  return out;
}

namespace {

TensorWord without(const TensorWord& w, std::size_t pos) {
  TensorWord out;
  out.reserve(w.size() - 1);
  for (std::size_t i = 0; i < w.size(); ++i)
    if (i != pos) out.push_back(w[i]);
  return out;
}

}  // namespace

Complex qfock_inner(const TensorWord& u, const TensorWord& v, double q) {
  if (u.size() != v.size())
    throw DomainError("q-inner product between different tensor levels");
  if (u.empty()) return 1.0;
  // ⟨h1⊗..⊗hn, g1⊗..⊗gn⟩ = Σ_l q^{l-1} ⟨h1, g_l⟩ ⟨h2⊗..⊗hn, g without g_l⟩
  const TensorWord tail(u.begin() + 1, u.end());
  Complex total = 0.0;
  double weight = 1.0;
  for (std::size_t l = 0; l < v.size(); ++l, weight *= q) {
    if (v[l] != u[0]) continue;
    total += weight * qfock_inner(tail, without(v, l), q);
  }
  return total;
}

Complex qfock_inner(const FockVector& u, const FockVector& v, double q) {
  Complex total = 0.0;
  for (const auto& [wu, cu] : u.terms())
    for (const auto& [wv, cv] : v.terms())
      if (wu.size() == wv.size())
        total += std::conj(cu) * cv * qfock_inner(wu, wv, q);
  return total;
}

FockVector qfock_apply(std::span<const FockLetter> word, const FockVector& v,
                       double q, int level_cutoff) {
  FockVector current = v;
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    const FockLetter& letter = *it;
    FockVector next;
    for (const auto& [w, c] : current.terms()) {
      if (letter.create) {
        if (static_cast<int>(w.size()) + 1 > level_cutoff)
          throw SizeLimitError("q-Fock level cutoff " +
                               std::to_string(level_cutoff) + " exceeded");
        for (std::size_t b = 0; b < letter.h.size(); ++b) {
          if (letter.h[b] == Complex(0.0)) continue;
          TensorWord grown;
          grown.reserve(w.size() + 1);
          grown.push_back(static_cast<int>(b));
          grown.insert(grown.end(), w.begin(), w.end());
          next.add(grown, letter.h[b] * c);
        }
      } else {
        // a(h)(g1⊗..⊗gn) = Σ_l q^{l-1} ⟨h, g_l⟩ g1⊗..ĝ_l..⊗gn
        double weight = 1.0;
        for (std::size_t l = 0; l < w.size(); ++l, weight *= q) {
          const auto b = static_cast<std::size_t>(w[l]);
          if (b >= letter.h.size() || letter.h[b] == Complex(0.0)) continue;
          next.add(without(w, l), weight * std::conj(letter.h[b]) * c);
        }
      }
    }
    current = std::move(next);
  }
  return current;
}

FockVector ou_apply(double t, const FockVector& v) {
  if (t < 0.0) throw DomainError("Ornstein-Uhlenbeck time must be >= 0");
  FockVector out;
  for (const auto& [w, c] : v.terms())
    out.add(w, c * std::exp(-t * static_cast<double>(w.size())));
  return out;
}

}  // namespace qgauss
