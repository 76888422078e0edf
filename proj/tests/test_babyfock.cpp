#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "qgauss/babyfock.hpp"
#include "qgauss/clt.hpp"

using namespace qgauss;

namespace {

SpinModel chain(int sites, const std::vector<std::pair<int, int>>& anticommuting) {
  SignFunction signs(sites, 1);
  for (auto [a, b] : anticommuting) signs.set(a, b, -1);
  return SpinModel::untwisted(signs);
}

int naive_sign(const SpinModel& m, int p, std::uint64_t set, Side side) {
  int sign = 1;
  for (int a = 0; a < m.size(); ++a) {
    if (!((set >> a) & 1)) continue;
    if ((side == Side::left && a < p) || (side == Side::right && a > p)) sign *= m.eps(p, a);
  }
  return sign;
}

Letter L(Op op, Index i, Complex c = 1.0) { return {op, i, c}; }

std::vector<SpinVector> columns(const OperatorWord& w, const SpinModel& m) {
  std::vector<SpinVector> out;
  for (std::uint64_t b = 0; b < m.dim(); ++b)
    out.push_back(apply_word(w, SpinVector::basis(m.dim(), b), m));
  return out;
}

}  // namespace

TEST_CASE("insertion sign examples") {
  const SpinModel m = chain(3, {{0, 1}});
  CHECK(insertion_sign(m, 1, 0, Side::left) == 1);
  CHECK(insertion_sign(m, 1, 0b001, Side::left) == -1);
  CHECK(insertion_sign(m, 1, 0b101, Side::left) == -1);
  CHECK(insertion_sign(m, 1, 0b101, Side::right) == 1);
  CHECK_THROWS_AS(insertion_sign(m, 1, 0b010, Side::left), ContractViolation);
}

TEST_CASE("insertion sign agrees with a naive product") {
  std::mt19937_64 rng(17);
  int cases = 0;
  for (std::uint64_t seed = 0; cases < 10000; ++seed) {
    const SpinModel m = SpinModel::twisted(sample_signs(4, 0.0, seed), {2.0, 3.0});
    for (int rep = 0; rep < 100; ++rep, ++cases) {
      const int p = static_cast<int>(rng() % m.size());
      const std::uint64_t set = (rng() % m.dim()) & ~(std::uint64_t{1} << p);
      const Side side = rng() & 1 ? Side::left : Side::right;
      REQUIRE(insertion_sign(m, p, set, side) == naive_sign(m, p, set, side));
    }
  }
}

TEST_CASE("sign tables of lifted models") {
  const SignFunction signs = sample_signs(3, 0.0, 4);
  const SpinModel m = SpinModel::twisted(signs, {4.0, 2.0});
  CHECK(m.dim() == 1u << 12);
  for (int p = 0; p < m.size(); ++p) {
    CHECK(m.eps(p, p) == -1);
    for (int q = 0; q < m.size(); ++q) {
      CHECK(m.eps(p, q) == m.eps(q, p));
      if (p != q && m.label(p).site != m.label(q).site)
        CHECK(m.eps(p, q) == signs(m.label(p).site, m.label(q).site));
      const Index a = m.label(p), b = m.label(q);
      CHECK(m.eps(a, b) == m.eps(Index{a.site, -a.gen}, Index{b.site, std::abs(b.gen)}));
    }
  }
  CHECK(m.mu(1) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(SpinModel::twisted(signs, {0.5, 2.0}), DomainError);
}

TEST_CASE("generator action examples") {
  const SpinModel m = SpinModel::twisted(SignFunction(1), {4.0});
  const Index i{0, 1};
  const std::size_t d = m.dim();
  const auto vac = SpinVector::vacuum(d);
  const std::uint64_t bit_i = std::uint64_t{1} << m.position(i);

  const SpinVector created = apply_generator(L(Op::beta_star, i), vac, m);
  CHECK(max_abs_diff(created, SpinVector::basis(d, bit_i)) == 0.0);
  CHECK(max_abs_diff(apply_generator(L(Op::beta_star, i), created, m), SpinVector::zero(d)) ==
        0.0);

  const SpinVector g = apply_generator(L(Op::gamma, i), vac, m);
  CHECK(std::abs(g[bit_i] - 1.0 / std::sqrt(2.0)) < 1e-15);

  CHECK(max_abs_diff(apply_word({}, created, m), created) == 0.0);
  CHECK(max_abs_diff(apply_word({L(Op::beta, i), L(Op::beta_star, i)}, vac, m), vac) == 0.0);
  for (std::uint64_t b = 0; b < d; ++b)
    CHECK(max_abs_diff(apply_word({L(Op::gamma, i), L(Op::gamma, i)}, SpinVector::basis(d, b), m),
                       SpinVector::zero(d)) < 1e-15);
}

TEST_CASE("vacuum state examples") {
  const SpinModel m = SpinModel::twisted(sample_signs(2, 0.0, 1), {4.0});
  const Index i{1, 1};
  CHECK(vacuum_state({}, m) == Complex(1.0));
  CHECK(std::abs(vacuum_state({L(Op::gamma, i), L(Op::gamma_star, i)}, m) - 2.0) < 1e-14);
  CHECK(std::abs(vacuum_state({L(Op::gamma_star, i), L(Op::gamma, i)}, m) - 0.5) < 1e-14);

  const SpinModel u = chain(3, {{0, 2}});
  for (int mask = 1; mask < 8; ++mask) {
    OperatorWord monomial;
    for (int s = 0; s < 3; ++s)
      if ((mask >> s) & 1) monomial.push_back(L(Op::gamma_plain, {s, 1}));
    CHECK(vacuum_state(monomial, u) == Complex(0.0));
  }
}

TEST_CASE("untwisted generators are self-adjoint symmetries") {
  const SpinModel m = chain(4, {{0, 1}, {1, 3}, {2, 3}});
  for (const Index& i : m.generators()) {
    const auto cols = columns({L(Op::gamma_plain, i)}, m);
    for (std::uint64_t a = 0; a < m.dim(); ++a)
      for (std::uint64_t b = 0; b < m.dim(); ++b)
        CHECK(cols[b][a] == std::conj(cols[a][b]));
    const auto squares = columns({L(Op::gamma_plain, i), L(Op::gamma_plain, i)}, m);
    for (std::uint64_t b = 0; b < m.dim(); ++b)
      CHECK(max_abs_diff(squares[b], SpinVector::basis(m.dim(), b)) == 0.0);
  }
}

TEST_CASE("annihilators are adjoint to creators") {
  const SpinModel m = SpinModel::twisted(sample_signs(2, 0.0, 7), {4.0, 9.0});
  const std::vector<Op> ops{Op::beta,  Op::beta_star,  Op::alpha, Op::alpha_star, Op::gamma,
                            Op::gamma_star, Op::delta, Op::delta_star};
  double worst = 0.0;
  for (Op op : ops) {
    const bool generator_only = op >= Op::gamma;
    for (const Index& i : generator_only ? m.generators() : m.order()) {
      const auto forward = columns({L(op, i)}, m);
      const auto backward = columns({L(adjoint(op), i)}, m);
      for (std::uint64_t u = 0; u < m.dim(); ++u)
        for (std::uint64_t v = 0; v < m.dim(); ++v)
          worst = std::max(worst, std::abs(forward[u][v] - std::conj(backward[v][u])));
    }
  }
  CHECK(worst == 0.0);
}

TEST_CASE("relation suites pass") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const SignFunction signs = sample_signs(3, 0.0, seed);
    const RelationReport plain = verify_relations(SpinModel::untwisted(signs, 2));
    CHECK(plain.passed());
    const RelationReport twisted = verify_relations(SpinModel::twisted(signs, {4.0}));
    CHECK(twisted.passed());
    CHECK(twisted.rows.size() > plain.rows.size());
    for (const ResidualRow& row : twisted.rows) CHECK(row.instances > 0);
  }
}

TEST_CASE("relation suite respects the verification cap") {
  CHECK_THROWS_AS(verify_relations(SpinModel::untwisted(SignFunction(15))), SizeLimitError);
}

TEST_CASE("cyclic rank") {
  const SpinModel m = SpinModel::twisted(SignFunction(1), {4.0});
  CHECK(cyclic_rank(m, 2) == 4);
  CHECK(cyclic_rank(m, 2, Family::delta) == 4);
  const SpinModel big = SpinModel::twisted(sample_signs(2, 0.0, 3), {4.0, 16.0});
  CHECK(cyclic_rank(big, big.size()) == static_cast<int>(big.dim()));
  CHECK(cyclic_rank(big, big.size(), Family::delta) == static_cast<int>(big.dim()));
  const CyclicSpan span = cyclic_span(big, big.size());
  CHECK(span.words.size() == big.dim());
  CHECK(cyclic_rank(SpinModel(Mode::untwisted, {}, [](const Index&, const Index&) { return 1; }),
                    0) == 1);
}

TEST_CASE("mode errors") {
  const SpinModel u = chain(2, {});
  CHECK_THROWS_AS(apply_generator(L(Op::gamma, {0, 1}), SpinVector::vacuum(u.dim()), u), ModeError);
  CHECK_THROWS_AS(apply_generator(L(Op::delta_star, {0, 1}), SpinVector::vacuum(u.dim()), u),
                  ModeError);
}

TEST_CASE("dimension cap") {
  CHECK_THROWS_AS(SpinModel::twisted(SignFunction(13), {4.0}), SizeLimitError);
  CHECK_NOTHROW(SpinModel::twisted(SignFunction(10), {4.0}));
}

TEST_CASE("vacuum states do not depend on the basis order") {
  const SpinModel m = SpinModel::twisted(sample_signs(2, 0.0, 9), {4.0});
  std::vector<Index> order = m.order();
  std::reverse(order.begin(), order.end());
  const SpinModel flipped = m.reordered(order);
  std::vector<Index> shuffled = m.order();
  std::swap(shuffled[0], shuffled[2]);
  const SpinModel swapped = m.reordered(shuffled);

  const auto labels = m.order();
  auto words = random_words(labels, {Op::beta, Op::beta_star}, 200, 4, 1);
  const auto gd = random_words(m.generators(),
                               {Op::gamma, Op::gamma_star, Op::delta, Op::delta_star}, 200, 4, 2);
  words.insert(words.end(), gd.begin(), gd.end());
  double worst = 0.0;
  for (const auto& w : words) {
    const Complex v = vacuum_state(w, m);
    worst = std::max(worst, std::abs(v - vacuum_state(w, flipped)));
    worst = std::max(worst, std::abs(v - vacuum_state(w, swapped)));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("enlargement consistency") {
  const SignFunction big_signs = sample_signs(4, 0.0, 6);
  const SpinModel small = SpinModel::untwisted(big_signs.leading(2));
  const SpinModel large = SpinModel::untwisted(big_signs);
  const auto words = random_words(small.order(), {Op::beta, Op::beta_star}, 20, 4, 5);
  const EnlargementReport r = enlargement_consistency(small, large, words);
  CHECK(r.words_checked == 20);
  CHECK(r.max_discrepancy <= 1e-12);
  CHECK(enlargement_consistency(small, large, {{}}).max_discrepancy == 0.0);
  const OperatorWord number{L(Op::beta_star, {0, 1}), L(Op::beta, {0, 1})};
  CHECK(enlargement_consistency(small, large, {number}).max_discrepancy == 0.0);

  SignFunction other = big_signs;
  other.set(0, 1, -big_signs(0, 1));
  CHECK_THROWS_AS(enlargement_consistency(small, SpinModel::untwisted(other), words), DomainError);
}

TEST_CASE("disjoint generator groups are independent") {
  const SpinModel m = SpinModel::twisted(SignFunction(1), {4.0, 9.0});
  const auto first = random_words({Index{0, 1}}, {Op::gamma, Op::gamma_star}, 60, 3, 11);
  const auto second = random_words({Index{0, 2}}, {Op::gamma, Op::gamma_star}, 60, 3, 12);
  double worst = 0.0;
  for (std::size_t w = 0; w < first.size(); ++w) {
    OperatorWord joint = first[w];
    joint.insert(joint.end(), second[w].begin(), second[w].end());
    const Complex factored = vacuum_state(first[w], m) * vacuum_state(second[w], m);
    worst = std::max(worst, std::abs(vacuum_state(joint, m) - factored));
  }
  CHECK(worst <= 1e-12);
}
