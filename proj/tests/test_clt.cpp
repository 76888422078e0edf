#include <cmath>
#include <thread>

#include "doctest.h"
#include "qgauss/clt.hpp"

using namespace qgauss;

namespace {

CltConfig twisted(int n, std::uint64_t seed = 0, double lambda = 4.0, double q = 0.5) {
  return CltConfig{CltMode::twisted, 1, {lambda}, q, n, seed};
}

CltConfig tracial(int n, std::uint64_t seed = 0, double q = 0.5) {
  return CltConfig{CltMode::tracial, 1, {}, q, n, seed};
}

}  // namespace

TEST_CASE("sign sampling") {
  const SignFunction plus = sample_signs(20, 1.0, 3);
  const SignFunction minus = sample_signs(20, -1.0, 3);
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(plus(i, i) == -1);
    for (std::size_t j = 0; j < 20; ++j) {
      if (i == j) continue;
      CHECK(plus(i, j) == 1);
      CHECK(minus(i, j) == -1);
    }
  }
  const SignFunction fair = sample_signs(60, 0.0, 0);
  CHECK(std::abs(fair.off_diagonal_mean()) <= 3.0 / std::sqrt(60.0 * 59.0 / 2.0));
  CHECK(sample_signs(60, 0.0, 0) == fair);
  CHECK(sample_signs(25, 0.0, 0) == fair.leading(25));
  CHECK_FALSE(sample_signs(60, 0.0, 1) == fair);
  CHECK_THROWS_AS(sample_signs(4, 1.5, 0), DomainError);
}

TEST_CASE("model sizes") {
  CHECK(build_model(twisted(1)).dim() == 4);
  CHECK(build_model(twisted(10)).dim() == std::size_t{1} << 20);
  const SpinModel m = build_model(tracial(3));
  CHECK(m.dim() == 8);
  const Eigen::MatrixXcd g = dense_matrix(m, SumLetter{SumLetter::Kind::g_plus, 1});
  CHECK((g - g.adjoint()).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(build_model(twisted(13)), SizeLimitError);
  CHECK_THROWS_AS(build_model(CltConfig{CltMode::twisted, 1, {0.5}, 0.5, 2, 0}), DomainError);
  CHECK_THROWS_AS(build_model(CltConfig{CltMode::tracial, 1, {}, 0.5, 0, 0}), DomainError);
}

TEST_CASE("odd moments vanish") {
  for (int n : {1, 3, 6}) {
    const SpinModel m = build_model(twisted(n, 2));
    for (const char* w : {"s1", "s1 s1* s1", "g1 g-1 g1", "s1* g1 s1 s1 g-1"})
      CHECK(std::abs(moment(m, parse_sum_word(w))) <= 1e-14);
    const SpinModel t = build_model(tracial(n, 2));
    CHECK(std::abs(moment(t, parse_sum_word("g1 g1 g1"))) <= 1e-14);
  }
}

TEST_CASE("second moments are exact at every n") {
  for (double lambda : {1.0, 4.0, 16.0}) {
    const double mu2 = std::sqrt(lambda);
    for (int n = 1; n <= 8; ++n) {
      const SpinModel m = build_model(twisted(n, 5, lambda));
      CHECK(std::abs(moment(m, parse_sum_word("s1 s1*")) - mu2) <= 1e-12);
      CHECK(std::abs(moment(m, parse_sum_word("s1* s1")) - 1.0 / mu2) <= 1e-12);
      CHECK(std::abs(moment(m, parse_sum_word("g1 g1")) - (mu2 + 1.0 / mu2) / 4.0) <= 1e-12);
    }
  }
}

TEST_CASE("tracial fourth moment oracle") {
  CHECK(tracial_fourth_moment_oracle(build_model(tracial(1))) == doctest::Approx(1.0));
  const CltConfig cfg = tracial(2);
  CHECK(tracial_fourth_moment_oracle(build_model(cfg, SignFunction(2, 1))) ==
        doctest::Approx(2.0));
  const SumWord g4 = parse_sum_word("g1 g1 g1 g1");
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (int n = 1; n <= 10; ++n) {
      const SpinModel m = build_model(tracial(n, seed));
      CHECK(std::abs(tracial_fourth_moment_oracle(m) - moment(m, g4)) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(tracial_fourth_moment_oracle(build_model(twisted(2))), ModeError);
}

TEST_CASE("limit values") {
  CHECK(std::abs(limit_value(tracial(1), parse_sum_word("g1 g1 g1 g1")) - 2.5) < 1e-14);
  const CltConfig cfg = twisted(8);
  const CircularParams params = CircularParams::from_lambda(0.5, {4.0});
  CHECK(std::abs(limit_value(cfg, parse_sum_word("s1 s1* s1 s1*")) -
                 circular_star_moment(parse_star_word("c1 c1* c1 c1*"), params)) < 1e-14);
  // g = (s + s*)/2 expanded by hand into circular words.
  Complex expanded = 0.0;
  for (int mask = 0; mask < 16; ++mask) {
    StarWord w;
    for (int i = 0; i < 4; ++i) w.push_back({1, ((mask >> i) & 1) != 0});
    expanded += circular_star_moment(w, params) / 16.0;
  }
  CHECK(std::abs(limit_value(cfg, parse_sum_word("g1 g1 g1 g1")) - expanded) < 1e-13);
  CHECK(std::abs(limit_value(cfg, parse_sum_word("s1 s1*")) - 2.0) < 1e-14);
}

TEST_CASE("convergence report") {
  ConvergenceOptions options;
  options.n_values = {2, 5, 8};
  options.seeds = {0, 1};
  const auto rows = convergence_report(twisted(1), {parse_sum_word("s1 s1*")}, options);
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) {
    CHECK(row.error <= 1e-12);
    CHECK_FALSE(row.flagged);
    CHECK(row.per_seed.size() == 2);
  }
  options.n_values = {4, 8, 12};
  options.seeds = {0, 1, 2};
  const auto g4 = convergence_report(tracial(1), {parse_sum_word("g1 g1 g1 g1")}, options);
  CHECK(g4.back().limit == Complex(2.5));
  CHECK(g4.back().error <= 0.3);
}

TEST_CASE("reports are deterministic across threads") {
  ConvergenceOptions options;
  options.n_values = {3, 6};
  options.seeds = {4, 5};
  const std::vector<SumWord> words{parse_sum_word("s1 s1* s1 s1*"), parse_sum_word("g1 g-1")};
  const auto reference = convergence_report(twisted(1), words, options);
  std::vector<std::vector<ConvergenceRow>> results(4);
  std::vector<std::thread> pool;
  for (auto& r : results)
    pool.emplace_back([&] { r = convergence_report(twisted(1), words, options); });
  for (auto& t : pool) t.join();
  for (const auto& r : results) {
    REQUIRE(r.size() == reference.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      CHECK(r[i].value == reference[i].value);
      CHECK(r[i].per_seed == reference[i].per_seed);
    }
  }
}

TEST_CASE("truncation") {
  const SpinModel m = build_model(tracial(4, 1));
  const SumLetter g{SumLetter::Kind::g_plus, 1};
  const TruncatedVariable wide = truncate_variable(m, g, 1e9);
  CHECK((wide.truncated - wide.original).cwiseAbs().maxCoeff() == 0.0);
  CHECK(wide.measure.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  const TruncatedVariable none = truncate_variable(m, g, 1e-300);
  CHECK(none.truncated.cwiseAbs().maxCoeff() == 0.0);
  CHECK(none.norm == 0.0);

  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(2, 2);
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(truncate_matrix(bad, 1.0), ContractViolation);
  CHECK_THROWS_AS(truncate_variable(m, SumLetter{SumLetter::Kind::s, 1}, 1.0), Error);
}

TEST_CASE("truncation keeps the fourth moment") {
  const CltConfig cfg = twisted(5);
  const double c = 2.0 / std::sqrt(0.5) + 0.5;
  CHECK(default_cutoff(tracial(1)) == doctest::Approx(c));
  const SpinModel m = build_model(cfg);
  const TruncatedVariable tv = truncate_variable(m, SumLetter{SumLetter::Kind::g_plus, 1}, c);
  CHECK(tv.norm < c);
  const Eigen::MatrixXcd g2 = tv.truncated * tv.truncated;
  const Complex truncated4 = (g2 * g2)(0, 0);
  const Complex full4 = moment(m, parse_sum_word("g1 g1 g1 g1"));
  CHECK(std::abs(truncated4 - full4) <= 0.2);
  CHECK(std::abs(tv.measure.power_moment(4) - full4.real()) <= 1e-10);
}

TEST_CASE("tail mass") {
  const EmpiricalSpectralMeasure mu{{-2.0, 0.5, 3.0}, {0.25, 0.5, 0.25}};
  CHECK(tail_mass(mu, 0.0) == 1.0);
  CHECK(tail_mass(mu, 3.5) == 0.0);
  CHECK(tail_mass(mu, 2.0) == 0.5);
  CHECK(spectral_radius(mu) == 3.0);
  CHECK(mu.power_moment(2) == doctest::Approx(0.25 * 4 + 0.5 * 0.25 + 0.25 * 9));
}

TEST_CASE("truncation commutes with the modular group") {
  const SumLetter g{SumLetter::Kind::g_plus, 1};
  const SpinModel m = build_model(twisted(3));
  const double c = 2.0 / std::sqrt(0.5) + 0.5;
  CHECK(truncation_modular_covariance(m, g, 0.0, c) <= 1e-12);
  CHECK(truncation_modular_covariance(m, g, 0.7, c) <= 1e-10);
  const SpinModel flat = build_model(twisted(3, 0, 1.0));
  for (double t : {0.3, 1.1, 4.0}) CHECK(truncation_modular_covariance(flat, g, t, c) <= 1e-12);
}

TEST_CASE("sum word grammar") {
  const SumWord w = parse_sum_word("s1 s2* g3 g-1");
  REQUIRE(w.size() == 4);
  CHECK(w[1] == SumLetter{SumLetter::Kind::s_star, 2});
  CHECK(w[3] == SumLetter{SumLetter::Kind::g_minus, 1});
  CHECK(to_string(w) == "s1 s2* g3 g-1");
  try {
    parse_sum_word("s1 g1* s1");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() >= 3);
    CHECK(e.position() <= 5);
  }
  CHECK_THROWS_AS(parse_sum_word("x1"), ParseError);
  CHECK_THROWS_AS(parse_sum_word("s"), ParseError);
}
