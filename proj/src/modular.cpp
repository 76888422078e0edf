#include "qgauss/modular.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

namespace qgauss {

namespace {

void require_twisted(const SpinModel& model) {
  if (model.mode() != Mode::twisted)
    throw ModeError("modular data needs a twisted model");
}

constexpr std::size_t kDenseModularDim = std::size_t{1} << 10;

}  // namespace

ModularData::ModularData(const SpinModel& model) : model_(model) {
  require_twisted(model_);
  const int n = model_.size();
  std::vector<double> bit_weight(n);
  for (int p = 0; p < n; ++p) {
    const Index& idx = model_.label(p);
    bit_weight[p] = (idx.gen > 0 ? 1.0 : -1.0) * std::log(model_.lambda(idx.gen));
  }
  log_weight_.assign(model_.dim(), 0.0);
  for (std::uint64_t b = 1; b < model_.dim(); ++b) {
    const int low = __builtin_ctzll(b);
    log_weight_[b] = log_weight_[b & (b - 1)] + bit_weight[low];
  }
  keep_mask_.assign(n, 0);
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q)
      if (model_.mirror_position(q) > model_.mirror_position(p) && model_.eps(p, q) == -1)
        keep_mask_[p] |= std::uint64_t{1} << q;
}

std::uint64_t ModularData::j_target(std::uint64_t b) const {
  std::uint64_t out = 0;
  for (std::uint64_t rest = b; rest != 0; rest &= rest - 1)
    out |= std::uint64_t{1} << model_.mirror_position(__builtin_ctzll(rest));
  return out;
}

int ModularData::j_sign(std::uint64_t b) const {
  int parity = 0;
  for (std::uint64_t rest = b; rest != 0; rest &= rest - 1)
    parity ^= __builtin_popcountll(b & keep_mask_[__builtin_ctzll(rest)]) & 1;
  return parity ? -1 : 1;
}

std::vector<int> ModularData::delta_exponents(std::uint64_t b) const {
  std::vector<int> out(static_cast<std::size_t>(model_.n_sites() * model_.k()), 0);
  for (std::uint64_t rest = b; rest != 0; rest &= rest - 1) {
    const Index& idx = model_.label(__builtin_ctzll(rest));
    out[idx.site * model_.k() + std::abs(idx.gen) - 1] += idx.gen > 0 ? 1 : -1;
  }
  return out;
}

SpinVector delta_apply(const SpinVector& v, const SpinModel& model, Complex power) {
  const ModularData data(model);
  SpinVector out = v;
  for (std::size_t b = 0; b < out.dim(); ++b)
    out.amplitudes[b] *= std::exp(power * data.log_weight(b));
  return out;
}

SparseVector delta_apply(const SparseVector& v, const ModularData& data, Complex power) {
  SparseVector out = v;
  for (auto& [b, c] : out) c *= std::exp(power * data.log_weight(b));
  return out;
}

SpinVector j_apply(const SpinVector& v, const SpinModel& model) {
  const ModularData data(model);
  SpinVector out = SpinVector::zero(v.dim());
  for (std::size_t b = 0; b < v.dim(); ++b)
    out.amplitudes[data.j_target(b)] =
        static_cast<double>(data.j_sign(b)) * std::conj(v.amplitudes[b]);
  return out;
}

SparseVector j_apply(const SparseVector& v, const ModularData& data) {
  SparseVector out;
  out.reserve(v.size());
  for (const auto& [b, c] : v)
    out.emplace_back(data.j_target(b), static_cast<double>(data.j_sign(b)) * std::conj(c));
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

SpinVector s_apply(const SpinVector& v, const SpinModel& model) {
  return j_apply(delta_apply(v, model, 0.5), model);
}

SparseVector s_apply(const SparseVector& v, const ModularData& data) {
  return j_apply(delta_apply(v, data, 0.5), data);
}

Complex sigma_generator(Complex z, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  return std::exp(kI * z * std::log(lambda));
}

std::pair<Complex, Complex> sigma_gaussian_rotation(Complex z, int j, double lambda) {
  if (!(lambda >= 1.0)) throw DomainError("lambda_j must be >= 1");
  if (j == 0) throw DomainError("generator index must be non-zero");
  const Complex theta = z * std::log(lambda);
  const double sign = j > 0 ? -1.0 : 1.0;
  return {std::cos(theta), sign * std::sin(theta)};
}

bool ModularReport::passed() const { return max_residual() <= tolerance; }

double ModularReport::max_residual() const {
  double worst = 0.0;
  for (const auto& row : rows) worst = std::max(worst, row.max_residual);
  return worst;
}

std::vector<OperatorWord> all_words(const std::vector<Letter>& letters, int max_length) {
  std::vector<OperatorWord> out;
  std::vector<OperatorWord> level{{}};
  for (int len = 1; len <= max_length; ++len) {
    std::vector<OperatorWord> next;
    next.reserve(level.size() * letters.size());
    for (const auto& w : level) {
      for (const Letter& l : letters) {
        OperatorWord grown = w;
        grown.push_back(l);
        next.push_back(std::move(grown));
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    level = std::move(next);
  }
  return out;
}

namespace {

double sparse_diff(SparseVector a, const SparseVector& b) {
  for (const auto& [idx, c] : b) a.emplace_back(idx, -c);
  std::sort(a.begin(), a.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size();) {
    Complex sum = 0.0;
    std::size_t j = i;
    for (; j < a.size() && a[j].first == a[i].first; ++j) sum += a[j].second;
    worst = std::max(worst, std::abs(sum));
    i = j;
  }
  return worst;
}

SparseVector scaled(SparseVector v, Complex s) {
  for (auto& e : v) e.second *= s;
  return v;
}

SparseVector add(SparseVector a, const SparseVector& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  SparseVector out;
  for (const auto& e : a) {
    if (!out.empty() && out.back().first == e.first)
      out.back().second += e.second;
    else
      out.push_back(e);
  }
  return out;
}

Complex vacuum_coef(const SparseVector& v) {
  return !v.empty() && v.front().first == 0 ? v.front().second : Complex(0.0);
}

class RowSink {
 public:
  void put(const std::string& name, double value) {
    for (auto& row : rows_) {
      if (row.identity == name) {
        row.max_residual = std::max(row.max_residual, value);
        ++row.instances;
        return;
      }
    }
    rows_.push_back({name, value, 1});
  }
  std::vector<ResidualRow> take() { return std::move(rows_); }

 private:
  std::vector<ResidualRow> rows_;
};

}  // namespace

ModularReport verify_modular(const SpinModel& model) {
  require_twisted(model);
  if (model.dim() > max_verify_dim())
    throw SizeLimitError("modular verification capped at dimension " +
                         std::to_string(max_verify_dim()));
  const ModularData data(model);
  const std::size_t dim = model.dim();
  const auto gens = model.generators();
  RowSink sink;

  std::vector<Letter> gamma_letters;
  for (const Index& g : gens) {
    gamma_letters.push_back({Op::gamma, g, 1.0});
    gamma_letters.push_back({Op::gamma_star, g, 1.0});
  }
  const SparseVector vac{{0, 1.0}};

  // S as the closure of w e_0 -> w^* e_0, solved from a spanning family of
  // words and compared with J Δ^{1/2} on every basis vector.
  if (dim <= kDenseModularDim) {
    const CyclicSpan span = cyclic_span(model, model.size(), Family::gamma);
    if (span.rank != static_cast<int>(dim))
      throw ContractViolation("vacuum is not cyclic; S is not defined");
    Eigen::MatrixXcd images(dim, dim);
    Eigen::MatrixXcd adjoint_images(dim, dim);
    for (std::size_t c = 0; c < dim; ++c) {
      const SpinVector v = apply_word(span.words[c], SpinVector::vacuum(dim), model);
      const SpinVector w = apply_word(adjoint(span.words[c]), SpinVector::vacuum(dim), model);
      for (std::size_t r = 0; r < dim; ++r) {
        images(r, c) = v.amplitudes[r];
        adjoint_images(r, c) = w.amplitudes[r];
      }
    }
    const Eigen::MatrixXcd coords = images.fullPivLu().inverse();
    // Antilinear: S e_b = W conj(V^{-1} e_b).
    const Eigen::MatrixXcd s_matrix = adjoint_images * coords.conjugate();
    double worst = 0.0;
    for (std::uint64_t b = 0; b < dim; ++b) {
      const SparseVector js = s_apply(SparseVector{{b, 1.0}}, data);
      SpinVector dense = SpinVector::zero(dim);
      for (const auto& [idx, c] : js) dense.amplitudes[idx] = c;
      for (std::size_t r = 0; r < dim; ++r)
        worst = std::max(worst, std::abs(dense.amplitudes[r] - s_matrix(r, b)));
    }
    sink.put("S = J Delta^{1/2}", worst);
  }

  const auto words = all_words(gamma_letters, 4);
  for (const auto& w : words) {
    const SparseVector lhs = s_apply(apply_word(w, vac, model), data);
    const SparseVector rhs = apply_word(adjoint(w), vac, model);
    sink.put("S(w e_0) = w^* e_0 (gamma-words, length <= 4)", sparse_diff(lhs, rhs));
  }

  for (std::uint64_t b = 0; b < dim; ++b) {
    const SparseVector e{{b, 1.0}};
    const SparseVector je = j_apply(e, data);
    sink.put("J^2 = Id", sparse_diff(j_apply(je, data), e));
    sink.put("J Delta J = Delta^{-1}",
             sparse_diff(j_apply(delta_apply(je, data, 1.0), data), delta_apply(e, data, -1.0)));

    for (const double t : {0.3, 1.7}) {
      const Complex it(0.0, t);
      for (const Index& g : gens) {
        const Complex phase = sigma_generator(t, model.lambda(g.gen));
        for (const bool star : {false, true}) {
          const OperatorWord word{{star ? Op::gamma_star : Op::gamma, g, 1.0}};
          const SparseVector lhs =
              delta_apply(apply_word(word, delta_apply(e, data, -it), model), data, it);
          const SparseVector rhs =
              scaled(apply_word(word, e, model), star ? std::conj(phase) : phase);
          sink.put("Delta^{it} gamma_j Delta^{-it} = lambda_j^{it} gamma_j", sparse_diff(lhs, rhs));
        }
      }
    }

    for (const Complex z : {Complex(0.0, -1.0), Complex(0.4, -0.3)}) {
      for (const Index& g : gens) {
        const OperatorWord word{{Op::gamma, g, 1.0}};
        const Complex iz = kI * z;
        const SparseVector lhs =
            delta_apply(apply_word(word, delta_apply(e, data, -iz), model), data, iz);
        const SparseVector rhs = scaled(apply_word(word, e, model),
                                        sigma_generator(z, model.lambda(g.gen)));
        sink.put("Delta^{iz} gamma_j Delta^{-iz} = sigma_z factor (complex z)",
                 sparse_diff(lhs, rhs));
      }
    }

    for (const Index& label : model.order()) {
      const Index mirror{label.site, -label.gen};
      const SparseVector jbj =
          j_apply(apply_word({{Op::beta, label, 1.0}}, je, model), data);
      sink.put("J beta_j J = alpha_{-j}",
               sparse_diff(jbj, apply_word({{Op::alpha, mirror, 1.0}}, e, model)));
    }
    for (const Index& g : gens) {
      const SparseVector jgj = j_apply(apply_word({{Op::gamma, g, 1.0}}, je, model), data);
      sink.put("J gamma_j J = delta_j^*",
               sparse_diff(jgj, apply_word({{Op::delta_star, g, 1.0}}, e, model)));
    }
  }

  // Gaussian pair rotation: Δ^{it} g_{±j} Δ^{-it} in the (g_j, g_{-j}) pair.
  for (const double t : {0.3, 1.7}) {
    const Complex it(0.0, t);
    for (const Index& g : gens) {
      const double lambda = model.lambda(g.gen);
      const OperatorWord g_plus{{Op::gamma, g, 0.5}};
      const OperatorWord g_plus_s{{Op::gamma_star, g, 0.5}};
      const OperatorWord g_minus{{Op::gamma, g, 0.5 / kI}};
      const OperatorWord g_minus_s{{Op::gamma_star, g, -0.5 / kI}};
      for (std::uint64_t b = 0; b < dim; ++b) {
        const SparseVector e{{b, 1.0}};
        const SparseVector shifted = delta_apply(e, data, -it);
        auto apply_pair = [&](const OperatorWord& a, const OperatorWord& s, const SparseVector& v) {
          return add(apply_word(a, v, model), apply_word(s, v, model));
        };
        const SparseVector plus_rot = delta_apply(apply_pair(g_plus, g_plus_s, shifted), data, it);
        const SparseVector minus_rot = delta_apply(apply_pair(g_minus, g_minus_s, shifted), data, it);
        const SparseVector plus_e = apply_pair(g_plus, g_plus_s, e);
        const SparseVector minus_e = apply_pair(g_minus, g_minus_s, e);
        const auto [a_plus, b_plus] = sigma_gaussian_rotation(t, g.gen, lambda);
        const auto [a_minus, b_minus] = sigma_gaussian_rotation(t, -g.gen, lambda);
        sink.put("sigma_t(g_j) = cos g_j - sin g_-j",
                 sparse_diff(plus_rot, add(scaled(plus_e, a_plus), scaled(minus_e, b_plus))));
        sink.put("sigma_t(g_-j) = cos g_-j + sin g_j",
                 sparse_diff(minus_rot, add(scaled(minus_e, a_minus), scaled(plus_e, b_minus))));
      }
    }
  }

  // State invariance and the KMS exchange on vacuum expectations.
  for (const auto& w : words) {
    const Complex base = vacuum_state(w, model);
    for (const double t : {0.3, 1.7}) {
      const Complex it(0.0, t);
      const Complex conj_value = vacuum_coef(delta_apply(apply_word(w, vac, model), data, it));
      sink.put("phi(Delta^{it} w Delta^{-it}) = phi(w)", std::abs(conj_value - base));
      Complex phase = 1.0;
      for (const Letter& l : w) {
        const Complex f = sigma_generator(t, model.lambda(l.index.gen));
        phase *= l.op == Op::gamma ? f : std::conj(f);
      }
      sink.put("phi(sigma_t(w)) = phi(w) (phase rule)", std::abs(phase * base - base));
    }
    if (w.size() <= 3) {
      for (const Index& g : gens) {
        OperatorWord left{{Op::gamma, g, 1.0}};
        left.insert(left.end(), w.begin(), w.end());
        OperatorWord right = w;
        right.push_back({Op::gamma, g, 1.0});
        sink.put("KMS: phi(gamma_j y) = lambda_j phi(y gamma_j)",
                 std::abs(vacuum_state(left, model) -
                          model.lambda(g.gen) * vacuum_state(right, model)));
      }
    }
  }

  ModularReport report;
  report.rows = sink.take();
  report.dim = dim;
  std::ostringstream params;
  params << "k=" << model.k() << " n_sites=" << model.n_sites() << " lambda=[";
  for (std::size_t i = 0; i < model.lambdas().size(); ++i)
    params << (i ? "," : "") << model.lambdas()[i];
  params << "]";
  report.params = params.str();
  return report;
}

}  // namespace qgauss
