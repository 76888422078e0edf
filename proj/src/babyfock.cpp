#include "qgauss/babyfock.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <Eigen/Dense>

#include "qgauss/parallel.hpp"
#include "qgauss/rng.hpp"

namespace qgauss {

std::string to_string(const Index& index) {
  return "(" + std::to_string(index.site) + "," + std::to_string(index.gen) + ")";
}

std::string to_string(Mode mode) {
  return mode == Mode::twisted ? "twisted" : "untwisted";
}

SpinModel::SpinModel(Mode mode, std::vector<Index> order, const SignRule& eps,
                     std::vector<double> lambda)
    : mode_(mode), order_(std::move(order)), lambda_(std::move(lambda)) {
  const std::size_t n = order_.size();
  if (n > 62 || (std::size_t{1} << n) > max_vector_dim())
    throw SizeLimitError("model with " + std::to_string(n) +
                         " generators exceeds the dimension cap " +
                         std::to_string(max_vector_dim()));
  lookup_.reserve(n);
  for (std::size_t p = 0; p < n; ++p) {
    const Index& idx = order_[p];
    if (idx.site < 0) throw DomainError("site indices must be >= 0");
    if (idx.gen == 0 || (mode_ == Mode::untwisted && idx.gen < 0))
      throw DomainError("invalid generator label " + to_string(idx));
    lookup_.emplace_back(idx, static_cast<int>(p));
    k_ = std::max(k_, std::abs(idx.gen));
    n_sites_ = std::max(n_sites_, idx.site + 1);
  }
  std::sort(lookup_.begin(), lookup_.end());
  for (std::size_t i = 1; i < lookup_.size(); ++i)
    if (lookup_[i].first == lookup_[i - 1].first)
      throw DomainError("duplicate label " + to_string(lookup_[i].first));

  neg_mask_.assign(n, 0);
  for (std::size_t p = 0; p < n; ++p) {
    neg_mask_[p] |= std::uint64_t{1} << p;  // ε(i, i) = -1
    for (std::size_t q = 0; q < n; ++q) {
      if (p == q) continue;
      const int v = eps(order_[p], order_[q]);
      if (v != 1 && v != -1) throw DomainError("sign values must be +1 or -1");
      if (v != eps(order_[q], order_[p]))
        throw DomainError("sign function must be symmetric");
      if (v == -1) neg_mask_[p] |= std::uint64_t{1} << q;
    }
  }

  if (mode_ == Mode::twisted) {
    if (static_cast<int>(lambda_.size()) != k_)
      throw DomainError("twisted model needs one lambda per generator pair");
    mirror_.assign(n, -1);
    for (std::size_t p = 0; p < n; ++p) {
      const Index partner{order_[p].site, -order_[p].gen};
      if (!contains(partner))
        throw DomainError("twisted model is missing the mirror of " +
                          to_string(order_[p]));
      mirror_[p] = position(partner);
    }
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = 0; q < n; ++q) {
        if (p == q) continue;
        const Index a{order_[p].site, std::abs(order_[p].gen)};
        const Index b{order_[q].site, std::abs(order_[q].gen)};
        const int expected = a == b ? -1 : this->eps(position(a), position(b));
        if (this->eps(static_cast<int>(p), static_cast<int>(q)) != expected)
          throw DomainError("sign function violates the mirror condition");
      }
    }
  }
  for (double l : lambda_) {
    if (!(l >= 1.0)) throw DomainError("lambda_j must be >= 1");
    mu_.push_back(std::pow(l, 0.25));
  }
}

SpinModel SpinModel::untwisted(const SignFunction& site_signs, int k) {
  if (k < 1) throw DomainError("k must be >= 1");
  std::vector<Index> order;
  for (int s = 0; s < static_cast<int>(site_signs.size()); ++s)
    for (int j = 1; j <= k; ++j) order.push_back({s, j});
  return SpinModel(
      Mode::untwisted, std::move(order),
      [&site_signs](const Index& a, const Index& b) {
        return site_signs(a.site, b.site);
      });
}

SpinModel SpinModel::twisted(const SignFunction& site_signs,
                             std::vector<double> lambda) {
  const int k = static_cast<int>(lambda.size());
  if (k < 1) throw DomainError("twisted model needs at least one lambda");
  std::vector<Index> order;
  for (int s = 0; s < static_cast<int>(site_signs.size()); ++s) {
    for (int j = k; j >= 1; --j) order.push_back({s, -j});
    for (int j = 1; j <= k; ++j) order.push_back({s, j});
  }
  return SpinModel(
      Mode::twisted, std::move(order),
      [&site_signs](const Index& a, const Index& b) {
        return site_signs(a.site, b.site);
      },
      std::move(lambda));
}

SpinModel SpinModel::reordered(std::vector<Index> order) const {
  if (order.size() != order_.size())
    throw DomainError("reordering must be a permutation of the labels");
  for (const Index& idx : order)
    if (!contains(idx)) throw DomainError("unknown label " + to_string(idx));
  return SpinModel(
      mode_, std::move(order),
      [this](const Index& a, const Index& b) { return eps(a, b); }, lambda_);
}

int SpinModel::position(const Index& index) const {
  const auto it = std::lower_bound(
      lookup_.begin(), lookup_.end(), index,
      [](const std::pair<Index, int>& e, const Index& key) { return e.first < key; });
  if (it == lookup_.end() || it->first != index)
    throw DomainError("label " + to_string(index) + " not in model");
  return it->second;
}

bool SpinModel::contains(const Index& index) const {
  return std::binary_search(
      lookup_.begin(), lookup_.end(), std::pair<Index, int>{index, -1},
      [](const std::pair<Index, int>& a, const std::pair<Index, int>& b) {
        return a.first < b.first;
      });
}

std::vector<Index> SpinModel::generators() const {
  std::vector<Index> out;
  for (const Index& idx : order_)
    if (mode_ == Mode::untwisted || idx.gen > 0) out.push_back(idx);
  std::sort(out.begin(), out.end());
  return out;
}

int insertion_sign(const SpinModel& model, int pos, std::uint64_t set, Side side) {
  if ((set >> pos) & 1U)
    throw ContractViolation("insertion_sign: index already in the subset");
  return side == Side::left ? model.left_sign(pos, set) : model.right_sign(pos, set);
}

Complex inner(const SpinVector& u, const SpinVector& v) {
  Complex total = 0.0;
  for (std::size_t b = 0; b < u.dim(); ++b)
    total += std::conj(u.amplitudes[b]) * v.amplitudes[b];
  return total;
}

double max_abs_diff(const SpinVector& u, const SpinVector& v) {
  double worst = 0.0;
  for (std::size_t b = 0; b < u.dim(); ++b)
    worst = std::max(worst, std::abs(u.amplitudes[b] - v.amplitudes[b]));
  return worst;
}

std::string to_string(Op op) {
  switch (op) {
    case Op::beta: return "beta";
    case Op::beta_star: return "beta*";
    case Op::alpha: return "alpha";
    case Op::alpha_star: return "alpha*";
    case Op::gamma: return "gamma";
    case Op::gamma_star: return "gamma*";
    case Op::delta: return "delta";
    case Op::delta_star: return "delta*";
    case Op::gamma_plain: return "gamma_u";
    case Op::delta_plain: return "delta_u";
  }
  return "?";
}

Op adjoint(Op op) {
  switch (op) {
    case Op::beta: return Op::beta_star;
    case Op::beta_star: return Op::beta;
    case Op::alpha: return Op::alpha_star;
    case Op::alpha_star: return Op::alpha;
    case Op::gamma: return Op::gamma_star;
    case Op::gamma_star: return Op::gamma;
    case Op::delta: return Op::delta_star;
    case Op::delta_star: return Op::delta;
    case Op::gamma_plain: return Op::gamma_plain;
    case Op::delta_plain: return Op::delta_plain;
  }
  return op;
}

OperatorWord adjoint(const OperatorWord& word) {
  OperatorWord out;
  out.reserve(word.size());
  for (auto it = word.rbegin(); it != word.rend(); ++it)
    out.push_back({adjoint(it->op), it->index, std::conj(it->coef)});
  return out;
}

std::string to_string(const OperatorWord& word) {
  if (word.empty()) return "Id";
  std::ostringstream os;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i) os << ' ';
    if (word[i].coef != Complex(1.0)) os << word[i].coef << '*';
    os << to_string(word[i].op) << to_string(word[i].index);
  }
  return os.str();
}

namespace {

enum class PrimKind { create_left, annihilate_left, create_right, annihilate_right };

struct Prim {
  PrimKind kind;
  int pos;
  Complex coef;
};

struct Expansion {
  Prim terms[2];
  int count = 0;
  void push(PrimKind kind, int pos, Complex coef) { terms[count++] = {kind, pos, coef}; }
};

Expansion expand(const Letter& letter, const SpinModel& model) {
  Expansion e;
  const Complex c = letter.coef;
  switch (letter.op) {
    case Op::beta_star:
      e.push(PrimKind::create_left, model.position(letter.index), c);
      return e;
    case Op::beta:
      e.push(PrimKind::annihilate_left, model.position(letter.index), c);
      return e;
    case Op::alpha_star:
      e.push(PrimKind::create_right, model.position(letter.index), c);
      return e;
    case Op::alpha:
      e.push(PrimKind::annihilate_right, model.position(letter.index), c);
      return e;
    case Op::gamma_plain: {
      const int p = model.position(letter.index);
      e.push(PrimKind::create_left, p, c);
      e.push(PrimKind::annihilate_left, p, c);
      return e;
    }
    case Op::delta_plain: {
      const int p = model.position(letter.index);
      e.push(PrimKind::create_right, p, c);
      e.push(PrimKind::annihilate_right, p, c);
      return e;
    }
    default:
      break;
  }
  if (model.mode() != Mode::twisted || letter.index.gen <= 0)
    throw ModeError(to_string(letter.op) +
                    " needs a twisted model and a positive generator index");
  const int plus = model.position(letter.index);
  const int minus = model.position({letter.index.site, -letter.index.gen});
  const double mu = model.mu(letter.index.gen);
  switch (letter.op) {
    case Op::gamma:
      e.push(PrimKind::create_left, plus, c / mu);
      e.push(PrimKind::annihilate_left, minus, c * mu);
      break;
    case Op::gamma_star:
      e.push(PrimKind::annihilate_left, plus, c / mu);
      e.push(PrimKind::create_left, minus, c * mu);
      break;
    case Op::delta:
      e.push(PrimKind::create_right, plus, c * mu);
      e.push(PrimKind::annihilate_right, minus, c / mu);
      break;
    case Op::delta_star:
      e.push(PrimKind::annihilate_right, plus, c * mu);
      e.push(PrimKind::create_right, minus, c / mu);
      break;
    default:
      break;
  }
  return e;
}

// Image of basis vector b under a primitive: (target, sign) or target = ~0.
inline std::pair<std::uint64_t, int> act(const Prim& prim, std::uint64_t b,
                                         const SpinModel& model) {
  const std::uint64_t bit = std::uint64_t{1} << prim.pos;
  const bool present = (b & bit) != 0;
  switch (prim.kind) {
    case PrimKind::create_left:
      if (present) break;
      return {b | bit, model.left_sign(prim.pos, b)};
    case PrimKind::annihilate_left:
      if (!present) break;
      return {b ^ bit, model.left_sign(prim.pos, b ^ bit)};
    case PrimKind::create_right:
      if (present) break;
      return {b | bit, model.right_sign(prim.pos, b)};
    case PrimKind::annihilate_right:
      if (!present) break;
      return {b ^ bit, model.right_sign(prim.pos, b ^ bit)};
  }
  return {~std::uint64_t{0}, 0};
}

void accumulate_prim(const Prim& prim, const SpinVector& in, SpinVector& out,
                     Complex scale, const SpinModel& model) {
  const std::uint64_t bit = std::uint64_t{1} << prim.pos;
  const Complex factor = scale * prim.coef;
  const bool creates = prim.kind == PrimKind::create_left ||
                       prim.kind == PrimKind::create_right;
  const bool left = prim.kind == PrimKind::create_left ||
                    prim.kind == PrimKind::annihilate_left;
  const Complex* src = in.amplitudes.data();
  Complex* dst = out.amplitudes.data();
  // Gather form: every output entry has at most one source, so chunks of the
  // output never interact.
  parallel_for(in.dim(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      const bool has = (c & bit) != 0;
      if (has != creates) continue;
      const std::uint64_t rest = c & ~bit;
      const int sign = left ? model.left_sign(prim.pos, rest)
                            : model.right_sign(prim.pos, rest);
      const std::uint64_t from = creates ? rest : (c | bit);
      dst[c] += (sign > 0 ? factor : -factor) * src[from];
    }
  });
}

void normalize(SparseVector& v) {
  std::sort(v.begin(), v.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::size_t w = 0;
  for (std::size_t r = 0; r < v.size(); ++r) {
    if (w > 0 && v[w - 1].first == v[r].first) {
      v[w - 1].second += v[r].second;
    } else {
      v[w++] = v[r];
    }
  }
  v.resize(w);
  std::erase_if(v, [](const auto& e) { return e.second == Complex(0.0); });
}

}  // namespace

void accumulate(const Letter& letter, const SpinVector& in, SpinVector& out,
                Complex scale, const SpinModel& model) {
  if (in.dim() != model.dim() || out.dim() != model.dim())
    throw DomainError("vector dimension does not match the model");
  const Expansion e = expand(letter, model);
  for (int t = 0; t < e.count; ++t) accumulate_prim(e.terms[t], in, out, scale, model);
}

SpinVector apply_generator(const Letter& letter, const SpinVector& v,
                           const SpinModel& model) {
  SpinVector out = SpinVector::zero(v.dim());
  accumulate(letter, v, out, 1.0, model);
  return out;
}

SpinVector apply_word(const OperatorWord& word, const SpinVector& v,
                      const SpinModel& model) {
  SpinVector current = v;
  for (auto it = word.rbegin(); it != word.rend(); ++it)
    current = apply_generator(*it, current, model);
  return current;
}

SparseVector apply_word(const OperatorWord& word, const SparseVector& v,
                        const SpinModel& model) {
  SparseVector current = v;
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    const Expansion e = expand(*it, model);
    SparseVector next;
    next.reserve(current.size() * e.count);
    for (const auto& [b, c] : current) {
      for (int t = 0; t < e.count; ++t) {
        const auto [target, sign] = act(e.terms[t], b, model);
        if (sign == 0) continue;
        next.emplace_back(target, static_cast<double>(sign) * e.terms[t].coef * c);
      }
    }
    normalize(next);
    current = std::move(next);
    if (current.empty()) break;
  }
  return current;
}

Complex vacuum_state(const OperatorWord& word, const SpinModel& model) {
  const SparseVector out = apply_word(word, SparseVector{{0, 1.0}}, model);
  return !out.empty() && out.front().first == 0 ? out.front().second : Complex(0.0);
}

double residual(const OperatorSum& sum, const SpinModel& model) {
  double worst = 0.0;
  for (std::uint64_t b = 0; b < model.dim(); ++b) {
    SparseVector total;
    for (const auto& [coef, word] : sum) {
      for (const auto& [target, c] : apply_word(word, SparseVector{{b, 1.0}}, model))
        total.emplace_back(target, coef * c);
    }
    normalize(total);
    for (const auto& entry : total) worst = std::max(worst, std::abs(entry.second));
  }
  return worst;
}

bool RelationReport::passed() const { return max_residual() <= tolerance; }

double RelationReport::max_residual() const {
  double worst = 0.0;
  for (const auto& row : rows) worst = std::max(worst, row.max_residual);
  return worst;
}

namespace {

class RelationCollector {
 public:
  explicit RelationCollector(const SpinModel& model) : model_(model) {}

  void check(const std::string& name, const OperatorSum& sum) {
    const double r = residual(sum, model_);
    auto it = std::find_if(rows_.begin(), rows_.end(),
                           [&](const ResidualRow& row) { return row.identity == name; });
    if (it == rows_.end()) {
      rows_.push_back({name, r, 1});
    } else {
      it->max_residual = std::max(it->max_residual, r);
      ++it->instances;
    }
  }

  std::vector<ResidualRow> take() { return std::move(rows_); }

 private:
  const SpinModel& model_;
  std::vector<ResidualRow> rows_;
};

Letter L(Op op, const Index& i) { return {op, i, 1.0}; }

}  // namespace

RelationReport verify_relations(const SpinModel& model) {
  if (model.dim() > max_verify_dim())
    throw SizeLimitError("relation verification capped at dimension " +
                         std::to_string(max_verify_dim()));
  RelationCollector rc(model);
  const auto& labels = model.order();

  for (const Op create : {Op::beta_star, Op::alpha_star}) {
    const Op annihilate = adjoint(create);
    const std::string tag = create == Op::beta_star ? "beta" : "alpha";
    for (const Index& i : labels) {
      rc.check("(" + tag + "_i^*)^2 = 0", {{1.0, {L(create, i), L(create, i)}}});
      rc.check(tag + "_i^2 = 0", {{1.0, {L(annihilate, i), L(annihilate, i)}}});
      rc.check(tag + "_i " + tag + "_i^* + " + tag + "_i^* " + tag + "_i = Id",
               {{1.0, {L(annihilate, i), L(create, i)}},
                {1.0, {L(create, i), L(annihilate, i)}},
                {-1.0, {}}});
      for (const Index& j : labels) {
        if (i == j) continue;
        const double e = model.eps(i, j);
        rc.check(tag + "_i " + tag + "_j - eps(i,j) " + tag + "_j " + tag + "_i = 0",
                 {{1.0, {L(annihilate, i), L(annihilate, j)}},
                  {-e, {L(annihilate, j), L(annihilate, i)}}});
        rc.check(tag + "_i " + tag + "_j^* - eps(i,j) " + tag + "_j^* " + tag + "_i = 0",
                 {{1.0, {L(annihilate, i), L(create, j)}},
                  {-e, {L(create, j), L(annihilate, i)}}});
      }
    }
  }

  for (const Index& i : labels) {
    rc.check("beta_i^* alpha_i^* = 0",
             {{1.0, {L(Op::beta_star, i), L(Op::alpha_star, i)}}});
    rc.check("alpha_i^* beta_i^* = 0",
             {{1.0, {L(Op::alpha_star, i), L(Op::beta_star, i)}}});
    for (const Index& j : labels) {
      // At i = j the commutation fails: β_1^* α_1 x_1 = x_1, α_1 β_1^* x_1 = 0.
      if (i != j) {
        rc.check("beta_i^* alpha_j^* = alpha_j^* beta_i^*",
                 {{1.0, {L(Op::beta_star, i), L(Op::alpha_star, j)}},
                  {-1.0, {L(Op::alpha_star, j), L(Op::beta_star, i)}}});
        rc.check("beta_i^* alpha_j = alpha_j beta_i^* (i != j)",
                 {{1.0, {L(Op::beta_star, i), L(Op::alpha, j)}},
                  {-1.0, {L(Op::alpha, j), L(Op::beta_star, i)}}});
      }
      OperatorSum mixed{{1.0, {L(Op::gamma_plain, i), L(Op::gamma_plain, j)}},
                        {-static_cast<double>(model.eps(i, j)),
                         {L(Op::gamma_plain, j), L(Op::gamma_plain, i)}}};
      if (i == j) mixed.push_back({-2.0, {}});
      rc.check("gamma_i gamma_j - eps(i,j) gamma_j gamma_i = 2 delta_ij Id", mixed);
    }
  }

  if (model.mode() == Mode::twisted) {
    for (const Index& i : labels) {
      const Index m{i.site, -i.gen};
      rc.check("alpha_i beta_i^* + alpha_-i^* beta_-i = beta_i^* alpha_i + beta_-i alpha_-i^*",
               {{1.0, {L(Op::alpha, i), L(Op::beta_star, i)}},
                {1.0, {L(Op::alpha_star, m), L(Op::beta, m)}},
                {-1.0, {L(Op::beta_star, i), L(Op::alpha, i)}},
                {-1.0, {L(Op::beta, m), L(Op::alpha_star, m)}}});
    }
    const auto gens = model.generators();
    for (const bool right : {false, true}) {
      const Op g = right ? Op::delta : Op::gamma;
      const Op gs = adjoint(g);
      const std::string tag = right ? "delta" : "gamma";
      for (const Index& i : gens) {
        const double mu = model.mu(i.gen);
        rc.check(tag + "_i^2 = 0", {{1.0, {L(g, i), L(g, i)}}});
        rc.check("(" + tag + "_i^*)^2 = 0", {{1.0, {L(gs, i), L(gs, i)}}});
        rc.check(tag + "_i^* " + tag + "_i + " + tag + "_i " + tag +
                     "_i^* = (mu^2 + mu^-2) Id",
                 {{1.0, {L(gs, i), L(g, i)}},
                  {1.0, {L(g, i), L(gs, i)}},
                  {-(mu * mu + 1.0 / (mu * mu)), {}}});
        for (const Index& j : gens) {
          if (i == j) continue;
          const double e = model.eps(i, j);
          rc.check(tag + "_i " + tag + "_j - eps(i,j) " + tag + "_j " + tag + "_i = 0",
                   {{1.0, {L(g, i), L(g, j)}}, {-e, {L(g, j), L(g, i)}}});
          rc.check(tag + "_i^* " + tag + "_j - eps(i,j) " + tag + "_j " + tag + "_i^* = 0",
                   {{1.0, {L(gs, i), L(g, j)}}, {-e, {L(g, j), L(gs, i)}}});
        }
      }
    }
    for (const Index& i : gens) {
      for (const Index& j : gens) {
        rc.check("gamma_i delta_j = delta_j gamma_i",
                 {{1.0, {L(Op::gamma, i), L(Op::delta, j)}},
                  {-1.0, {L(Op::delta, j), L(Op::gamma, i)}}});
        rc.check("gamma_i delta_j^* = delta_j^* gamma_i",
                 {{1.0, {L(Op::gamma, i), L(Op::delta_star, j)}},
                  {-1.0, {L(Op::delta_star, j), L(Op::gamma, i)}}});
      }
    }
  }

  RelationReport report;
  report.rows = rc.take();
  report.dim = model.dim();
  return report;
}

CyclicSpan cyclic_span(const SpinModel& model, int max_length, Family family) {
  if (model.dim() > max_verify_dim())
    throw SizeLimitError("cyclic rank capped at dimension " +
                         std::to_string(max_verify_dim()));
  std::vector<Letter> letters;
  for (const Index& g : model.generators()) {
    if (model.mode() == Mode::twisted) {
      const Op op = family == Family::gamma ? Op::gamma : Op::delta;
      letters.push_back({op, g, 1.0});
      letters.push_back({adjoint(op), g, 1.0});
    } else {
      letters.push_back({family == Family::gamma ? Op::gamma_plain : Op::delta_plain, g, 1.0});
    }
  }

  constexpr double kThreshold = 1e-9;
  const auto dim = static_cast<Eigen::Index>(model.dim());
  CyclicSpan span;
  Eigen::Index rank = 0;

  // Word images are homogeneous: twisted letters shift the charge
  // (χ_j - χ_{-j} summed over sites) of one generator by ±1, plain letters
  // flip one bit. Images in different sectors are orthogonal, so each sector
  // is orthogonalized on its own.
  auto sector_of = [&](std::uint64_t b) {
    std::vector<int> key;
    if (model.mode() == Mode::untwisted) {
      key.push_back(static_cast<int>(b));
      return key;
    }
    key.assign(model.k(), 0);
    for (std::uint64_t rest = b; rest != 0; rest &= rest - 1) {
      const Index& idx = model.label(__builtin_ctzll(rest));
      key[std::abs(idx.gen) - 1] += idx.gen > 0 ? 1 : -1;
    }
    return key;
  };
  std::map<std::vector<int>, std::vector<Eigen::VectorXcd>> sectors;

  auto try_add = [&](const OperatorWord& word, const SpinVector& raw) {
    Eigen::Map<const Eigen::VectorXcd> image(raw.amplitudes.data(), dim);
    Eigen::Index lead = 0;
    if (image.cwiseAbs().maxCoeff(&lead) <= kThreshold) return false;
    auto& local = sectors[sector_of(static_cast<std::uint64_t>(lead))];
    Eigen::VectorXcd v = image;
    for (int pass = 0; pass < 2; ++pass)
      for (const Eigen::VectorXcd& q : local) v -= q * q.dot(v);
    const double norm = v.norm();
    if (norm <= kThreshold) return false;
    local.push_back(v / norm);
    ++rank;
    span.words.push_back(word);
    return true;
  };

  std::vector<std::pair<OperatorWord, SpinVector>> frontier;
  const SpinVector vac = SpinVector::vacuum(model.dim());
  try_add({}, vac);
  frontier.emplace_back(OperatorWord{}, vac);
  for (int level = 1; level <= max_length && !frontier.empty() && rank < dim; ++level) {
    std::vector<std::pair<OperatorWord, SpinVector>> next;
    for (const auto& [word, vec] : frontier) {
      for (const Letter& letter : letters) {
        if (rank == dim) break;
        SpinVector image = apply_generator(letter, vec, model);
        OperatorWord grown{letter};
        grown.insert(grown.end(), word.begin(), word.end());
        if (try_add(grown, image)) next.emplace_back(std::move(grown), std::move(image));
      }
    }
    frontier = std::move(next);
  }
  span.rank = static_cast<int>(rank);
  return span;
}

int cyclic_rank(const SpinModel& model, int max_length, Family family) {
  return cyclic_span(model, max_length, family).rank;
}

EnlargementReport enlargement_consistency(const SpinModel& small,
                                          const SpinModel& large,
                                          const std::vector<OperatorWord>& words) {
  for (const Index& a : small.order()) {
    if (!large.contains(a))
      throw DomainError("large model does not contain label " + to_string(a));
    for (const Index& b : small.order())
      if (a != b && small.eps(a, b) != large.eps(a, b))
        throw DomainError("sign function of the large model does not restrict to the small one");
  }
  EnlargementReport report;
  for (const OperatorWord& w : words) {
    const Complex a = vacuum_state(w, small);
    const Complex b = vacuum_state(w, large);
    report.max_discrepancy = std::max(report.max_discrepancy, std::abs(a - b));
    ++report.words_checked;
  }
  return report;
}

std::vector<OperatorWord> random_words(const std::vector<Index>& labels,
                                       const std::vector<Op>& ops, int count,
                                       int length, std::uint64_t seed) {
  if (labels.empty() || ops.empty()) throw DomainError("random_words needs labels and ops");
  const Philox4x32 rng(seed);
  std::vector<OperatorWord> words;
  for (int w = 0; w < count; ++w) {
    OperatorWord word;
    for (int l = 0; l < length; ++l) {
      const std::uint64_t r = rng.bits(static_cast<std::uint64_t>(w), static_cast<std::uint64_t>(l));
      word.push_back({ops[r % ops.size()], labels[(r >> 32) % labels.size()], 1.0});
    }
    words.push_back(std::move(word));
  }
  return words;
}

}  // namespace qgauss
