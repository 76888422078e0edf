#include "qgauss/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <set>
#include <sstream>

#include "qgauss/arakiwoods.hpp"
#include "qgauss/babyfock.hpp"
#include "qgauss/clt.hpp"
#include "qgauss/modular.hpp"
#include "qgauss/qmoments.hpp"

namespace qgauss {

namespace {

const std::vector<std::pair<Command, std::string>>& command_names() {
  static const std::vector<std::pair<Command, std::string>> names{
      {Command::relations, "relations"}, {Command::modular, "modular"},
      {Command::moments, "moments"},     {Command::clt, "clt"},
      {Command::truncate, "truncate"},   {Command::discretize, "discretize"}};
  return names;
}

constexpr const char* kSeedDerivation =
    "Philox4x32-10 keyed by seed; eps(i,j) for i>j is +1 iff the uniform "
    "double of counter (i, j, 0) is below (1+q)/2";

}  // namespace

std::string to_string(Command command) {
  for (const auto& [c, name] : command_names())
    if (c == command) return name;
  return "?";
}

Command parse_command(const std::string& name) {
  for (const auto& [c, n] : command_names())
    if (n == name) return c;
  throw ParseError("unknown command '" + name + "'", 0);
}

Json ExperimentConfig::to_json() const {
  Json j;
  j["command"] = to_string(command);
  j["k"] = k;
  j["n"] = n;
  j["n_values"] = n_values;
  j["q"] = q;
  j["lambda"] = lambda;
  j["seed"] = seed;
  j["seeds"] = seeds;
  j["words"] = words;
  j["C"] = cutoff ? Json(*cutoff) : Json(nullptr);
  j["t"] = t;
  j["points"] = points;
  j["slack"] = slack;
  return j;
}

namespace {

template <typename T>
T take(const Json& json, const char* key, T fallback) {
  const auto it = json.find(key);
  if (it == json.end() || it->is_null()) return fallback;
  try {
    return it->template get<T>();
  } catch (const Json::exception&) {
    throw ParseError(std::string("key '") + key + "' has the wrong type", 0);
  }
}

void validate_words(const ExperimentConfig& cfg) {
  for (std::size_t w = 0; w < cfg.words.size(); ++w) {
    try {
      if (cfg.command == Command::moments) {
        for (const StarLetter& l : parse_star_word(cfg.words[w]))
          if (l.j > cfg.k) throw DomainError("word " + std::to_string(w) + ": index above k");
      } else {
        for (const SumLetter& l : parse_sum_word(cfg.words[w])) {
          if (l.j > cfg.k) throw DomainError("word " + std::to_string(w) + ": index above k");
          if (!cfg.twisted() && l.kind != SumLetter::Kind::g_plus)
            throw DomainError("word " + std::to_string(w) +
                              ": tracial runs only take g<j> letters");
        }
      }
    } catch (const ParseError& e) {
      throw ParseError("word " + std::to_string(w) + " '" + cfg.words[w] + "': " + e.message(),
                       e.position());
    }
  }
}

}  // namespace

ExperimentConfig config_from_json(const Json& json) {
  if (!json.is_object()) throw ParseError("config must be a JSON object", 0);
  static const std::set<std::string> known{"command", "k",  "n",     "n_values", "q",
                                           "lambda",  "seed", "seeds", "words",    "C",
                                           "t",       "points", "slack"};
  for (const auto& [key, value] : json.items())
    if (!known.count(key)) throw ParseError("unknown key '" + key + "'", 0);
  if (!json.contains("command")) throw ParseError("missing key 'command'", 0);

  ExperimentConfig cfg;
  cfg.command = parse_command(take<std::string>(json, "command", ""));
  cfg.k = take(json, "k", cfg.k);
  cfg.n = take(json, "n", cfg.n);
  cfg.n_values = take(json, "n_values", cfg.n_values);
  cfg.q = take(json, "q", cfg.q);
  cfg.lambda = take(json, "lambda", cfg.lambda);
  cfg.seed = take(json, "seed", cfg.seed);
  cfg.seeds = take(json, "seeds", cfg.seeds);
  cfg.words = take(json, "words", cfg.words);
  if (json.contains("C") && !json["C"].is_null()) cfg.cutoff = take(json, "C", 0.0);
  cfg.t = take(json, "t", cfg.t);
  cfg.points = take(json, "points", cfg.points);
  cfg.slack = take(json, "slack", cfg.slack);

  if (cfg.k < 1) throw DomainError("k must be >= 1");
  if (cfg.n < 1) throw DomainError("n must be >= 1");
  for (int n : cfg.n_values)
    if (n < 1) throw DomainError("n_values entries must be >= 1");
  if (!(cfg.q > -1.0 && cfg.q < 1.0)) throw DomainError("q must lie in (-1, 1)");
  if (cfg.twisted() && static_cast<int>(cfg.lambda.size()) != cfg.k)
    throw DomainError("lambda needs exactly k entries");
  for (double l : cfg.lambda)
    if (!(l >= 1.0)) throw DomainError("lambda entries must be >= 1");
  if (cfg.cutoff && !(*cfg.cutoff > 0.0)) throw DomainError("C must be positive");
  for (double p : cfg.points)
    if (!(p > 0.0)) throw DomainError("discretization points must be positive");
  if (!(cfg.slack >= 0.0)) throw DomainError("slack must be >= 0");
  if (cfg.command == Command::modular && !cfg.twisted())
    throw DomainError("modular runs need lambda (twisted model)");
  validate_words(cfg);
  return cfg;
}

ExperimentConfig parse_config(const std::string& text) {
  Json json;
  try {
    json = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
  }
  return config_from_json(json);
}

// ---------------------------------------------------------------------------

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

Json Report::summary() const {
  Json s;
  s["passed"] = passed();
  Json list = Json::array();
  for (const Check& c : checks)
    list.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"limit", c.limit}});
  s["checks"] = list;
  return s;
}

Json Report::to_json() const {
  Json j;
  j["header"] = header;
  j["rows"] = rows;
  j["summary"] = summary();
  j["rows_digest"] = rows_digest();
  return j;
}

namespace {

std::string csv_cell(const Json& v) {
  std::string s;
  if (v.is_number_float()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    s = buf;
  } else {
    s = v.is_string() ? v.get<std::string>() : v.dump();
  }
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + "\"";
}

}  // namespace

std::string Report::to_csv() const {
  std::ostringstream os;
  if (rows.empty()) return "";
  std::vector<std::string> columns;
  for (const auto& [key, value] : rows.front().items()) columns.push_back(key);
  for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
  os << '\n';
  for (const Json& row : rows) {
    for (std::size_t c = 0; c < columns.size(); ++c)
      os << (c ? "," : "") << (row.contains(columns[c]) ? csv_cell(row[columns[c]]) : "");
    os << '\n';
  }
  return os.str();
}

std::string Report::rows_digest() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : rows.dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

SpinModel relation_model(const ExperimentConfig& cfg, std::uint64_t seed, int n) {
  const SignFunction eps = sample_signs(n, cfg.q, seed);
  return cfg.twisted() ? SpinModel::twisted(eps, cfg.lambda) : SpinModel::untwisted(eps, cfg.k);
}

CltConfig clt_config(const ExperimentConfig& cfg, int n, std::uint64_t seed) {
  CltConfig c;
  c.mode = cfg.twisted() ? CltMode::twisted : CltMode::tracial;
  c.k = cfg.k;
  c.lambda = cfg.lambda;
  c.q = cfg.q;
  c.n = n;
  c.seed = seed;
  return c;
}

void add_complex(Json& row, const std::string& key, Complex v) {
  row[key + "_re"] = v.real();
  row[key + "_im"] = v.imag();
}

void run_relations(const ExperimentConfig& cfg, Report& report) {
  double worst = 0.0;
  bool cyclic_ok = true;
  for (int n : cfg.sizes()) {
    for (std::uint64_t seed : cfg.seed_list()) {
      const SpinModel model = relation_model(cfg, seed, n);
      const RelationReport rel = verify_relations(model);
      for (const ResidualRow& r : rel.rows) {
        report.rows.push_back({{"n", n}, {"seed", seed}, {"dim", rel.dim},
                               {"identity", r.identity}, {"max_residual", r.max_residual},
                               {"instances", r.instances}});
      }
      worst = std::max(worst, rel.max_residual());
      if (model.mode() == Mode::twisted) {
        const int rank = cyclic_rank(model, model.size());
        report.rows.push_back({{"n", n}, {"seed", seed}, {"dim", model.dim()},
                               {"identity", "cyclic rank of the vacuum"},
                               {"max_residual", static_cast<double>(model.dim()) - rank},
                               {"instances", rank}});
        cyclic_ok = cyclic_ok && rank == static_cast<int>(model.dim());
      }
    }
  }
  report.checks.push_back({"relation residuals", worst <= kRelationTolerance, worst,
                           kRelationTolerance});
  if (cfg.twisted())
    report.checks.push_back({"vacuum cyclic", cyclic_ok, cyclic_ok ? 1.0 : 0.0, 1.0});
}

void run_modular(const ExperimentConfig& cfg, Report& report) {
  double worst = 0.0;
  for (int n : cfg.sizes()) {
    for (std::uint64_t seed : cfg.seed_list()) {
      const ModularReport mod = verify_modular(relation_model(cfg, seed, n));
      for (const ResidualRow& r : mod.rows) {
        report.rows.push_back({{"n", n}, {"seed", seed}, {"dim", mod.dim},
                               {"identity", r.identity}, {"max_residual", r.max_residual},
                               {"instances", r.instances}, {"params", mod.params}});
      }
      worst = std::max(worst, mod.max_residual());
    }
  }
  report.checks.push_back({"modular residuals", worst <= kRelationTolerance, worst,
                           kRelationTolerance});
}

void run_moments(const ExperimentConfig& cfg, Report& report) {
  const CircularParams params = cfg.twisted()
                                    ? CircularParams::from_lambda(cfg.q, cfg.lambda)
                                    : CircularParams(cfg.q, std::vector<double>(cfg.k, 1.0));
  double odd_worst = 0.0;
  for (const std::string& text : cfg.words) {
    const StarWord word = parse_star_word(text);
    const Complex value = circular_star_moment(word, params);
    Json row{{"word", to_string(word)}, {"q", cfg.q}, {"mu", params.mu()}};
    add_complex(row, "value", value);
    report.rows.push_back(row);
    if (word.size() % 2 == 1) odd_worst = std::max(odd_worst, std::abs(value));
  }
  report.checks.push_back({"odd moments vanish", odd_worst == 0.0, odd_worst, 0.0});
}

void run_clt(const ExperimentConfig& cfg, Report& report) {
  std::vector<SumWord> words;
  for (const std::string& text : cfg.words) words.push_back(parse_sum_word(text));
  if (words.empty())
    words.push_back(parse_sum_word(cfg.twisted() ? "s1 s1*" : "g1 g1 g1 g1"));
  ConvergenceOptions options;
  options.n_values = cfg.sizes();
  options.seeds = cfg.seed_list();
  options.slack = cfg.slack;
  const auto rows = convergence_report(clt_config(cfg, cfg.sizes().front(), cfg.seed), words,
                                       options);
  int flagged = 0;
  for (const ConvergenceRow& r : rows) {
    Json row{{"n", r.n}, {"word", r.word}};
    add_complex(row, "value", r.value);
    add_complex(row, "limit", r.limit);
    row["error"] = r.error;
    row["flagged"] = r.flagged;
    report.rows.push_back(row);
    flagged += r.flagged ? 1 : 0;
  }
  report.checks.push_back({"errors non-increasing within slack", flagged == 0,
                           static_cast<double>(flagged), 0.0});
}

void run_truncate(const ExperimentConfig& cfg, Report& report) {
  SumLetter letter;
  if (!cfg.words.empty()) {
    const SumWord w = parse_sum_word(cfg.words.front());
    if (w.size() != 1) throw DomainError("truncate takes a single letter");
    letter = w.front();
  }
  const double c = cfg.cutoff ? *cfg.cutoff : default_cutoff(clt_config(cfg, cfg.n, cfg.seed));
  bool norm_ok = true;
  double cov_worst = 0.0;
  for (int n : cfg.sizes()) {
    for (std::uint64_t seed : cfg.seed_list()) {
      const SpinModel model = build_model(clt_config(cfg, n, seed));
      const TruncatedVariable tv = truncate_variable(model, letter, c);
      const Eigen::MatrixXcd g2 = tv.original * tv.original;
      const Eigen::MatrixXcd t2 = tv.truncated * tv.truncated;
      const double phi4 = std::real((g2 * g2)(0, 0));
      const double phi4_trunc = std::real((t2 * t2)(0, 0));
      const double cov = truncation_modular_covariance(model, letter, cfg.t, c);
      report.rows.push_back({{"n", n}, {"seed", seed}, {"dim", model.dim()}, {"C", c},
                             {"tail_mass", tail_mass(tv.measure, c)},
                             {"spectral_radius", spectral_radius(tv.measure)},
                             {"truncated_norm", tv.norm}, {"phi4", phi4},
                             {"phi4_truncated", phi4_trunc}, {"t", cfg.t},
                             {"modular_covariance_residual", cov}});
      norm_ok = norm_ok && tv.norm < c;
      cov_worst = std::max(cov_worst, cov);
    }
  }
  report.checks.push_back({"truncated norm below C", norm_ok, norm_ok ? 1.0 : 0.0, 1.0});
  report.checks.push_back({"truncation commutes with the modular group", cov_worst <= 1e-10,
                           cov_worst, 1e-10});
}

void run_discretize(const ExperimentConfig& cfg, Report& report) {
  std::vector<double> points = cfg.points;
  if (points.empty())
    for (int i = 1; i <= 100; ++i) points.push_back(0.05 * i);
  std::vector<int> levels = cfg.n_values;
  if (levels.empty())
    for (int n = 1; n <= std::max(cfg.n, 6); ++n) levels.push_back(n);
  std::sort(levels.begin(), levels.end());
  bool reciprocal_ok = true, monotone_ok = true;
  for (double t : points) {
    double previous = 0.0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const int n = levels[i];
      const StepValue f = discretize(t, n);
      const StepValue g = discretize(1.0 / t, n);
      const bool reciprocal = f.num * g.num == f.den * g.den;
      reciprocal_ok = reciprocal_ok && reciprocal;
      if (t >= 1.0) {
        monotone_ok = monotone_ok && f.value() <= t && (i == 0 || f.value() >= previous);
        previous = f.value();
      }
      report.rows.push_back({{"t", t}, {"n", n}, {"num", f.num}, {"den", f.den},
                             {"value", f.value()}, {"reciprocal_exact", reciprocal}});
    }
  }
  report.checks.push_back({"f_n(t) f_n(1/t) = 1", reciprocal_ok, reciprocal_ok ? 1.0 : 0.0, 1.0});
  report.checks.push_back({"f_n(t) increases to t", monotone_ok, monotone_ok ? 1.0 : 0.0, 1.0});
}

}  // namespace

Report run(const ExperimentConfig& config) {
  Report report;
  report.header["config"] = config.to_json();
  report.header["version"] = kToolVersion;
  report.header["timestamp"] = utc_timestamp();
  report.header["seed_derivation"] = kSeedDerivation;
  switch (config.command) {
    case Command::relations: run_relations(config, report); break;
    case Command::modular: run_modular(config, report); break;
    case Command::moments: run_moments(config, report); break;
    case Command::clt: run_clt(config, report); break;
    case Command::truncate: run_truncate(config, report); break;
    case Command::discretize: run_discretize(config, report); break;
  }
  return report;
}

}  // namespace qgauss
