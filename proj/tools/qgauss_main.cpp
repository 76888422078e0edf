#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qgauss/cli.hpp"
#include "qgauss/common.hpp"
#include "qgauss/parallel.hpp"

namespace {

struct Flags {
  std::string config_path;
  std::string out_path;
  std::string format = "json";
  unsigned threads = 1;
  std::optional<int> k, n;
  std::optional<double> q, cutoff, t;
  std::optional<std::uint64_t> seed;
  std::vector<int> n_values;
  std::vector<double> lambda;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> words;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config_path, "JSON config file");
  sub->add_option("--out", f.out_path, "report path (stdout if omitted)");
  sub->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--threads", f.threads, "worker threads")->check(CLI::Range(1u, 256u));
  sub->add_option("--k", f.k, "generator count");
  sub->add_option("--n", f.n, "site count");
  sub->add_option("--n-values", f.n_values, "site counts for sweeps");
  sub->add_option("--q", f.q, "sign mean q in (-1, 1)");
  sub->add_option("--lambda", f.lambda, "lambda_1..lambda_k (twisted model)");
  sub->add_option("--seed", f.seed, "sign seed");
  sub->add_option("--seeds", f.seeds, "sign seeds to average");
  sub->add_option("--word", f.words, "word in the letter grammar (repeatable)");
  sub->add_option("--C", f.cutoff, "truncation constant");
  sub->add_option("--t", f.t, "modular time");
}

qgauss::Json merged_config(const std::string& command, const Flags& f) {
  qgauss::Json json = qgauss::Json::object();
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw qgauss::ParseError("cannot open config '" + f.config_path + "'", 0);
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
      json = qgauss::Json::parse(buffer.str());
    } catch (const qgauss::Json::parse_error& e) {
      throw qgauss::ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
    }
    if (json.contains("command") && json["command"] != command)
      throw qgauss::ParseError("config command does not match '" + command + "'", 0);
  }
  json["command"] = command;
  if (f.k) json["k"] = *f.k;
  if (f.n) json["n"] = *f.n;
  if (!f.n_values.empty()) json["n_values"] = f.n_values;
  if (f.q) json["q"] = *f.q;
  if (!f.lambda.empty()) json["lambda"] = f.lambda;
  if (f.seed) json["seed"] = *f.seed;
  if (!f.seeds.empty()) json["seeds"] = f.seeds;
  if (!f.words.empty()) json["words"] = f.words;
  if (f.cutoff) json["C"] = *f.cutoff;
  if (f.t) json["t"] = *f.t;
  return json;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qgauss: finite models of q-Gaussian and q-Araki-Woods algebras"};
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::string> commands{"relations", "moments", "modular",
                                          "clt",       "truncate", "discretize"};
  for (const auto& name : commands) add_flags(app.add_subcommand(name, "run the " + name + " suite"), flags);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qgauss::kExitUsage;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  qgauss::Report report;
  try {
    qgauss::set_thread_count(flags.threads);
    const qgauss::ExperimentConfig cfg = qgauss::config_from_json(merged_config(command, flags));
    report = qgauss::run(cfg);
  } catch (const qgauss::Error& e) {
    std::cerr << "qgauss " << command << ": " << e.what() << '\n';
    return qgauss::kExitUsage;
  }

  const std::string text =
      flags.format == "csv" ? report.to_csv() : report.to_json().dump(2) + "\n";
  if (flags.out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(flags.out_path);
    if (!out) {
      std::cerr << "qgauss: cannot write '" << flags.out_path << "'\n";
      return qgauss::kExitUsage;
    }
    out << text;
  }
  for (const auto& c : report.checks)
    std::cerr << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.value << ")\n";
  return report.passed() ? qgauss::kExitPass : qgauss::kExitCheckFailure;
}
