#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "qgauss/cli.hpp"
#include "qgauss/common.hpp"
#include "qgauss/qmoments.hpp"

using namespace qgauss;

namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("qgauss_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int invoke(const std::string& args) {
  const std::string cmd =
      std::string(QGAUSS_BINARY) + " " + args + " > " + (scratch() / "stdout").string() +
      " 2> " + (scratch() / "stderr").string();
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

template <typename E>
std::size_t error_position(const std::string& text) {
  try {
    parse_config(text);
  } catch (const E& e) {
    if constexpr (std::is_same_v<E, ParseError>) return e.position();
    return 0;
  }
  FAIL("no error raised for " << text);
  return 0;
}

}  // namespace

TEST_CASE("config parsing examples") {
  const ExperimentConfig c =
      parse_config(R"({"command":"relations","k":1,"lambda":[4],"n":2,"seed":7})");
  CHECK(c.command == Command::relations);
  CHECK(c.twisted());
  CHECK(c.n == 2);
  CHECK(c.seed == 7);
  CHECK(c.q == 0.5);

  const ExperimentConfig d = parse_config(R"({"command":"moments"})");
  CHECK(d.k == 1);
  CHECK(d.seed == 0);
  CHECK(d.q == 0.5);

  CHECK_THROWS_AS(parse_config(R"({"command":"clt","q":2.0,"n":3})"), DomainError);
  CHECK_THROWS_AS(parse_config(R"({"command":"modular","k":1})"), DomainError);
  CHECK_THROWS_AS(parse_config(R"({"command":"relations","k":2,"lambda":[4]})"), DomainError);

  const ExperimentConfig w =
      parse_config(R"({"command":"moments","words":["s1 s1* s1 s1*"]})");
  const StarWord expected{{1, false}, {1, true}, {1, false}, {1, true}};
  CHECK(w.command == Command::moments);
  REQUIRE(w.words.size() == 1);
  CHECK(parse_star_word(w.words[0]) == expected);
  CHECK(parse_star_word("c1 c1* c1 c1*") == expected);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config(R"({"command":"simulate"})"), ParseError);
  CHECK_THROWS_AS(parse_config(R"({"command":"clt","qq":0.1})"), ParseError);
  CHECK_THROWS_AS(parse_config(R"({"k":1})"), ParseError);
  CHECK_THROWS_AS(parse_config(R"({"command":"clt","n":"three"})"), ParseError);
  CHECK(error_position<ParseError>(R"({"command": "clt",, })") == 19);
  const std::size_t word_pos =
      error_position<ParseError>(R"({"command":"clt","lambda":[4],"words":["s1 q1"]})");
  CHECK(word_pos == 3);
}

TEST_CASE("relations run") {
  const Report r = run(parse_config(R"({"command":"relations","k":1,"lambda":[4],"n":1})"));
  CHECK(r.passed());
  REQUIRE_FALSE(r.rows.empty());
  for (const Json& row : r.rows) CHECK(row["max_residual"].get<double>() <= 1e-12);
  CHECK(r.header["version"] == kToolVersion);
  CHECK(r.header.contains("seed_derivation"));
}

TEST_CASE("moments run") {
  const Report r = run(parse_config(R"({"command":"moments","words":["c1 c1* c1 c1*","c1"]})"));
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0]["value_re"].get<double>() == doctest::Approx(2.0));
  CHECK(r.rows[0]["value_im"].get<double>() == 0.0);
  CHECK(r.rows[0]["mu"] == Json::array({1.0}));
  CHECK(r.rows[1]["value_re"].get<double>() == 0.0);
  CHECK(r.passed());
}

TEST_CASE("clt run") {
  const Report r = run(parse_config(
      R"({"command":"clt","q":0.5,"n_values":[4,5,6,7,8,9,10],"seeds":[0,1,2],"words":["g1 g1 g1 g1"],"slack":1.0})"));
  REQUIRE(r.rows.size() == 7);
  for (const Json& row : r.rows) CHECK(row["limit_re"].get<double>() == doctest::Approx(2.5));
  CHECK(r.rows.back()["error"].get<double>() < r.rows.front()["error"].get<double>());
  CHECK(r.passed());
}

TEST_CASE("reports are reproducible") {
  const ExperimentConfig cfg = parse_config(
      R"({"command":"clt","lambda":[4],"n_values":[2,3],"seeds":[1,2],"words":["s1 s1* s1 s1*","g1 g-1"]})");
  const Report a = run(cfg), b = run(cfg);
  CHECK(a.rows_digest() == b.rows_digest());
  Json ja = a.to_json(), jb = b.to_json();
  ja["header"].erase("timestamp");
  jb["header"].erase("timestamp");
  CHECK(ja.dump() == jb.dump());
  CHECK(a.to_csv() == b.to_csv());
}

TEST_CASE("csv output") {
  const Report r = run(parse_config(R"({"command":"discretize","points":[0.5,1.8],"n_values":[2]})"));
  const std::string csv = r.to_csv();
  std::istringstream lines(csv);
  std::string header, first, second;
  std::getline(lines, header);
  std::getline(lines, first);
  std::getline(lines, second);
  CHECK(header == "t,n,num,den,value,reciprocal_exact");
  CHECK(first == "0.5,2,1,2,0.5,true");
  CHECK(second == "1.8,2,7,4,1.75,true");

  Report tiny;
  tiny.rows.push_back({{"x", 0.1 + 0.2}, {"label", "a,b"}});
  CHECK(tiny.to_csv() == "x,label\n0.30000000000000004,\"a,b\"\n");
}

TEST_CASE("exit codes") {
  const fs::path ok = write_file("ok.json", R"({"command":"relations","k":1,"lambda":[4],"n":1})");
  const fs::path out = scratch() / "report.json";
  CHECK(invoke("relations --config " + ok.string() + " --out " + out.string()) == kExitPass);
  const Json report = Json::parse(slurp(out));
  CHECK(report["summary"]["passed"] == true);
  CHECK(invoke("relations --config " + ok.string() + " --threads 4 --format csv") == kExitPass);
  CHECK(slurp(scratch() / "stdout").rfind("n,seed,dim,identity", 0) == 0);

  CHECK(invoke("simulate") == kExitUsage);
  CHECK(invoke("relations --config " + write_file("bad.json", "{\"k\": ").string()) == kExitUsage);
  CHECK(invoke("clt --q 2.0") == kExitUsage);
  CHECK(invoke("moments --word \"c1 x\"") == kExitUsage);
  CHECK(invoke("moments --config " + ok.string()) == kExitUsage);

  const fs::path failing = write_file(
      "fail.json",
      R"({"command":"clt","q":0.5,"n_values":[4,7,10],"seeds":[0,1,2],"words":["g1 g1 g1 g1"],"slack":0.0})");
  CHECK(invoke("clt --config " + failing.string()) == kExitCheckFailure);
  CHECK(slurp(scratch() / "stderr").find("FAIL") != std::string::npos);
}
