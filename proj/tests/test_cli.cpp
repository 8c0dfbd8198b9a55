#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kocycle/cli.hpp"
#include "kocycle/homotopy.hpp"
#include "kocycle/kgraph.hpp"
#include "kocycle/ktheory.hpp"
#include "kocycle/skeleton.hpp"
#include "kocycle/unitary_cocycle.hpp"

using namespace kocycle;
namespace fs = std::filesystem;

namespace {

std::string data_path(const char* name) {
  return std::string(KOCYCLE_DATA_DIR) + "/" + name;
}

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_dir() {
  fs::path dir = fs::temp_directory_path() / "kocycle_cli_tests";
  fs::create_directories(dir);
  return dir;
}

std::string write_text(const char* name, const std::string& text) {
  fs::path p = temp_dir() / name;
  std::ofstream file(p, std::ios::binary | std::ios::trunc);
  file << text;
  return p.string();
}

std::string write_json(const char* name, const nlohmann::json& doc) {
  return write_text(name, doc.dump(2));
}

nlohmann::json parse(const std::string& text) {
  return nlohmann::json::parse(text);
}

// k=2 skeleton where vertex "q" receives no colour-1 edge
nlohmann::json sourceless_skeleton() {
  return {{"k", 2},
          {"vertices", {"p", "q"}},
          {"edges",
           {{{"id", "a0"}, {"color", 1}, {"range", "p"}, {"source", "q"}},
            {{"id", "b0"}, {"color", 2}, {"range", "p"}, {"source", "p"}},
            {{"id", "b1"}, {"color", 2}, {"range", "q"}, {"source", "q"}}}}};
}

// single vertex, 5 loops of colour 1 and 2 of colour 2: the rule search
// space has 10! leaves and overruns the default node budget
nlohmann::json wide_skeleton() {
  nlohmann::json edges = nlohmann::json::array();
  for (int m = 0; m < 5; ++m)
    edges.push_back(
        {{"id", "a" + std::to_string(m)}, {"color", 1}, {"range", "v"}, {"source", "v"}});
  for (int m = 0; m < 2; ++m)
    edges.push_back(
        {{"id", "b" + std::to_string(m)}, {"color", 2}, {"range", "v"}, {"source", "v"}});
  return {{"k", 2}, {"vertices", {"v"}}, {"edges", edges}};
}

FactorisationRule identity_rule(const Skeleton& s) {
  FactorisationRule::Map map;
  for (const auto& key :
       {BlockKey{1, 2, 0, 0}, BlockKey{1, 3, 0, 0}, BlockKey{2, 3, 0, 0}})
    map.emplace(key, std::vector<std::size_t>{0, 1, 2, 3});
  (void)s;
  return FactorisationRule(std::move(map));
}

}  // namespace

TEST_CASE("cli usage and parse failures") {
  CliResult help = run_cli({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("validate") != std::string::npos);
  CHECK(help.out.find("enumerate") != std::string::npos);

  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"frobnicate"}).code == 2);
  CHECK(run_cli({"validate"}).code == 2);

  CliResult gone = run_cli({"validate", (temp_dir() / "missing.json").string()});
  CHECK(gone.code == 2);
  CHECK(gone.err.find("error:") != std::string::npos);

  std::string garbage = write_text("garbage.json", "{#");
  CHECK(run_cli({"validate", garbage}).code == 2);
}

TEST_CASE("cli validate layers a skeleton report") {
  std::string skel = data_path("single_vertex_222.json");
  auto s = std::make_shared<const Skeleton>(Skeleton::load(skel));
  std::string rule = write_json("rule.json", tensor_rule(*s).to_json(*s));
  std::string phases =
      write_json("phases.json", constant_cocycle(*s, 1.0).to_json(*s));

  CliResult plain = run_cli({"validate", skel});
  CHECK(plain.code == 0);
  CHECK(parse(plain.out)["ok"] == true);

  CliResult layered = run_cli({"validate", skel, rule, phases});
  CHECK(layered.code == 0);
  CHECK(parse(layered.out)["ok"] == true);

  SUBCASE("violations set the exit code") {
    std::string bad = write_json("sourceless.json", sourceless_skeleton());
    CliResult res = run_cli({"validate", bad});
    CHECK(res.code == 1);
    nlohmann::json doc = parse(res.out);
    CHECK(doc["ok"] == false);
    CHECK_FALSE(doc["violations"].empty());

    // deeper layers are not reached over a broken skeleton
    CliResult withrule = run_cli({"validate", bad, rule});
    CHECK(withrule.code == 1);
    nlohmann::json notes = parse(withrule.out)["notes"];
    bool noted = false;
    for (const auto& note : notes)
      noted |= note.get<std::string>().find("skipped") != std::string::npos;
    CHECK(noted);
  }

  SUBCASE("malformed rule documents are parse errors") {
    std::string broken = write_json("broken_rule.json", {{"blocks", 3}});
    CHECK(run_cli({"validate", skel, broken}).code == 2);
  }
}

TEST_CASE("cli ktheory matches the library and guards the rank") {
  std::string skel = data_path("two_vertex_2graph.json");
  CliResult res = run_cli({"ktheory", skel});
  REQUIRE(res.code == 0);

  Skeleton s = Skeleton::load(skel);
  IntMatrix m1(2, 2), m2(2, 2);
  CountMatrix a1 = adjacency_matrix(s, 1), a2 = adjacency_matrix(s, 2);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 2; ++c) {
      m1(r, c) = a1(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      m2(r, c) = a2(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  CHECK(parse(res.out) == ktheory_2graph(m1, m2).to_json());

  CliResult wrong = run_cli({"ktheory", data_path("single_vertex_222.json")});
  CHECK(wrong.code == 1);
  CHECK(wrong.err.find("Evans formula requires k=2") != std::string::npos);

  SUBCASE("--output writes the same document atomically") {
    fs::path target = temp_dir() / "kt.json";
    fs::remove(target);
    CliResult filed = run_cli({"ktheory", skel, "--output", target.string()});
    CHECK(filed.code == 0);
    CHECK(filed.out.empty());
    CHECK_FALSE(fs::exists(target.string() + ".tmp"));
    std::ifstream file(target);
    nlohmann::json doc = nlohmann::json::parse(file);
    CHECK(doc == parse(res.out));
  }
}

TEST_CASE("cli cocycle derive feeds cocycle check") {
  std::string skel = data_path("single_vertex_222.json");
  auto s = std::make_shared<const Skeleton>(Skeleton::load(skel));
  std::string rule = write_json("rule.json", tensor_rule(*s).to_json(*s));
  std::string phases =
      write_json("phases.json", constant_cocycle(*s, 1.0).to_json(*s));
  fs::path unitary = temp_dir() / "unitary.json";

  CliResult derived = run_cli(
      {"cocycle", "derive", skel, rule, phases, "--output", unitary.string()});
  REQUIRE(derived.code == 0);

  // the emitted document round-trips through the reader
  {
    std::ifstream file(unitary);
    UnitaryCocycle u = UnitaryCocycle::from_json(s, nlohmann::json::parse(file));
    CHECK(cocycle_residual(u) == 0.0);
  }

  CliResult checked = run_cli({"cocycle", "check", skel, unitary.string()});
  CHECK(checked.code == 0);
  CHECK(parse(checked.out)["residual"] == 0.0);

  SUBCASE("non-cocycles fail the default tolerance but pass a loose one") {
    std::mt19937_64 rng(21);
    UnitaryCocycle generic = random_unitary_family(s, rng);
    REQUIRE(cocycle_residual(generic) > 1e-2);
    std::string file = write_json("generic.json", generic.to_json());

    CliResult tight = run_cli({"cocycle", "check", skel, file});
    CHECK(tight.code == 1);
    CHECK(parse(tight.out)["residual"].get<double>() > 1e-2);

    CHECK(run_cli({"cocycle", "check", skel, file, "--tol", "10"}).code == 0);
  }

  SUBCASE("invalid phase layers are rejected before derivation") {
    CubicalCocycle::Map map = constant_cocycle(*s, 1.0).phases();
    map.begin()->second[0] = 1.1;
    std::string offmodulus =
        write_json("offmodulus.json", CubicalCocycle(std::move(map)).to_json(*s));
    CliResult res = run_cli({"cocycle", "derive", skel, rule, offmodulus});
    CHECK(res.code == 1);
    CHECK(res.err.find("error:") != std::string::npos);
  }
}

TEST_CASE("cli path geodesic emits a readable path") {
  std::string skel = data_path("two_vertex_2graph.json");
  auto s = std::make_shared<const Skeleton>(Skeleton::load(skel));
  std::mt19937_64 rng(22);
  UnitaryCocycle u0 = random_unitary_family(s, rng);
  UnitaryCocycle u1 = random_unitary_family(s, rng);
  std::string f0 = write_json("u0.json", u0.to_json());
  std::string f1 = write_json("u1.json", u1.to_json());

  CliResult res = run_cli({"path", "geodesic", skel, f0, f1, "--samples", "4"});
  REQUIRE(res.code == 0);
  CocyclePath path = CocyclePath::from_json(s, parse(res.out));
  REQUIRE(path.samples.size() == 5);
  CHECK(block_distance(path.samples.front().cocycle, u0) == 0.0);
  CHECK(block_distance(path.samples.back().cocycle, u1) == 0.0);

  SUBCASE("--output matches stdout byte for byte") {
    fs::path target = temp_dir() / "path.json";
    CliResult filed = run_cli({"path", "geodesic", skel, f0, f1, "--samples",
                               "4", "--output", target.string()});
    CHECK(filed.code == 0);
    std::ifstream file(target);
    std::stringstream text;
    text << file.rdbuf();
    CHECK(text.str() + "\n" == res.out);
  }
}

TEST_CASE("cli path search succeeds on connectable endpoints") {
  std::string skel = data_path("two_vertex_2graph.json");
  auto s = std::make_shared<const Skeleton>(Skeleton::load(skel));
  std::mt19937_64 rng(23);
  std::string f0 = write_json("s0.json", random_unitary_family(s, rng).to_json());
  std::string f1 = write_json("s1.json", random_unitary_family(s, rng).to_json());

  CliResult res = run_cli({"path", "search", skel, f0, f1, "--samples", "8"});
  CHECK(res.code == 0);
  nlohmann::json doc = parse(res.out);
  REQUIRE(doc.contains("samples"));
  CHECK(doc["samples"].size() >= 9);

  // deterministic given the seed
  CliResult again =
      run_cli({"path", "search", skel, f0, f1, "--samples", "8"});
  CHECK(again.out == res.out);
}

TEST_CASE("cli path search reports unreachable targets") {
  std::string skel = data_path("single_vertex_222.json");
  auto s = std::make_shared<const Skeleton>(Skeleton::load(skel));
  std::string f0 =
      write_json("perm0.json", flip_cocycle(s, identity_rule(*s)).to_json());
  std::string f1 =
      write_json("perm1.json", flip_cocycle(s, tensor_rule(*s)).to_json());

  // both endpoints are exact permutation cocycles (residual 0.0), so they
  // pass the guard at any tolerance, but no float interior sample can
  CliResult res = run_cli(
      {"path", "search", skel, f0, f1, "--samples", "2", "--tol", "1e-17"});
  CHECK(res.code == 3);
  CHECK(res.err.find("path search failed") != std::string::npos);
  nlohmann::json doc = parse(res.out);
  CHECK(doc["success"] == false);
  CHECK(doc["message"] == "residual target not reached on every sample");
  CHECK(doc["residuals"].size() == 3);
}

TEST_CASE("cli enumerate streams, counts, limits and truncates") {
  std::string skel = data_path("single_vertex_22.json");
  auto s = std::make_shared<const Skeleton>(Skeleton::load(skel));

  CliResult counted = run_cli({"enumerate", skel, "--count-only"});
  CHECK(counted.code == 0);
  CHECK(parse(counted.out) ==
        nlohmann::json({{"count", 24}, {"status", "complete"}}));

  CliResult streamed = run_cli({"enumerate", skel});
  CHECK(streamed.code == 0);
  std::istringstream lines(streamed.out);
  std::string line;
  int rules = 0;
  while (std::getline(lines, line)) {
    FactorisationRule rule = FactorisationRule::from_json(*s, parse(line));
    CHECK(validate_factorisation(*s, rule).ok());
    ++rules;
  }
  CHECK(rules == 24);

  CliResult limited = run_cli({"enumerate", skel, "--limit", "5", "--count-only"});
  CHECK(limited.code == 0);
  CHECK(parse(limited.out) ==
        nlohmann::json({{"count", 5}, {"status", "limit_reached"}}));

  SUBCASE("--output collects the stream in one file") {
    fs::path target = temp_dir() / "rules.jsonl";
    CliResult filed = run_cli({"enumerate", skel, "--output", target.string()});
    CHECK(filed.code == 0);
    std::ifstream file(target);
    std::stringstream text;
    text << file.rdbuf();
    CHECK(text.str() == streamed.out);
  }

  SUBCASE("an exhausted node budget is loud") {
    std::string wide = write_json("wide.json", wide_skeleton());
    CliResult res = run_cli({"enumerate", wide, "--count-only"});
    CHECK(res.code == 4);
    CHECK(res.err.find("truncated") != std::string::npos);
    CHECK(parse(res.out)["status"] == "truncated");
  }
}
