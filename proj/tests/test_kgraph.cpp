#include <doctest.h>

#include <algorithm>
#include <array>
#include <complex>
#include <set>
#include <string>
#include <vector>

#include "kocycle/kgraph.hpp"
#include "kocycle/skeleton.hpp"

using namespace kocycle;

namespace {

std::string data_path(const char* name) {
  return std::string(KOCYCLE_DATA_DIR) + "/" + name;
}

// ---- independent associativity oracle for the single-vertex (2,2,2) case.
// A rule is three tables, one per colour pair p < q, sending the descending
// pair (q-edge y, p-edge x) at flat index y*2+x to an ascending pair at flat
// index x'*2+y'. Associativity means the two ways of sorting a descending
// three-colour word into ascending order agree. This re-derives the cube
// condition from scratch, with no shared code with the library.

struct Tables {
  std::array<int, 4> s12, s13, s23;
};

std::pair<int, int> oracle_flip(const std::array<int, 4>& t, int y, int x) {
  int a = t[y * 2 + x];
  return {a / 2, a % 2};
}

bool oracle_associative(const Tables& t) {
  for (int z = 0; z < 2; ++z) {
    for (int y = 0; y < 2; ++y) {
      for (int x = 0; x < 2; ++x) {
        // word (z, y, x), colours (3, 2, 1); sort rightmost pair first
        auto [x1, y1] = oracle_flip(t.s12, y, x);
        auto [x2, z1] = oracle_flip(t.s13, z, x1);
        auto [y2, z2] = oracle_flip(t.s23, z1, y1);
        // ... or leftmost pair first
        auto [y3, z3] = oracle_flip(t.s23, z, y);
        auto [x3, z4] = oracle_flip(t.s13, z3, x);
        auto [x4, y4] = oracle_flip(t.s12, y3, x3);
        if (x2 != x4 || y2 != y4 || z2 != z4) return false;
      }
    }
  }
  return true;
}

std::string encode(const Tables& t) {
  std::string s;
  for (const auto* p : {&t.s12, &t.s13, &t.s23})
    for (int v : *p) s += static_cast<char>('0' + v);
  return s;
}

std::vector<std::array<int, 4>> all_perms4() {
  std::array<int, 4> perm{0, 1, 2, 3};
  std::vector<std::array<int, 4>> out;
  do {
    out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

FactorisationRule rule_from_tables(const Tables& t) {
  FactorisationRule::Map map;
  auto put = [&](int i, int j, const std::array<int, 4>& tab) {
    std::vector<std::size_t> m(tab.begin(), tab.end());
    map.emplace(BlockKey{i, j, 0, 0}, std::move(m));
  };
  put(1, 2, t.s12);
  put(1, 3, t.s13);
  put(2, 3, t.s23);
  return FactorisationRule(std::move(map));
}

}  // namespace

TEST_CASE("tensor rule of the single vertex (2,2) skeleton") {
  Skeleton s = Skeleton::load(data_path("single_vertex_22.json"));
  FactorisationRule rule = tensor_rule(s);
  // Descending (b-th colour-2 edge, a-th colour-1 edge) at index b*2+a maps
  // to ascending (a, b) at index a*2+b.
  CHECK(rule.at(BlockKey{1, 2, 0, 0}) ==
        std::vector<std::size_t>{0, 2, 1, 3});
  ValidationReport report = validate_factorisation(s, rule);
  CHECK(report.ok());
  REQUIRE_FALSE(report.notes.empty());
  CHECK(report.notes.front().find("vacuous") != std::string::npos);
}

TEST_CASE("factorisation rule json round trip") {
  Skeleton s = Skeleton::load(data_path("single_vertex_222.json"));
  FactorisationRule rule = tensor_rule(s);
  FactorisationRule again = FactorisationRule::from_json(s, rule.to_json(s));
  CHECK(rule == again);

  CHECK_THROWS_AS(FactorisationRule::from_json(s, nlohmann::json::object()),
                  ParseError);
  nlohmann::json doc = rule.to_json(s);
  doc["blocks"].push_back(doc["blocks"][0]);  // duplicate key
  CHECK_THROWS_AS(FactorisationRule::from_json(s, doc), ParseError);
  nlohmann::json bad = rule.to_json(s);
  bad["blocks"][0]["j"] = 9;
  CHECK_THROWS_AS(FactorisationRule::from_json(s, bad), ParseError);
}

TEST_CASE("structural violations are reported by kind") {
  Skeleton s = Skeleton::load(data_path("single_vertex_222.json"));
  FactorisationRule good = tensor_rule(s);

  SUBCASE("missing block") {
    FactorisationRule::Map map = good.blocks();
    map.erase(BlockKey{2, 3, 0, 0});
    ValidationReport r = validate_factorisation(s, FactorisationRule(std::move(map)));
    REQUIRE_FALSE(r.ok());
    CHECK(r.violations.front().kind == "missing_block");
  }
  SUBCASE("dimension mismatch") {
    FactorisationRule::Map map = good.blocks();
    map[BlockKey{1, 2, 0, 0}] = {0, 1, 2};
    ValidationReport r = validate_factorisation(s, FactorisationRule(std::move(map)));
    REQUIRE_FALSE(r.ok());
    CHECK(r.violations.front().kind == "dimension_mismatch");
  }
  SUBCASE("not bijective") {
    FactorisationRule::Map map = good.blocks();
    map[BlockKey{1, 2, 0, 0}] = {0, 0, 1, 3};
    ValidationReport r = validate_factorisation(s, FactorisationRule(std::move(map)));
    REQUIRE_FALSE(r.ok());
    CHECK(r.violations.front().kind == "not_bijective");
  }
  SUBCASE("blocks on empty path spaces") {
    // Disconnected two-colour structure: the (u, v) pair space is empty. An
    // empty map there is a harmless no-op; a populated one is an error.
    Skeleton d(2, {"u", "v"},
               {{"au", 1, 0, 0}, {"av", 1, 1, 1}, {"bu", 2, 0, 0}, {"bv", 2, 1, 1}});
    REQUIRE(validate_skeleton(d).ok());
    FactorisationRule::Map map;
    map.emplace(BlockKey{1, 2, 0, 0}, std::vector<std::size_t>{0});
    map.emplace(BlockKey{1, 2, 1, 1}, std::vector<std::size_t>{0});
    map.emplace(BlockKey{1, 2, 0, 1}, std::vector<std::size_t>{});
    CHECK(validate_factorisation(d, FactorisationRule(map)).ok());
    map[BlockKey{1, 2, 0, 1}] = {0};
    ValidationReport r =
        validate_factorisation(d, FactorisationRule(std::move(map)));
    REQUIRE_FALSE(r.ok());
    CHECK(r.violations.front().kind == "dimension_mismatch");
  }
  SUBCASE("unknown block key") {
    FactorisationRule::Map map = good.blocks();
    map.emplace(BlockKey{1, 4, 0, 0}, std::vector<std::size_t>{0});
    ValidationReport r =
        validate_factorisation(s, FactorisationRule(std::move(map)));
    REQUIRE_FALSE(r.ok());
    CHECK(r.violations.front().kind == "unknown_block");
  }
}

TEST_CASE("associativity failures are caught for k = 3") {
  Skeleton s = Skeleton::load(data_path("single_vertex_222.json"));
  auto perms = all_perms4();
  // First full-size bijection triple the oracle rejects.
  bool checked = false;
  for (const auto& a : perms) {
    for (const auto& b : perms) {
      Tables t{a, b, perms[0]};
      if (!oracle_associative(t)) {
        ValidationReport r = validate_factorisation(s, rule_from_tables(t));
        REQUIRE_FALSE(r.ok());
        CHECK(r.violations.front().kind == "associativity");
        checked = true;
        break;
      }
    }
    if (checked) break;
  }
  CHECK(checked);
}

TEST_CASE("enumeration matches the brute force oracle exactly") {
  Skeleton s = Skeleton::load(data_path("single_vertex_222.json"));

  std::set<std::string> oracle;
  auto perms = all_perms4();
  for (const auto& a : perms)
    for (const auto& b : perms)
      for (const auto& c : perms) {
        Tables t{a, b, c};
        if (oracle_associative(t)) oracle.insert(encode(t));
      }

  std::set<std::string> lib;
  EnumerationResult res =
      enumerate_factorisations(s, {}, [&](const FactorisationRule& r) {
        Tables t;
        auto get = [&](int i, int j, std::array<int, 4>& out) {
          const auto& m = r.at(BlockKey{i, j, 0, 0});
          for (int d = 0; d < 4; ++d) out[d] = static_cast<int>(m[d]);
        };
        get(1, 2, t.s12);
        get(1, 3, t.s13);
        get(2, 3, t.s23);
        lib.insert(encode(t));
      });

  CHECK(res.status == EnumerationStatus::Complete);
  CHECK(res.count == oracle.size());
  CHECK(lib == oracle);
}

TEST_CASE("enumeration counts for k = 2 are factorials per block") {
  Skeleton single = Skeleton::load(data_path("single_vertex_22.json"));
  EnumerationResult res = enumerate_factorisations(single, {}, {});
  CHECK(res.status == EnumerationStatus::Complete);
  CHECK(res.count == 24);  // one 4-dimensional block

  // Four blocks of dimension 2 on the full two-vertex skeleton.
  Skeleton twov = Skeleton::load(data_path("two_vertex_2graph.json"));
  EnumerationResult res2 = enumerate_factorisations(twov, {}, {});
  CHECK(res2.status == EnumerationStatus::Complete);
  CHECK(res2.count == 16);
}

TEST_CASE("enumeration respects limits and budgets") {
  Skeleton s = Skeleton::load(data_path("single_vertex_22.json"));

  EnumerationOptions limited;
  limited.limit = 5;
  std::size_t seen = 0;
  EnumerationResult res =
      enumerate_factorisations(s, limited, [&](const FactorisationRule&) { ++seen; });
  CHECK(res.status == EnumerationStatus::LimitReached);
  CHECK(res.count == 5);
  CHECK(seen == 5);

  EnumerationOptions strangled;
  strangled.budget = 1;
  EnumerationResult res2 = enumerate_factorisations(s, strangled, {});
  CHECK(res2.status == EnumerationStatus::Truncated);
  CHECK(res2.count < 24);

  // Every emitted rule validates.
  EnumerationOptions few;
  few.limit = 10;
  enumerate_factorisations(s, few, [&](const FactorisationRule& r) {
    CHECK(validate_factorisation(s, r).ok());
  });

  Skeleton bad(2, {"u", "v"},
               {{"a0", 1, 0, 1},
                {"a1", 1, 1, 0},
                {"a2", 1, 0, 0},
                {"b0", 2, 0, 0},
                {"b1", 2, 1, 1},
                {"b2", 2, 1, 1}});
  CHECK_THROWS_AS(enumerate_factorisations(bad, {}, {}), InvalidArgument);
}

TEST_CASE("enumeration order is deterministic and lexicographic") {
  Skeleton s = Skeleton::load(data_path("single_vertex_22.json"));
  std::vector<std::vector<std::size_t>> maps;
  enumerate_factorisations(s, {}, [&](const FactorisationRule& r) {
    maps.push_back(r.at(BlockKey{1, 2, 0, 0}));
  });
  REQUIRE(maps.size() == 24);
  CHECK(std::is_sorted(maps.begin(), maps.end()));
  CHECK(maps.front() == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(maps.back() == std::vector<std::size_t>{3, 2, 1, 0});
}

TEST_CASE("constant cocycles validate and phase modulus is enforced") {
  Skeleton s = Skeleton::load(data_path("single_vertex_222.json"));
  FactorisationRule rule = tensor_rule(s);

  CubicalCocycle third =
      constant_cocycle(s, std::polar(1.0, 2.0 * 3.14159265358979 / 3.0));
  CHECK(validate_cubical_cocycle(s, rule, third).ok());

  CubicalCocycle big = constant_cocycle(s, {1.1, 0.0});
  ValidationReport r = validate_cubical_cocycle(s, rule, big);
  REQUIRE_FALSE(r.ok());
  CHECK(r.violations.front().kind == "modulus");
}

TEST_CASE("missing squares are flagged") {
  Skeleton s = Skeleton::load(data_path("single_vertex_22.json"));
  FactorisationRule rule = tensor_rule(s);
  nlohmann::json doc = constant_cocycle(s, 1.0).to_json(s);
  REQUIRE(doc.size() == 4);
  doc.erase(2);
  CubicalCocycle partial = CubicalCocycle::from_json(s, doc);
  ValidationReport r = validate_cubical_cocycle(s, rule, partial);
  REQUIRE_FALSE(r.ok());
  CHECK(r.violations.front().kind == "missing_square");
}

TEST_CASE("cube identity violations are caught for k = 3") {
  Skeleton s = Skeleton::load(data_path("single_vertex_222.json"));
  // The identity rule (every table the identity permutation) is associative;
  // flipping the sign of a single square phase must break some 3-cube.
  Tables ident{{0, 1, 2, 3}, {0, 1, 2, 3}, {0, 1, 2, 3}};
  REQUIRE(oracle_associative(ident));
  FactorisationRule rule = rule_from_tables(ident);

  CubicalCocycle::Map phases = constant_cocycle(s, 1.0).phases();
  phases[BlockKey{1, 2, 0, 0}][0] = -1.0;
  ValidationReport r =
      validate_cubical_cocycle(s, rule, CubicalCocycle(std::move(phases)));
  REQUIRE_FALSE(r.ok());
  CHECK(r.violations.front().kind == "cube_identity");
}

TEST_CASE("cubical cocycle json round trip") {
  Skeleton s = Skeleton::load(data_path("single_vertex_222.json"));
  CubicalCocycle phi = constant_cocycle(s, {0.0, 1.0});
  CubicalCocycle again = CubicalCocycle::from_json(s, phi.to_json(s));
  CHECK(phi == again);

  nlohmann::json doc = phi.to_json(s);
  doc.push_back(doc[0]);  // duplicate square
  CHECK_THROWS_AS(CubicalCocycle::from_json(s, doc), ParseError);
  nlohmann::json bad = phi.to_json(s);
  bad[0]["index"] = 99;
  CHECK_THROWS_AS(CubicalCocycle::from_json(s, bad), ParseError);
}

TEST_CASE("invalid rules block the cubical check with a note") {
  Skeleton s = Skeleton::load(data_path("single_vertex_222.json"));
  FactorisationRule::Map map = tensor_rule(s).blocks();
  map.erase(BlockKey{2, 3, 0, 0});
  ValidationReport r = validate_cubical_cocycle(
      s, FactorisationRule(std::move(map)), constant_cocycle(s, 1.0));
  REQUIRE_FALSE(r.ok());
  CHECK(r.violations.front().kind == "missing_block");
}
