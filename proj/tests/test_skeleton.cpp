#include <doctest.h>

#include <fstream>

#include <nlohmann/json.hpp>

#include "kocycle/skeleton.hpp"

using namespace kocycle;

namespace {

std::string data_path(const char* name) {
  return std::string(KOCYCLE_DATA_DIR) + "/" + name;
}

Skeleton bowtie() {
  // Two vertices, full colour-1 and colour-2 connectivity: M1 = M2 = ones.
  return Skeleton::load(data_path("two_vertex_2graph.json"));
}

}  // namespace

TEST_CASE("skeleton json round trip preserves the value") {
  Skeleton s = bowtie();
  Skeleton again = Skeleton::from_json(s.to_json());
  CHECK(s == again);
  CHECK(again.rank() == 2);
  CHECK(again.vertex_count() == 2);
  CHECK(again.edges(1).size() == 4);
  CHECK(again.edges(2).size() == 4);
}

TEST_CASE("edge accessors follow file order and colour lists") {
  Skeleton s = bowtie();
  CHECK(s.vertex_index("u") == 0);
  CHECK(s.vertex_index("v") == 1);
  CHECK_THROWS_AS((void)s.vertex_index("zz"), ParseError);
  CHECK(s.edge(1, 1).id == "a01");
  CHECK(s.edge(1, 1).range == 0);
  CHECK(s.edge(1, 1).source == 1);
  CHECK_THROWS_AS((void)s.edges(3), InvalidArgument);
  CHECK(s.edge_positions(2, 1, 0) == std::vector<std::size_t>{2});
}

TEST_CASE("constructor rejects malformed data") {
  CHECK_THROWS_AS(Skeleton(0, {"v"}, {}), ParseError);
  CHECK_THROWS_AS(Skeleton(1, {"v", "v"}, {}), ParseError);
  CHECK_THROWS_AS(Skeleton(1, {"v"}, {{"e", 2, 0, 0}}), ParseError);
  CHECK_THROWS_AS(Skeleton(1, {"v"}, {{"e", 1, 1, 0}}), ParseError);
  CHECK_THROWS_AS(Skeleton(1, {"v"}, {{"e", 1, 0, 0}, {"e", 1, 0, 0}}),
                  ParseError);
}

TEST_CASE("from_json rejects structural garbage") {
  CHECK_THROWS_AS(Skeleton::from_json(nlohmann::json::array()), ParseError);
  CHECK_THROWS_AS(Skeleton::from_json({{"k", 2}}), ParseError);
  nlohmann::json doc = {{"k", 1},
                        {"vertices", {"v"}},
                        {"edges", {{{"id", "e"},
                                    {"color", 1},
                                    {"range", "v"},
                                    {"source", "nope"}}}}};
  CHECK_THROWS_AS(Skeleton::from_json(doc), ParseError);
}

TEST_CASE("adjacency matrices count parallel edges by (range, source)") {
  Skeleton s = bowtie();
  CountMatrix m1 = adjacency_matrix(s, 1);
  CHECK(m1.rows() == 2);
  CHECK(m1(0, 0) == 1);
  CHECK(m1(0, 1) == 1);
  CHECK(m1(1, 0) == 1);
  CHECK(m1(1, 1) == 1);
  CHECK(adjacency_matrix(s, 2) == m1);
}

TEST_CASE("two colour paths are ordered by outer then inner position") {
  Skeleton s = bowtie();
  // Outer colour-1 edge with range u, inner colour-2 edge with source v,
  // meeting at either intermediate vertex.
  auto paths = two_color_paths(s, 1, 2, 0, 1);
  REQUIRE(paths.size() == 2);
  CHECK(paths[0] == PathPair{0, 1});  // a00 then b01
  CHECK(paths[1] == PathPair{1, 3});  // a01 then b11
  CHECK(std::is_sorted(paths.begin(), paths.end()));

  PairBasis basis(s, 1, 2);
  CHECK(basis.dim(0, 1) == 2);
  CHECK(basis.index_of(0, 1, PathPair{1, 3}) == 1);
}

TEST_CASE("validate_skeleton accepts the fixtures") {
  CHECK(validate_skeleton(bowtie()).ok());
  CHECK(validate_skeleton(Skeleton::load(data_path("single_vertex_22.json")))
            .ok());
  CHECK(validate_skeleton(Skeleton::load(data_path("single_vertex_222.json")))
            .ok());
}

TEST_CASE("a vertex that receives no edge of some colour is flagged") {
  // Colour 2 never reaches u.
  Skeleton s(2, {"u", "v"},
             {{"a0", 1, 0, 0},
              {"a1", 1, 1, 1},
              {"b0", 2, 1, 0},
              {"b1", 2, 1, 1}});
  ValidationReport report = validate_skeleton(s);
  REQUIRE_FALSE(report.ok());
  CHECK(report.violations.front().kind == "no_sources");
}

TEST_CASE("mismatched two colour path counts are flagged with the witness") {
  // M1 = [[1,1],[1,0]] and M2 = diag(1,2) do not commute: the (u,v) entries
  // of M1*M2 and M2*M1 are 2 and 1.
  Skeleton s(2, {"u", "v"},
             {{"a0", 1, 0, 1},
              {"a1", 1, 1, 0},
              {"a2", 1, 0, 0},
              {"b0", 2, 0, 0},
              {"b1", 2, 1, 1},
              {"b2", 2, 1, 1}});
  ValidationReport report = validate_skeleton(s);
  REQUIRE_FALSE(report.ok());
  CHECK(report.violations.front().kind == "path_count_mismatch");
  // The message names the vertex pair and colour pair of the counterexample.
  CHECK(report.violations.front().message.find("|u E1 E2 v| = 2") !=
        std::string::npos);
}

TEST_CASE("rank one skeletons validate with an explanatory note") {
  Skeleton s(1, {"v"}, {{"e", 1, 0, 0}});
  ValidationReport report = validate_skeleton(s);
  CHECK(report.ok());
  REQUIRE_FALSE(report.notes.empty());
}
