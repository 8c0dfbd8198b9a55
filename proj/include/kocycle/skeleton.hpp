#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "kocycle/errors.hpp"
#include "kocycle/validation.hpp"

namespace kocycle {

/// One edge of a coloured graph. Vertices are stored as indices into the
/// skeleton's vertex list; a path e then f is composable when s(e) = r(f),
/// with r(ef) = r(e) and s(ef) = s(f).
struct Edge {
  std::string id;
  int color = 1;           // 1..k
  std::size_t range = 0;   // r(e)
  std::size_t source = 0;  // s(e)

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Two-colour path (e, f): e is the outer (range-side) edge, f the inner
/// (source-side) edge; both fields are positions in the respective colour
/// edge lists, not edge ids.
struct PathPair {
  std::size_t outer = 0;
  std::size_t inner = 0;

  friend bool operator==(const PathPair&, const PathPair&) = default;
  friend auto operator<=>(const PathPair&, const PathPair&) = default;
};

/// Identifies one block of a colour-pair-indexed family: ordered colour pair
/// i < j and vertex pair (v, w) = (range, source).
struct BlockKey {
  int i = 1;
  int j = 2;
  std::size_t v = 0;
  std::size_t w = 0;

  friend bool operator==(const BlockKey&, const BlockKey&) = default;
  friend auto operator<=>(const BlockKey&, const BlockKey&) = default;
};

using CountMatrix =
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// A k-coloured skeleton: finite vertex set and, per colour, a finite edge
/// list whose order fixes every derived basis ordering.
class Skeleton {
 public:
  Skeleton(int k, std::vector<std::string> vertices, std::vector<Edge> edges);

  static Skeleton from_json(const nlohmann::json& doc);
  static Skeleton load(const std::string& path);
  nlohmann::json to_json() const;

  int rank() const { return k_; }
  std::size_t vertex_count() const { return vertices_.size(); }
  const std::vector<std::string>& vertex_ids() const { return vertices_; }
  const std::string& vertex_id(std::size_t v) const { return vertices_.at(v); }
  /// Index of a vertex id; throws ParseError for unknown ids.
  std::size_t vertex_index(std::string_view id) const;

  /// Edges of one colour (1-based), in canonical (file) order.
  const std::vector<Edge>& edges(int color) const;
  const Edge& edge(int color, std::size_t pos) const;

  /// Positions (within the colour list) of edges with range v and source w,
  /// ascending. This is the canonical basis order of the edge space vE^1 w.
  std::vector<std::size_t> edge_positions(int color, std::size_t v,
                                          std::size_t w) const;

  friend bool operator==(const Skeleton&, const Skeleton&) = default;

 private:
  int k_ = 1;
  std::vector<std::string> vertices_;
  std::vector<std::vector<Edge>> by_color_;  // index color-1
};

/// Checks the two skeleton invariants: every vertex receives at least one
/// edge of every colour, and two-colour path counts match in both orders.
ValidationReport validate_skeleton(const Skeleton& s);

/// Colour-i adjacency counts: entry (v, w) = |v E^1_i w|.
CountMatrix adjacency_matrix(const Skeleton& s, int color);

/// All paths (e, f) with color(e) = i, color(f) = j, r(e) = v, s(f) = w and
/// s(e) = r(f), ordered lexicographically by (position of e, position of f).
std::vector<PathPair> two_color_paths(const Skeleton& s, int i, int j,
                                      std::size_t v, std::size_t w);

/// Cached two-colour path bases of one ordered colour pair (first, second)
/// for every vertex pair, with positional lookup.
class PairBasis {
 public:
  PairBasis(const Skeleton& s, int first, int second);

  int first() const { return first_; }
  int second() const { return second_; }
  const std::vector<PathPair>& paths(std::size_t v, std::size_t w) const;
  std::size_t dim(std::size_t v, std::size_t w) const;
  /// Position of a path in paths(v, w); throws InvalidArgument if absent.
  std::size_t index_of(std::size_t v, std::size_t w, PathPair p) const;

 private:
  int first_;
  int second_;
  std::size_t nv_;
  std::vector<std::vector<PathPair>> paths_;  // slot v * nv_ + w
};

}  // namespace kocycle
