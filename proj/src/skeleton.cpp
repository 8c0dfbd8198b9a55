#include "kocycle/skeleton.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace kocycle {

namespace {

std::string require_string(const nlohmann::json& doc, const char* field) {
  if (!doc.contains(field) || !doc[field].is_string()) {
    throw ParseError(std::string("missing or non-string field \"") + field +
                     "\"");
  }
  return doc[field].get<std::string>();
}

}  // namespace

Skeleton::Skeleton(int k, std::vector<std::string> vertices,
                   std::vector<Edge> edges)
    : k_(k), vertices_(std::move(vertices)), by_color_(k > 0 ? k : 0) {
  if (k < 1) throw ParseError("rank k must be at least 1");
  std::set<std::string_view> seen;
  for (const auto& id : vertices_) {
    if (!seen.insert(id).second)
      throw ParseError("duplicate vertex id \"" + id + "\"");
  }
  std::set<std::string> edge_ids;
  for (auto& e : edges) {
    if (e.color < 1 || e.color > k_)
      throw ParseError("edge \"" + e.id + "\" has colour out of range 1..k");
    if (e.range >= vertices_.size() || e.source >= vertices_.size())
      throw ParseError("edge \"" + e.id + "\" references unknown vertex");
    if (!edge_ids.insert(e.id).second)
      throw ParseError("duplicate edge id \"" + e.id + "\"");
    by_color_[e.color - 1].push_back(std::move(e));
  }
}

Skeleton Skeleton::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("skeleton document must be an object");
  if (!doc.contains("k") || !doc["k"].is_number_integer())
    throw ParseError("missing or non-integer field \"k\"");
  int k = doc["k"].get<int>();
  if (!doc.contains("vertices") || !doc["vertices"].is_array())
    throw ParseError("missing or non-array field \"vertices\"");

  std::vector<std::string> vertices;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& v : doc["vertices"]) {
    if (!v.is_string()) throw ParseError("vertex ids must be strings");
    auto id = v.get<std::string>();
    if (!index.emplace(id, vertices.size()).second)
      throw ParseError("duplicate vertex id \"" + id + "\"");
    vertices.push_back(std::move(id));
  }

  if (!doc.contains("edges") || !doc["edges"].is_array())
    throw ParseError("missing or non-array field \"edges\"");
  std::vector<Edge> edges;
  for (const auto& e : doc["edges"]) {
    if (!e.is_object()) throw ParseError("edges must be objects");
    Edge edge;
    edge.id = require_string(e, "id");
    if (!e.contains("color") || !e["color"].is_number_integer())
      throw ParseError("edge \"" + edge.id + "\" has no integer colour");
    edge.color = e["color"].get<int>();
    auto lookup = [&](const char* field) {
      auto id = require_string(e, field);
      auto it = index.find(id);
      if (it == index.end())
        throw ParseError("edge \"" + edge.id + "\" references unknown vertex \"" +
                         id + "\"");
      return it->second;
    };
    edge.range = lookup("range");
    edge.source = lookup("source");
    edges.push_back(std::move(edge));
  }
  return Skeleton(k, std::move(vertices), std::move(edges));
}

Skeleton Skeleton::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open \"" + path + "\"");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("invalid JSON in \"" + path + "\": " + e.what());
  }
  return from_json(doc);
}

nlohmann::json Skeleton::to_json() const {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& list : by_color_) {
    for (const auto& e : list) {
      edges.push_back({{"id", e.id},
                       {"color", e.color},
                       {"range", vertices_[e.range]},
                       {"source", vertices_[e.source]}});
    }
  }
  return {{"k", k_}, {"vertices", vertices_}, {"edges", edges}};
}

std::size_t Skeleton::vertex_index(std::string_view id) const {
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    if (vertices_[i] == id) return i;
  }
  throw ParseError("unknown vertex id \"" + std::string(id) + "\"");
}

const std::vector<Edge>& Skeleton::edges(int color) const {
  if (color < 1 || color > k_)
    throw InvalidArgument("colour " + std::to_string(color) +
                          " out of range 1.." + std::to_string(k_));
  return by_color_[color - 1];
}

const Edge& Skeleton::edge(int color, std::size_t pos) const {
  return edges(color).at(pos);
}

std::vector<std::size_t> Skeleton::edge_positions(int color, std::size_t v,
                                                  std::size_t w) const {
  std::vector<std::size_t> out;
  const auto& list = edges(color);
  for (std::size_t p = 0; p < list.size(); ++p) {
    if (list[p].range == v && list[p].source == w) out.push_back(p);
  }
  return out;
}

ValidationReport validate_skeleton(const Skeleton& s) {
  ValidationReport report;
  const std::size_t n = s.vertex_count();

  for (int c = 1; c <= s.rank(); ++c) {
    std::vector<bool> receives(n, false);
    for (const auto& e : s.edges(c)) receives[e.range] = true;
    for (std::size_t v = 0; v < n; ++v) {
      if (!receives[v]) {
        report.add("no_sources", "vertex \"" + s.vertex_id(v) +
                                     "\" receives no colour-" +
                                     std::to_string(c) + " edge");
      }
    }
  }

  for (int i = 1; i <= s.rank(); ++i) {
    CountMatrix mi = adjacency_matrix(s, i);
    for (int j = i + 1; j <= s.rank(); ++j) {
      CountMatrix mj = adjacency_matrix(s, j);
      CountMatrix ij = mi * mj;
      CountMatrix ji = mj * mi;
      for (std::size_t v = 0; v < n; ++v) {
        for (std::size_t w = 0; w < n; ++w) {
          if (ij(v, w) != ji(v, w)) {
            std::ostringstream msg;
            msg << "|" << s.vertex_id(v) << " E" << i << " E" << j << " "
                << s.vertex_id(w) << "| = " << ij(v, w) << " but |"
                << s.vertex_id(v) << " E" << j << " E" << i << " "
                << s.vertex_id(w) << "| = " << ji(v, w);
            report.add("path_count_mismatch", msg.str());
          }
        }
      }
    }
  }
  if (s.rank() == 1) report.note("k = 1: no colour pairs to compare");
  return report;
}

CountMatrix adjacency_matrix(const Skeleton& s, int color) {
  const std::size_t n = s.vertex_count();
  CountMatrix m = CountMatrix::Zero(n, n);
  for (const auto& e : s.edges(color)) m(e.range, e.source) += 1;
  return m;
}

std::vector<PathPair> two_color_paths(const Skeleton& s, int i, int j,
                                      std::size_t v, std::size_t w) {
  if (i == j) throw InvalidArgument("two-colour paths need distinct colours");
  std::vector<PathPair> out;
  const auto& outer = s.edges(i);
  const auto& inner = s.edges(j);
  for (std::size_t e = 0; e < outer.size(); ++e) {
    if (outer[e].range != v) continue;
    for (std::size_t f = 0; f < inner.size(); ++f) {
      if (inner[f].source != w) continue;
      if (outer[e].source == inner[f].range) out.push_back({e, f});
    }
  }
  return out;
}

PairBasis::PairBasis(const Skeleton& s, int first, int second)
    : first_(first), second_(second), nv_(s.vertex_count()) {
  paths_.resize(nv_ * nv_);
  for (std::size_t v = 0; v < nv_; ++v) {
    for (std::size_t w = 0; w < nv_; ++w) {
      paths_[v * nv_ + w] = two_color_paths(s, first, second, v, w);
    }
  }
}

const std::vector<PathPair>& PairBasis::paths(std::size_t v,
                                              std::size_t w) const {
  return paths_.at(v * nv_ + w);
}

std::size_t PairBasis::dim(std::size_t v, std::size_t w) const {
  return paths(v, w).size();
}

std::size_t PairBasis::index_of(std::size_t v, std::size_t w,
                                PathPair p) const {
  const auto& list = paths(v, w);
  auto it = std::lower_bound(list.begin(), list.end(), p);
  if (it == list.end() || *it != p)
    throw InvalidArgument("path pair not in basis");
  return static_cast<std::size_t>(it - list.begin());
}

}  // namespace kocycle
