#include "kocycle/kgraph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace kocycle {

namespace {

constexpr double kModulusTol = 1e-12;
constexpr double kCubeTol = 1e-10;

struct PairCache {
  const Skeleton& s;
  std::map<std::pair<int, int>, PairBasis> bases;

  const PairBasis& get(int p, int q) {
    auto key = std::make_pair(p, q);
    auto it = bases.find(key);
    if (it == bases.end()) it = bases.try_emplace(key, PairBasis(s, p, q)).first;
    return it->second;
  }
};

std::string block_name(const Skeleton& s, const BlockKey& key) {
  std::ostringstream os;
  os << "(i=" << key.i << ", j=" << key.j << ", v=\"" << s.vertex_id(key.v)
     << "\", w=\"" << s.vertex_id(key.w) << "\")";
  return os.str();
}

// One adjacent-pair flip along a route. The square crossed by the flip is
// identified by its block key and ascending-basis position.
struct RouteStep {
  BlockKey key;
  std::size_t asc_index = 0;
};

struct RouteResult {
  bool known = true;  // false when a needed bijection is not available
  std::array<std::size_t, 3> final_edges{};  // descending colour order
  std::array<RouteStep, 3> steps{};
};

// Flips the ascending pair (x, y) of colours p < q spanning v -> u to its
// descending presentation, using the inverse of the block bijection.
template <typename Lookup>
struct Flipper {
  const Skeleton& s;
  PairCache& pc;
  Lookup& inverse_of;  // BlockKey -> const std::vector<std::size_t>* (or null)

  struct Out {
    bool known = false;
    std::size_t outer = 0;  // colour q
    std::size_t inner = 0;  // colour p
    RouteStep step;
  };

  Out flip(int p, int q, std::size_t v, std::size_t u, std::size_t x,
           std::size_t y) {
    BlockKey key{p, q, v, u};
    std::size_t a = pc.get(p, q).index_of(v, u, {x, y});
    Out out;
    out.step = {key, a};
    const std::vector<std::size_t>* inv = inverse_of(key);
    if (!inv) return out;
    PathPair desc = pc.get(q, p).paths(v, u)[(*inv)[a]];
    out.known = true;
    out.outer = desc.outer;
    out.inner = desc.inner;
    return out;
  }
};

// Route A re-sorts the ascending triple (e, f, g), colours a < b < c, to
// descending order by flipping positions (12, 23, 12); route B flips
// (23, 12, 23). Each flip crosses one commuting square.
template <typename Lookup>
RouteResult route_a(const Skeleton& s, PairCache& pc, Lookup& inverse_of,
                    int a, int b, int c, std::size_t e, std::size_t f,
                    std::size_t g) {
  Flipper<Lookup> fl{s, pc, inverse_of};
  const auto& ea = s.edges(a);
  const auto& eb = s.edges(b);
  const auto& ec = s.edges(c);
  RouteResult res;

  std::size_t v = ea[e].range;
  std::size_t w = ec[g].source;

  auto s1 = fl.flip(a, b, v, eb[f].source, e, f);
  res.steps[0] = s1.step;
  if (!s1.known) return {false, {}, res.steps};

  auto s2 = fl.flip(a, c, eb[s1.outer].source, w, s1.inner, g);
  res.steps[1] = s2.step;
  if (!s2.known) return {false, {}, res.steps};

  auto s3 = fl.flip(b, c, v, ec[s2.outer].source, s1.outer, s2.outer);
  res.steps[2] = s3.step;
  if (!s3.known) return {false, {}, res.steps};

  res.final_edges = {s3.outer, s3.inner, s2.inner};
  return res;
}

template <typename Lookup>
RouteResult route_b(const Skeleton& s, PairCache& pc, Lookup& inverse_of,
                    int a, int b, int c, std::size_t e, std::size_t f,
                    std::size_t g) {
  Flipper<Lookup> fl{s, pc, inverse_of};
  const auto& ea = s.edges(a);
  const auto& ec = s.edges(c);
  RouteResult res;

  std::size_t v = ea[e].range;
  std::size_t w = ec[g].source;

  auto s1 = fl.flip(b, c, ea[e].source, w, f, g);
  res.steps[0] = s1.step;
  if (!s1.known) return {false, {}, res.steps};

  auto s2 = fl.flip(a, c, v, ec[s1.outer].source, e, s1.outer);
  res.steps[1] = s2.step;
  if (!s2.known) return {false, {}, res.steps};

  auto s3 = fl.flip(a, b, ec[s2.outer].source, w, s2.inner, s1.inner);
  res.steps[2] = s3.step;
  if (!s3.known) return {false, {}, res.steps};

  res.final_edges = {s2.outer, s3.outer, s3.inner};
  return res;
}

// Calls fn(a, b, c, e, f, g) for every composable ascending-colour triple;
// each such triple represents exactly one 3-cube.
template <typename Fn>
void for_each_cube(const Skeleton& s, Fn&& fn) {
  for (int a = 1; a <= s.rank(); ++a) {
    for (int b = a + 1; b <= s.rank(); ++b) {
      for (int c = b + 1; c <= s.rank(); ++c) {
        const auto& ea = s.edges(a);
        const auto& eb = s.edges(b);
        const auto& ec = s.edges(c);
        for (std::size_t e = 0; e < ea.size(); ++e) {
          for (std::size_t f = 0; f < eb.size(); ++f) {
            if (eb[f].range != ea[e].source) continue;
            for (std::size_t g = 0; g < ec.size(); ++g) {
              if (ec[g].range != eb[f].source) continue;
              fn(a, b, c, e, f, g);
            }
          }
        }
      }
    }
  }
}

std::string cube_name(const Skeleton& s, int a, int b, int c, std::size_t e,
                      std::size_t f, std::size_t g) {
  std::ostringstream os;
  os << "cube (" << s.edge(a, e).id << ", " << s.edge(b, f).id << ", "
     << s.edge(c, g).id << ") of colours (" << a << ", " << b << ", " << c
     << ")";
  return os.str();
}

bool key_in_range(const Skeleton& s, const BlockKey& key) {
  return key.i >= 1 && key.i < key.j && key.j <= s.rank() &&
         key.v < s.vertex_count() && key.w < s.vertex_count();
}

}  // namespace

const std::vector<std::size_t>* FactorisationRule::find(
    const BlockKey& key) const {
  auto it = blocks_.find(key);
  return it == blocks_.end() ? nullptr : &it->second;
}

const std::vector<std::size_t>& FactorisationRule::at(
    const BlockKey& key) const {
  auto it = blocks_.find(key);
  if (it == blocks_.end())
    throw InvalidArgument("no factorisation block for the requested key");
  return it->second;
}

std::vector<std::size_t> FactorisationRule::inverse(const BlockKey& key) const {
  const auto& fwd = at(key);
  std::vector<std::size_t> inv(fwd.size());
  for (std::size_t r = 0; r < fwd.size(); ++r) inv.at(fwd[r]) = r;
  return inv;
}

FactorisationRule FactorisationRule::from_json(const Skeleton& s,
                                               const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("blocks") || !doc["blocks"].is_array())
    throw ParseError("factorisation document needs a \"blocks\" array");
  Map blocks;
  for (const auto& b : doc["blocks"]) {
    if (!b.is_object()) throw ParseError("factorisation blocks must be objects");
    for (const char* field : {"i", "j", "v", "w", "map"}) {
      if (!b.contains(field))
        throw ParseError(std::string("factorisation block missing \"") + field +
                         "\"");
    }
    if (!b["i"].is_number_integer() || !b["j"].is_number_integer())
      throw ParseError("block colours must be integers");
    BlockKey key;
    key.i = b["i"].get<int>();
    key.j = b["j"].get<int>();
    if (key.i < 1 || key.j > s.rank() || key.i >= key.j)
      throw ParseError("block colour pair must satisfy 1 <= i < j <= k");
    if (!b["v"].is_string() || !b["w"].is_string())
      throw ParseError("block vertices must be id strings");
    key.v = s.vertex_index(b["v"].get<std::string>());
    key.w = s.vertex_index(b["w"].get<std::string>());
    if (!b["map"].is_array()) throw ParseError("block \"map\" must be an array");
    std::vector<std::size_t> map;
    for (const auto& entry : b["map"]) {
      if (!entry.is_number_integer() || entry.get<long long>() < 0)
        throw ParseError("block map entries must be nonnegative integers");
      map.push_back(entry.get<std::size_t>());
    }
    if (!blocks.emplace(key, std::move(map)).second)
      throw ParseError("duplicate factorisation block " + block_name(s, key));
  }
  return FactorisationRule(std::move(blocks));
}

nlohmann::json FactorisationRule::to_json(const Skeleton& s) const {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& [key, map] : blocks_) {
    blocks.push_back({{"i", key.i},
                      {"j", key.j},
                      {"v", s.vertex_id(key.v)},
                      {"w", s.vertex_id(key.w)},
                      {"map", map}});
  }
  return {{"blocks", blocks}};
}

const std::vector<std::complex<double>>* CubicalCocycle::find(
    const BlockKey& key) const {
  auto it = phases_.find(key);
  return it == phases_.end() ? nullptr : &it->second;
}

CubicalCocycle CubicalCocycle::from_json(const Skeleton& s,
                                         const nlohmann::json& doc) {
  if (!doc.is_array())
    throw ParseError("cubical cocycle document must be an array of squares");
  Map phases;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& entry : doc) {
    if (!entry.is_object()) throw ParseError("squares must be objects");
    for (const char* field : {"i", "j", "v", "w", "index", "phase"}) {
      if (!entry.contains(field))
        throw ParseError(std::string("square missing \"") + field + "\"");
    }
    if (!entry["i"].is_number_integer() || !entry["j"].is_number_integer())
      throw ParseError("square colours must be integers");
    BlockKey key;
    key.i = entry["i"].get<int>();
    key.j = entry["j"].get<int>();
    if (key.i < 1 || key.j > s.rank() || key.i >= key.j)
      throw ParseError("square colour pair must satisfy 1 <= i < j <= k");
    if (!entry["v"].is_string() || !entry["w"].is_string())
      throw ParseError("square vertices must be id strings");
    key.v = s.vertex_index(entry["v"].get<std::string>());
    key.w = s.vertex_index(entry["w"].get<std::string>());
    std::size_t dim = two_color_paths(s, key.i, key.j, key.v, key.w).size();
    if (!entry["index"].is_number_integer() ||
        entry["index"].get<long long>() < 0)
      throw ParseError("square \"index\" must be a nonnegative integer");
    auto index = entry["index"].get<std::size_t>();
    if (index >= dim)
      throw ParseError("square index out of range for block " +
                       block_name(s, key));
    const auto& ph = entry["phase"];
    if (!ph.is_array() || ph.size() != 2 || !ph[0].is_number() ||
        !ph[1].is_number())
      throw ParseError("square \"phase\" must be [re, im]");
    auto& vec = phases.try_emplace(key, std::vector<std::complex<double>>(
                                            dim, {nan, nan}))
                    .first->second;
    if (!std::isnan(vec[index].real()))
      throw ParseError("duplicate phase for square " + std::to_string(index) +
                       " of block " + block_name(s, key));
    vec[index] = {ph[0].get<double>(), ph[1].get<double>()};
  }
  return CubicalCocycle(std::move(phases));
}

nlohmann::json CubicalCocycle::to_json(const Skeleton& s) const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [key, vec] : phases_) {
    for (std::size_t index = 0; index < vec.size(); ++index) {
      if (std::isnan(vec[index].real())) continue;
      out.push_back({{"i", key.i},
                     {"j", key.j},
                     {"v", s.vertex_id(key.v)},
                     {"w", s.vertex_id(key.w)},
                     {"index", index},
                     {"phase", {vec[index].real(), vec[index].imag()}}});
    }
  }
  return out;
}

ValidationReport validate_factorisation(const Skeleton& s,
                                        const FactorisationRule& rule) {
  ValidationReport report;
  PairCache pc{s};
  std::set<BlockKey> expected;

  for (int i = 1; i <= s.rank(); ++i) {
    for (int j = i + 1; j <= s.rank(); ++j) {
      for (std::size_t v = 0; v < s.vertex_count(); ++v) {
        for (std::size_t w = 0; w < s.vertex_count(); ++w) {
          BlockKey key{i, j, v, w};
          std::size_t asc = pc.get(i, j).dim(v, w);
          std::size_t desc = pc.get(j, i).dim(v, w);
          const auto* map = rule.find(key);
          if (desc == 0 && asc == 0) {
            if (map && !map->empty())
              report.add("dimension_mismatch",
                         "block " + block_name(s, key) +
                             " maps an empty path space");
            continue;
          }
          expected.insert(key);
          if (!map) {
            report.add("missing_block",
                       "no bijection for block " + block_name(s, key));
            continue;
          }
          if (asc != desc || map->size() != desc) {
            std::ostringstream msg;
            msg << "block " << block_name(s, key) << " has " << map->size()
                << " entries but the path spaces have " << desc
                << " descending and " << asc << " ascending paths";
            report.add("dimension_mismatch", msg.str());
            continue;
          }
          std::vector<char> seen(asc, 0);
          for (std::size_t r = 0; r < map->size(); ++r) {
            std::size_t val = (*map)[r];
            if (val >= asc || seen[val]) {
              report.add("not_bijective",
                         "block " + block_name(s, key) +
                             " is not a bijection onto the ascending basis");
              break;
            }
            seen[val] = 1;
          }
        }
      }
    }
  }

  for (const auto& [key, map] : rule.blocks()) {
    if (!key_in_range(s, key)) {
      report.add("unknown_block",
                 "block with out-of-range key (i=" + std::to_string(key.i) +
                     ", j=" + std::to_string(key.j) + ")");
    }
  }

  if (s.rank() == 2) report.note("k = 2: cube associativity is vacuous");
  if (s.rank() < 3 || !report.ok()) return report;

  std::map<BlockKey, std::vector<std::size_t>> inverses;
  auto inverse_of = [&](const BlockKey& key) -> const std::vector<std::size_t>* {
    auto it = inverses.find(key);
    if (it == inverses.end())
      it = inverses.emplace(key, rule.inverse(key)).first;
    return &it->second;
  };
  for_each_cube(s, [&](int a, int b, int c, std::size_t e, std::size_t f,
                       std::size_t g) {
    auto ra = route_a(s, pc, inverse_of, a, b, c, e, f, g);
    auto rb = route_b(s, pc, inverse_of, a, b, c, e, f, g);
    if (ra.final_edges != rb.final_edges) {
      report.add("associativity",
                 cube_name(s, a, b, c, e, f, g) +
                     ": the two flip routes produce different factorisations");
    }
  });
  return report;
}

ValidationReport validate_cubical_cocycle(const Skeleton& s,
                                          const FactorisationRule& rule,
                                          const CubicalCocycle& phi) {
  ValidationReport report;
  auto frep = validate_factorisation(s, rule);
  if (!frep.ok()) {
    report.merge(frep);
    report.note("factorisation rule invalid; cube identity not checked");
    return report;
  }

  PairCache pc{s};
  bool structural_ok = true;
  for (int i = 1; i <= s.rank(); ++i) {
    for (int j = i + 1; j <= s.rank(); ++j) {
      for (std::size_t v = 0; v < s.vertex_count(); ++v) {
        for (std::size_t w = 0; w < s.vertex_count(); ++w) {
          std::size_t dim = pc.get(i, j).dim(v, w);
          BlockKey key{i, j, v, w};
          if (dim == 0) continue;
          const auto* vec = phi.find(key);
          if (!vec || vec->size() != dim) {
            report.add("missing_square",
                       "phases absent or wrong length for block " +
                           block_name(s, key));
            structural_ok = false;
            continue;
          }
          for (std::size_t idx = 0; idx < dim; ++idx) {
            if (std::isnan((*vec)[idx].real())) {
              report.add("missing_square",
                         "no phase for square " + std::to_string(idx) +
                             " of block " + block_name(s, key));
              structural_ok = false;
            } else if (std::abs(std::abs((*vec)[idx]) - 1.0) > kModulusTol) {
              report.add("modulus", "square " + std::to_string(idx) +
                                        " of block " + block_name(s, key) +
                                        " has non-unit modulus");
            }
          }
        }
      }
    }
  }
  for (const auto& [key, vec] : phi.phases()) {
    if (!key_in_range(s, key))
      report.add("unknown_block",
                 "phases with out-of-range key (i=" + std::to_string(key.i) +
                     ", j=" + std::to_string(key.j) + ")");
  }

  if (s.rank() == 2) report.note("k = 2: cube identity is vacuous");
  if (s.rank() < 3 || !structural_ok) return report;

  std::map<BlockKey, std::vector<std::size_t>> inverses;
  auto inverse_of = [&](const BlockKey& key) -> const std::vector<std::size_t>* {
    auto it = inverses.find(key);
    if (it == inverses.end())
      it = inverses.emplace(key, rule.inverse(key)).first;
    return &it->second;
  };
  auto phase_at = [&](const RouteStep& step) {
    return phi.find(step.key)->at(step.asc_index);
  };
  for_each_cube(s, [&](int a, int b, int c, std::size_t e, std::size_t f,
                       std::size_t g) {
    auto ra = route_a(s, pc, inverse_of, a, b, c, e, f, g);
    auto rb = route_b(s, pc, inverse_of, a, b, c, e, f, g);
    std::complex<double> pa =
        phase_at(ra.steps[0]) * phase_at(ra.steps[1]) * phase_at(ra.steps[2]);
    std::complex<double> pb =
        phase_at(rb.steps[0]) * phase_at(rb.steps[1]) * phase_at(rb.steps[2]);
    if (std::abs(pa - pb) > kCubeTol) {
      std::ostringstream msg;
      msg << cube_name(s, a, b, c, e, f, g)
          << ": phase products differ by |" << std::abs(pa - pb) << "|";
      report.add("cube_identity", msg.str());
    }
  });
  return report;
}

CubicalCocycle constant_cocycle(const Skeleton& s, std::complex<double> z) {
  CubicalCocycle::Map phases;
  for (int i = 1; i <= s.rank(); ++i) {
    for (int j = i + 1; j <= s.rank(); ++j) {
      for (std::size_t v = 0; v < s.vertex_count(); ++v) {
        for (std::size_t w = 0; w < s.vertex_count(); ++w) {
          std::size_t dim = two_color_paths(s, i, j, v, w).size();
          if (dim == 0) continue;
          phases.emplace(BlockKey{i, j, v, w},
                         std::vector<std::complex<double>>(dim, z));
        }
      }
    }
  }
  return CubicalCocycle(std::move(phases));
}

FactorisationRule tensor_rule(const Skeleton& s) {
  if (s.vertex_count() != 1)
    throw InvalidArgument("tensor_rule needs a single-vertex skeleton");
  FactorisationRule::Map blocks;
  for (int i = 1; i <= s.rank(); ++i) {
    for (int j = i + 1; j <= s.rank(); ++j) {
      std::size_t ni = s.edges(i).size();
      std::size_t nj = s.edges(j).size();
      if (ni * nj == 0) continue;
      std::vector<std::size_t> map(ni * nj);
      // Descending path (b-th edge of colour j, a-th of colour i) maps to
      // the ascending path (a-th of colour i, b-th of colour j).
      for (std::size_t b = 0; b < nj; ++b) {
        for (std::size_t a = 0; a < ni; ++a) {
          map[b * ni + a] = a * nj + b;
        }
      }
      blocks.emplace(BlockKey{i, j, 0, 0}, std::move(map));
    }
  }
  return FactorisationRule(std::move(blocks));
}

EnumerationResult enumerate_factorisations(
    const Skeleton& s, const EnumerationOptions& opts,
    const std::function<void(const FactorisationRule&)>& sink) {
  auto srep = validate_skeleton(s);
  if (!srep.ok())
    throw InvalidArgument("enumeration needs a valid skeleton: " +
                          srep.violations.front().message);

  EnumerationResult res;
  if (opts.limit == 0) {
    res.status = EnumerationStatus::LimitReached;
    return res;
  }

  PairCache pc{s};
  std::vector<BlockKey> keys;
  std::vector<std::size_t> dims;
  for (int i = 1; i <= s.rank(); ++i) {
    for (int j = i + 1; j <= s.rank(); ++j) {
      for (std::size_t v = 0; v < s.vertex_count(); ++v) {
        for (std::size_t w = 0; w < s.vertex_count(); ++w) {
          std::size_t dim = pc.get(i, j).dim(v, w);
          if (dim == 0) continue;
          keys.push_back({i, j, v, w});
          dims.push_back(dim);
        }
      }
    }
  }

  std::map<BlockKey, std::size_t> key_index;
  for (std::size_t d = 0; d < keys.size(); ++d) key_index.emplace(keys[d], d);

  // Cube checks fire when the last block of the cube's largest colour pair
  // (always (b, c)) gets assigned; all earlier pairs are then complete.
  struct Cube {
    int a, b, c;
    std::size_t e, f, g;
  };
  std::vector<std::vector<Cube>> triggers(keys.size());
  std::map<std::pair<int, int>, std::size_t> group_last;
  for (std::size_t d = 0; d < keys.size(); ++d)
    group_last[{keys[d].i, keys[d].j}] = d;
  for_each_cube(s, [&](int a, int b, int c, std::size_t e, std::size_t f,
                       std::size_t g) {
    auto it = group_last.find({b, c});
    if (it != group_last.end()) triggers[it->second].push_back({a, b, c, e, f, g});
  });

  std::vector<std::vector<std::size_t>> perm(keys.size()), inv(keys.size());
  auto inverse_of = [&](const BlockKey& key) -> const std::vector<std::size_t>* {
    auto it = key_index.find(key);
    return it == key_index.end() ? nullptr : &inv[it->second];
  };

  bool stop = false;
  auto emit = [&]() {
    FactorisationRule::Map blocks;
    for (std::size_t d = 0; d < keys.size(); ++d)
      blocks.emplace(keys[d], perm[d]);
    if (sink) sink(FactorisationRule(std::move(blocks)));
    ++res.count;
    if (res.count >= opts.limit) {
      res.status = EnumerationStatus::LimitReached;
      stop = true;
    }
  };

  auto cubes_ok = [&](std::size_t d) {
    for (const Cube& q : triggers[d]) {
      auto ra = route_a(s, pc, inverse_of, q.a, q.b, q.c, q.e, q.f, q.g);
      auto rb = route_b(s, pc, inverse_of, q.a, q.b, q.c, q.e, q.f, q.g);
      if (!ra.known || !rb.known) continue;
      if (ra.final_edges != rb.final_edges) return false;
    }
    return true;
  };

  auto dfs = [&](auto&& self, std::size_t d) -> void {
    if (d == keys.size()) {
      emit();
      return;
    }
    perm[d].resize(dims[d]);
    std::iota(perm[d].begin(), perm[d].end(), std::size_t{0});
    do {
      if (++res.examined > opts.budget) {
        res.status = EnumerationStatus::Truncated;
        stop = true;
        return;
      }
      inv[d].resize(dims[d]);
      for (std::size_t r = 0; r < dims[d]; ++r) inv[d][perm[d][r]] = r;
      if (!cubes_ok(d)) continue;
      self(self, d + 1);
      if (stop) return;
    } while (std::next_permutation(perm[d].begin(), perm[d].end()));
  };
  dfs(dfs, 0);
  return res;
}

}  // namespace kocycle
