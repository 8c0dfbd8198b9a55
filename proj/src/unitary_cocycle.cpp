#include "kocycle/unitary_cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cocycle_detail.hpp"
#include "kocycle/linalg.hpp"

namespace kocycle {

namespace {

std::string block_name(const Skeleton& s, const BlockKey& key) {
  auto name = [&](std::size_t v) {
    return v < s.vertex_count() ? "\"" + s.vertex_id(v) + "\""
                                : "#" + std::to_string(v);
  };
  std::ostringstream os;
  os << "(i=" << key.i << ", j=" << key.j << ", v=" << name(key.v)
     << ", w=" << name(key.w) << ")";
  return os.str();
}

// Keys of all blocks with nonempty path spaces, with (asc, desc) dims.
std::vector<std::pair<BlockKey, std::pair<std::size_t, std::size_t>>>
nonempty_keys(const Skeleton& s) {
  std::vector<std::pair<BlockKey, std::pair<std::size_t, std::size_t>>> out;
  for (int i = 1; i <= s.rank(); ++i) {
    for (int j = i + 1; j <= s.rank(); ++j) {
      for (std::size_t v = 0; v < s.vertex_count(); ++v) {
        for (std::size_t w = 0; w < s.vertex_count(); ++w) {
          std::size_t asc = two_color_paths(s, i, j, v, w).size();
          std::size_t desc = two_color_paths(s, j, i, v, w).size();
          if (asc == 0 && desc == 0) continue;
          out.push_back({{i, j, v, w}, {asc, desc}});
        }
      }
    }
  }
  return out;
}

}  // namespace

UnitaryCocycle::UnitaryCocycle(std::shared_ptr<const Skeleton> skeleton,
                               BlockMap blocks)
    : skeleton_(std::move(skeleton)), blocks_(std::move(blocks)) {
  if (!skeleton_) throw InvalidArgument("cocycle needs a skeleton");
  const Skeleton& s = *skeleton_;
  for (const auto& [key, dims] : nonempty_keys(s)) {
    auto it = blocks_.find(key);
    if (it == blocks_.end())
      throw InvalidArgument("missing block " + block_name(s, key));
    if (it->second.rows() != static_cast<Eigen::Index>(dims.first) ||
        it->second.cols() != static_cast<Eigen::Index>(dims.second)) {
      std::ostringstream msg;
      msg << "block " << block_name(s, key) << " is " << it->second.rows()
          << "x" << it->second.cols() << " but the path spaces need "
          << dims.first << "x" << dims.second;
      throw InvalidArgument(msg.str());
    }
  }
  for (const auto& [key, block] : blocks_) {
    if (key.i < 1 || key.i >= key.j || key.j > s.rank() ||
        key.v >= s.vertex_count() || key.w >= s.vertex_count())
      throw InvalidArgument("block " + block_name(s, key) +
                            " is outside the skeleton");
    std::size_t asc = two_color_paths(s, key.i, key.j, key.v, key.w).size();
    std::size_t desc = two_color_paths(s, key.j, key.i, key.v, key.w).size();
    if (asc == 0 && desc == 0 && block.size() != 0)
      throw InvalidArgument("block " + block_name(s, key) +
                            " maps an empty path space");
  }
}

const Eigen::MatrixXcd& UnitaryCocycle::block(const BlockKey& key) const {
  auto it = blocks_.find(key);
  if (it == blocks_.end())
    throw InvalidArgument("no unitary block " + block_name(*skeleton_, key));
  return it->second;
}

UnitaryCocycle UnitaryCocycle::from_json(
    std::shared_ptr<const Skeleton> skeleton, const nlohmann::json& doc) {
  if (!skeleton) throw InvalidArgument("cocycle needs a skeleton");
  const Skeleton& s = *skeleton;
  if (!doc.is_object() || !doc.contains("blocks") || !doc["blocks"].is_array())
    throw ParseError("cocycle document needs a \"blocks\" array");
  BlockMap blocks;
  for (const auto& b : doc["blocks"]) {
    for (const char* field : {"i", "j", "v", "w", "rows", "cols", "data"}) {
      if (!b.is_object() || !b.contains(field))
        throw ParseError(std::string("cocycle block missing \"") + field +
                         "\"");
    }
    BlockKey key;
    key.i = b["i"].get<int>();
    key.j = b["j"].get<int>();
    if (key.i < 1 || key.j > s.rank() || key.i >= key.j)
      throw ParseError("block colour pair must satisfy 1 <= i < j <= k");
    if (!b["v"].is_string() || !b["w"].is_string())
      throw ParseError("block vertices must be id strings");
    key.v = s.vertex_index(b["v"].get<std::string>());
    key.w = s.vertex_index(b["w"].get<std::string>());
    if (!b["rows"].is_number_integer() || !b["cols"].is_number_integer())
      throw ParseError("block shape must be integral");
    auto rows = b["rows"].get<long long>();
    auto cols = b["cols"].get<long long>();
    if (rows < 0 || cols < 0) throw ParseError("negative block shape");
    const auto& data = b["data"];
    if (!data.is_array() ||
        data.size() != static_cast<std::size_t>(rows * cols))
      throw ParseError("block \"data\" must hold rows*cols entries");
    Eigen::MatrixXcd m(rows, cols);
    std::size_t idx = 0;
    for (const auto& entry : data) {
      if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
          !entry[1].is_number())
        throw ParseError("complex entries must be [re, im]");
      m(idx / cols, idx % cols) =
          std::complex<double>(entry[0].get<double>(), entry[1].get<double>());
      ++idx;
    }
    if (!blocks.emplace(key, std::move(m)).second)
      throw ParseError("duplicate cocycle block " + block_name(s, key));
  }
  return UnitaryCocycle(std::move(skeleton), std::move(blocks));
}

nlohmann::json UnitaryCocycle::to_json() const {
  const Skeleton& s = *skeleton_;
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& [key, m] : blocks_) {
    nlohmann::json data = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        data.push_back({m(r, c).real(), m(r, c).imag()});
      }
    }
    blocks.push_back({{"i", key.i},
                      {"j", key.j},
                      {"v", s.vertex_id(key.v)},
                      {"w", s.vertex_id(key.w)},
                      {"rows", m.rows()},
                      {"cols", m.cols()},
                      {"data", data}});
  }
  return {{"blocks", blocks}};
}

double max_unitarity_defect(const UnitaryCocycle& u) {
  double worst = 0.0;
  for (const auto& [key, block] : u.blocks())
    worst = std::max(worst, unitarity_defect(block));
  return worst;
}

double block_distance(const UnitaryCocycle& a, const UnitaryCocycle& b) {
  if (!(a.skeleton() == b.skeleton()))
    throw InvalidArgument("block distance needs a common skeleton");
  double worst = 0.0;
  for (const auto& [key, block] : a.blocks())
    worst = std::max(worst, operator_norm(block - b.block(key)));
  return worst;
}

Eigen::MatrixXcd assemble_block(
    const Skeleton& s, int i, int j,
    const std::map<std::pair<std::size_t, std::size_t>, Eigen::MatrixXcd>&
        blocks) {
  // Offsets of each (v, w) slice in the assembled bases.
  std::vector<std::pair<std::size_t, std::size_t>> order;
  std::size_t rows = 0, cols = 0;
  std::map<std::pair<std::size_t, std::size_t>,
           std::pair<std::size_t, std::size_t>>
      offset;
  for (std::size_t v = 0; v < s.vertex_count(); ++v) {
    for (std::size_t w = 0; w < s.vertex_count(); ++w) {
      std::size_t asc = two_color_paths(s, i, j, v, w).size();
      std::size_t desc = two_color_paths(s, j, i, v, w).size();
      if (asc == 0 && desc == 0) continue;
      order.push_back({v, w});
      offset[{v, w}] = {rows, cols};
      rows += asc;
      cols += desc;
    }
  }
  Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(rows, cols);
  for (const auto& vw : order) {
    std::size_t asc = two_color_paths(s, i, j, vw.first, vw.second).size();
    std::size_t desc = two_color_paths(s, j, i, vw.first, vw.second).size();
    auto it = blocks.find(vw);
    if (it == blocks.end())
      throw InvalidArgument("assemble_block: block missing for a vertex pair");
    if (it->second.rows() != static_cast<Eigen::Index>(asc) ||
        it->second.cols() != static_cast<Eigen::Index>(desc))
      throw InvalidArgument(
          "assemble_block: block shape disagrees with the path counts");
    auto [ro, co] = offset[vw];
    big.block(ro, co, asc, desc) = it->second;
  }
  return big;
}

Eigen::MatrixXcd assemble_block(const UnitaryCocycle& u, int i, int j) {
  std::map<std::pair<std::size_t, std::size_t>, Eigen::MatrixXcd> slice;
  for (const auto& [key, block] : u.blocks()) {
    if (key.i == i && key.j == j) slice[{key.v, key.w}] = block;
  }
  return assemble_block(u.skeleton(), i, j, slice);
}

UnitaryCocycle from_kgraph(std::shared_ptr<const Skeleton> skeleton,
                           const FactorisationRule& rule,
                           const CubicalCocycle& phi) {
  if (!skeleton) throw InvalidArgument("cocycle needs a skeleton");
  const Skeleton& s = *skeleton;
  auto srep = validate_skeleton(s);
  if (!srep.ok())
    throw InvalidArgument("invalid skeleton: " +
                          srep.violations.front().message);
  auto prep = validate_cubical_cocycle(s, rule, phi);
  if (!prep.ok())
    throw InvalidArgument("invalid cocycle data: " +
                          prep.violations.front().message);

  UnitaryCocycle::BlockMap blocks;
  for (const auto& [key, dims] : nonempty_keys(s)) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dims.first, dims.second);
    const auto& map = rule.at(key);
    const auto& phases = *phi.find(key);
    for (std::size_t r = 0; r < map.size(); ++r) {
      m(map[r], r) = phases[map[r]];  // phase of the ascending image square
    }
    blocks.emplace(key, std::move(m));
  }
  return UnitaryCocycle(std::move(skeleton), std::move(blocks));
}

UnitaryCocycle flip_cocycle(std::shared_ptr<const Skeleton> skeleton,
                            const FactorisationRule& rule) {
  if (!skeleton) throw InvalidArgument("cocycle needs a skeleton");
  return from_kgraph(skeleton, rule, constant_cocycle(*skeleton, 1.0));
}

nlohmann::json ResidualReport::to_json(const Skeleton& s) const {
  nlohmann::json per = nlohmann::json::array();
  for (const auto& t : per_triple) {
    per.push_back({{"i", t.i},
                   {"j", t.j},
                   {"l", t.l},
                   {"v", s.vertex_id(t.v)},
                   {"w", s.vertex_id(t.w)},
                   {"residual", t.residual}});
  }
  return {{"residual", residual}, {"per_triple", per}};
}

double cocycle_residual(const UnitaryCocycle& u) {
  detail::TripleWorkspace ws(u.skeleton());
  return std::sqrt(detail::residual_squared(ws, u));
}

ResidualReport residual_report(const UnitaryCocycle& u) {
  detail::TripleWorkspace ws(u.skeleton());
  ResidualReport report;
  double sum = 0.0;
  for (const auto& term : detail::residual_terms(ws)) {
    auto ops = detail::term_ops(ws, u, term);
    double sq = (ops.lhs - ops.rhs).squaredNorm();
    sum += sq;
    report.per_triple.push_back(
        {term.a, term.b, term.c, term.v, term.w, std::sqrt(sq)});
  }
  report.residual = std::sqrt(sum);
  return report;
}

bool is_cocycle(const UnitaryCocycle& u, double tol) {
  return cocycle_residual(u) <= tol;
}

void Gauge::set(const GaugeKey& key, Eigen::MatrixXcd q) {
  blocks_[key] = std::move(q);
}

Eigen::MatrixXcd Gauge::get(const Skeleton& s, const GaugeKey& key) const {
  auto it = blocks_.find(key);
  if (it != blocks_.end()) return it->second;
  std::size_t dim = s.edge_positions(key.color, key.v, key.w).size();
  return Eigen::MatrixXcd::Identity(dim, dim);
}

Gauge Gauge::adjoint() const {
  BlockMap out;
  for (const auto& [key, q] : blocks_) out.emplace(key, q.adjoint());
  return Gauge(std::move(out));
}

Gauge Gauge::random(const Skeleton& s, std::mt19937_64& rng) {
  Gauge g;
  for (int c = 1; c <= s.rank(); ++c) {
    for (std::size_t v = 0; v < s.vertex_count(); ++v) {
      for (std::size_t w = 0; w < s.vertex_count(); ++w) {
        std::size_t dim = s.edge_positions(c, v, w).size();
        if (dim == 0) continue;
        g.set({c, v, w}, random_unitary(dim, rng));
      }
    }
  }
  return g;
}

namespace {

// Induced unitary (Q_p (x) Q_q)(v, w) on the pair space v E_p E_q w:
// block-diagonal over the intermediate vertex.
Eigen::MatrixXcd induced_pair_unitary(const Skeleton& s, const PairBasis& basis,
                                      const Gauge& gauge, int p, int q,
                                      std::size_t v, std::size_t w) {
  const auto& paths = basis.paths(v, w);
  Eigen::MatrixXcd out =
      Eigen::MatrixXcd::Zero(paths.size(), paths.size());
  for (std::size_t col = 0; col < paths.size(); ++col) {
    std::size_t x = paths[col].outer;
    std::size_t y = paths[col].inner;
    std::size_t mid = s.edge(p, x).source;
    auto xs = s.edge_positions(p, v, mid);
    auto ys = s.edge_positions(q, mid, w);
    Eigen::MatrixXcd qp = gauge.get(s, {p, v, mid});
    Eigen::MatrixXcd qq = gauge.get(s, {q, mid, w});
    if (qp.rows() != static_cast<Eigen::Index>(xs.size()) ||
        qq.rows() != static_cast<Eigen::Index>(ys.size()))
      throw InvalidArgument("gauge block shape disagrees with the edge space");
    auto find_pos = [](const std::vector<std::size_t>& list, std::size_t val) {
      auto it = std::lower_bound(list.begin(), list.end(), val);
      return static_cast<std::size_t>(it - list.begin());
    };
    std::size_t px = find_pos(xs, x);
    std::size_t py = find_pos(ys, y);
    for (std::size_t a = 0; a < xs.size(); ++a) {
      for (std::size_t b = 0; b < ys.size(); ++b) {
        std::size_t row = basis.index_of(v, w, {xs[a], ys[b]});
        out(row, col) = qp(a, px) * qq(b, py);
      }
    }
  }
  return out;
}

}  // namespace

UnitaryCocycle gauge_transform(const UnitaryCocycle& u, const Gauge& q) {
  const Skeleton& s = u.skeleton();
  std::map<std::pair<int, int>, PairBasis> bases;
  auto basis = [&](int p, int r) -> const PairBasis& {
    auto key = std::make_pair(p, r);
    auto it = bases.find(key);
    if (it == bases.end()) it = bases.try_emplace(key, PairBasis(s, p, r)).first;
    return it->second;
  };

  UnitaryCocycle::BlockMap out;
  for (const auto& [key, block] : u.blocks()) {
    Eigen::MatrixXcd left = induced_pair_unitary(s, basis(key.i, key.j), q,
                                                 key.i, key.j, key.v, key.w);
    Eigen::MatrixXcd right = induced_pair_unitary(s, basis(key.j, key.i), q,
                                                  key.j, key.i, key.v, key.w);
    out.emplace(key, left * block * right.adjoint());
  }
  return UnitaryCocycle(u.skeleton_ptr(), std::move(out));
}

UnitaryCocycle random_unitary_family(std::shared_ptr<const Skeleton> skeleton,
                                     std::mt19937_64& rng) {
  if (!skeleton) throw InvalidArgument("cocycle needs a skeleton");
  const Skeleton& s = *skeleton;
  UnitaryCocycle::BlockMap blocks;
  for (const auto& [key, dims] : nonempty_keys(s)) {
    if (dims.first != dims.second)
      throw InvalidArgument("unitary blocks need equal path counts; run "
                            "validate_skeleton first");
    blocks.emplace(key, random_unitary(dims.first, rng));
  }
  return UnitaryCocycle(std::move(skeleton), std::move(blocks));
}

}  // namespace kocycle
