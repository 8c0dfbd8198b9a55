#include "cocycle_detail.hpp"

#include <algorithm>

#include "kocycle/errors.hpp"

namespace kocycle::detail {

std::size_t TripleBasis::index_of(const TriplePath& p) const {
  auto it = std::lower_bound(paths.begin(), paths.end(), p);
  if (it == paths.end() || *it != p)
    throw InvalidArgument("triple path not in basis");
  return static_cast<std::size_t>(it - paths.begin());
}

const PairBasis& TripleWorkspace::pair(int p, int q) {
  auto key = std::make_pair(p, q);
  auto it = pairs_.find(key);
  if (it == pairs_.end()) it = pairs_.try_emplace(key, PairBasis(*s_, p, q)).first;
  return it->second;
}

const TripleBasis& TripleWorkspace::triple(const std::array<int, 3>& colors,
                                           std::size_t v, std::size_t w) {
  auto key = std::make_tuple(colors[0], colors[1], colors[2], v, w);
  auto it = triples_.find(key);
  if (it != triples_.end()) return it->second;

  TripleBasis basis;
  const auto& e0 = s_->edges(colors[0]);
  const auto& e1 = s_->edges(colors[1]);
  const auto& e2 = s_->edges(colors[2]);
  for (std::size_t x = 0; x < e0.size(); ++x) {
    if (e0[x].range != v) continue;
    for (std::size_t y = 0; y < e1.size(); ++y) {
      if (e1[y].range != e0[x].source) continue;
      for (std::size_t z = 0; z < e2.size(); ++z) {
        if (e2[z].range != e1[y].source || e2[z].source != w) continue;
        basis.paths.push_back({x, y, z});
      }
    }
  }
  return triples_.emplace(key, std::move(basis)).first->second;
}

std::array<int, 3> step_target(const Step& step) {
  auto out = step.from;
  std::swap(out[step.pos], out[step.pos + 1]);
  return out;
}

std::array<Step, 6> identity_steps(int a, int b, int c) {
  return {{
      {{c, b, a}, 0},  // lhs: U_{b,c} x 1
      {{b, c, a}, 1},  // lhs: 1 x U_{a,c}
      {{b, a, c}, 0},  // lhs: U_{a,b} x 1
      {{c, b, a}, 1},  // rhs: 1 x U_{a,b}
      {{c, a, b}, 0},  // rhs: U_{a,c} x 1
      {{a, c, b}, 1},  // rhs: 1 x U_{b,c}
  }};
}

namespace {

// Iterates the nonzero-structure of a step matrix: for every domain path
// and block row, reports the block entry location and the target index.
template <typename Fn>
void for_each_step_entry(TripleWorkspace& ws, const Step& step, std::size_t v,
                         std::size_t w, Fn&& fn) {
  const Skeleton& s = ws.skeleton();
  const int cx = step.from[step.pos];
  const int cy = step.from[step.pos + 1];
  if (cx <= cy)
    throw InvalidArgument("flip step needs a descending colour pair");
  const auto& dom = ws.triple(step.from, v, w);
  const auto& out = ws.triple(step_target(step), v, w);
  const PairBasis& desc = ws.pair(cx, cy);
  const PairBasis& asc = ws.pair(cy, cx);

  for (std::size_t di = 0; di < dom.paths.size(); ++di) {
    const TriplePath& path = dom.paths[di];
    std::size_t bv, bw;  // vertex pair of the block used by this path
    std::size_t x, y;    // the flipped pair
    if (step.pos == 0) {
      x = path[0];
      y = path[1];
      bv = v;
      bw = s.edge(step.from[2], path[2]).range;
    } else {
      x = path[1];
      y = path[2];
      bv = s.edge(step.from[0], path[0]).source;
      bw = w;
    }
    BlockKey key{cy, cx, bv, bw};
    std::size_t col = desc.index_of(bv, bw, {x, y});
    const auto& asc_paths = asc.paths(bv, bw);
    for (std::size_t row = 0; row < asc_paths.size(); ++row) {
      TriplePath target;
      if (step.pos == 0) {
        target = {asc_paths[row].outer, asc_paths[row].inner, path[2]};
      } else {
        target = {path[0], asc_paths[row].outer, asc_paths[row].inner};
      }
      fn(di, out.index_of(target), key, row, col);
    }
  }
}

}  // namespace

Eigen::MatrixXcd step_matrix(TripleWorkspace& ws, const UnitaryCocycle& u,
                             const Step& step, std::size_t v, std::size_t w) {
  const auto& dom = ws.triple(step.from, v, w);
  const auto& out = ws.triple(step_target(step), v, w);
  Eigen::MatrixXcd m =
      Eigen::MatrixXcd::Zero(out.paths.size(), dom.paths.size());
  for_each_step_entry(ws, step, v, w,
                      [&](std::size_t di, std::size_t oi, const BlockKey& key,
                          std::size_t row, std::size_t col) {
                        m(oi, di) += u.block(key)(row, col);
                      });
  return m;
}

void scatter_step_adjoint(TripleWorkspace& ws, const Step& step, std::size_t v,
                          std::size_t w, const Eigen::MatrixXcd& sens,
                          std::map<BlockKey, Eigen::MatrixXcd>& grad) {
  for_each_step_entry(ws, step, v, w,
                      [&](std::size_t di, std::size_t oi, const BlockKey& key,
                          std::size_t row, std::size_t col) {
                        grad.at(key)(row, col) += sens(oi, di);
                      });
}

std::vector<TripleTerm> residual_terms(TripleWorkspace& ws) {
  const Skeleton& s = ws.skeleton();
  std::vector<TripleTerm> terms;
  for (int a = 1; a <= s.rank(); ++a) {
    for (int b = a + 1; b <= s.rank(); ++b) {
      for (int c = b + 1; c <= s.rank(); ++c) {
        for (std::size_t v = 0; v < s.vertex_count(); ++v) {
          for (std::size_t w = 0; w < s.vertex_count(); ++w) {
            if (ws.triple({c, b, a}, v, w).paths.empty()) continue;
            terms.push_back({a, b, c, v, w});
          }
        }
      }
    }
  }
  return terms;
}

TermOps term_ops(TripleWorkspace& ws, const UnitaryCocycle& u,
                 const TripleTerm& term) {
  auto steps = identity_steps(term.a, term.b, term.c);
  TermOps ops;
  ops.s1 = step_matrix(ws, u, steps[0], term.v, term.w);
  ops.s2 = step_matrix(ws, u, steps[1], term.v, term.w);
  ops.s3 = step_matrix(ws, u, steps[2], term.v, term.w);
  ops.t1 = step_matrix(ws, u, steps[3], term.v, term.w);
  ops.t2 = step_matrix(ws, u, steps[4], term.v, term.w);
  ops.t3 = step_matrix(ws, u, steps[5], term.v, term.w);
  ops.lhs = ops.s3 * ops.s2 * ops.s1;
  ops.rhs = ops.t3 * ops.t2 * ops.t1;
  return ops;
}

double residual_squared(TripleWorkspace& ws, const UnitaryCocycle& u) {
  double sum = 0.0;
  for (const TripleTerm& term : residual_terms(ws)) {
    TermOps ops = term_ops(ws, u, term);
    sum += (ops.lhs - ops.rhs).squaredNorm();
  }
  return sum;
}

std::map<BlockKey, Eigen::MatrixXcd> euclidean_gradient(
    TripleWorkspace& ws, const UnitaryCocycle& u) {
  std::map<BlockKey, Eigen::MatrixXcd> grad;
  for (const auto& [key, block] : u.blocks()) {
    grad.emplace(key, Eigen::MatrixXcd::Zero(block.rows(), block.cols()));
  }
  for (const TripleTerm& term : residual_terms(ws)) {
    auto steps = identity_steps(term.a, term.b, term.c);
    TermOps ops = term_ops(ws, u, term);
    Eigen::MatrixXcd m = ops.lhs - ops.rhs;

    Eigen::MatrixXcd w_s1 = (ops.s3 * ops.s2).adjoint() * m;
    Eigen::MatrixXcd w_s2 = ops.s3.adjoint() * m * ops.s1.adjoint();
    Eigen::MatrixXcd w_s3 = m * (ops.s2 * ops.s1).adjoint();
    Eigen::MatrixXcd w_t1 = -(ops.t3 * ops.t2).adjoint() * m;
    Eigen::MatrixXcd w_t2 = -ops.t3.adjoint() * m * ops.t1.adjoint();
    Eigen::MatrixXcd w_t3 = -m * (ops.t2 * ops.t1).adjoint();

    scatter_step_adjoint(ws, steps[0], term.v, term.w, w_s1, grad);
    scatter_step_adjoint(ws, steps[1], term.v, term.w, w_s2, grad);
    scatter_step_adjoint(ws, steps[2], term.v, term.w, w_s3, grad);
    scatter_step_adjoint(ws, steps[3], term.v, term.w, w_t1, grad);
    scatter_step_adjoint(ws, steps[4], term.v, term.w, w_t2, grad);
    scatter_step_adjoint(ws, steps[5], term.v, term.w, w_t3, grad);
  }
  return grad;
}

}  // namespace kocycle::detail
