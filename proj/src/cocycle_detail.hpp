#pragma once

#include <array>
#include <map>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "kocycle/skeleton.hpp"
#include "kocycle/unitary_cocycle.hpp"

// Internals shared by the residual evaluation and its gradient: dense
// representations of the six flip steps of the exchange identity on the
// three-colour path spaces.

namespace kocycle::detail {

using TriplePath = std::array<std::size_t, 3>;  // edge positions per slot

struct TripleBasis {
  std::vector<TriplePath> paths;  // lexicographic by edge positions
  std::size_t index_of(const TriplePath& p) const;
};

/// Caches pair and triple path bases of one skeleton.
class TripleWorkspace {
 public:
  explicit TripleWorkspace(const Skeleton& s) : s_(&s) {}

  const Skeleton& skeleton() const { return *s_; }
  const PairBasis& pair(int p, int q);
  const TripleBasis& triple(const std::array<int, 3>& colors, std::size_t v,
                            std::size_t w);

 private:
  const Skeleton* s_;
  std::map<std::pair<int, int>, PairBasis> pairs_;
  std::map<std::tuple<int, int, int, std::size_t, std::size_t>, TripleBasis>
      triples_;
};

/// One flip step: the domain colour word and the flipped slot pair
/// (pos 0 flips slots 0,1; pos 1 flips slots 1,2). The flipped slots must
/// hold a descending colour pair; the step applies U_{min,max} blockwise.
struct Step {
  std::array<int, 3> from;
  int pos;
};

std::array<int, 3> step_target(const Step& step);

/// The six steps of the exchange identity for colours a < b < c, applied
/// right-to-left to the descending word (c, b, a): lhs chain flips
/// (12, 23, 12), rhs chain flips (23, 12, 23).
std::array<Step, 6> identity_steps(int a, int b, int c);

Eigen::MatrixXcd step_matrix(TripleWorkspace& ws, const UnitaryCocycle& u,
                             const Step& step, std::size_t v, std::size_t w);

/// Adjoint of the block-scatter that builds step_matrix: accumulates the
/// entries of sens (same shape as the step matrix) back onto the gradient
/// of the underlying block family.
void scatter_step_adjoint(TripleWorkspace& ws, const Step& step, std::size_t v,
                          std::size_t w, const Eigen::MatrixXcd& sens,
                          std::map<BlockKey, Eigen::MatrixXcd>& grad);

struct TripleTerm {
  int a, b, c;
  std::size_t v, w;
};

/// Colour triples and vertex pairs with a nonempty descending path space,
/// in deterministic order.
std::vector<TripleTerm> residual_terms(TripleWorkspace& ws);

struct TermOps {
  Eigen::MatrixXcd s1, s2, s3, t1, t2, t3;
  Eigen::MatrixXcd lhs, rhs;  // s3 s2 s1 and t3 t2 t1
};

TermOps term_ops(TripleWorkspace& ws, const UnitaryCocycle& u,
                 const TripleTerm& term);

double residual_squared(TripleWorkspace& ws, const UnitaryCocycle& u);

/// Euclidean (Wirtinger) gradient of residual_squared with respect to the
/// conjugated block entries, one matrix per block key of u.
std::map<BlockKey, Eigen::MatrixXcd> euclidean_gradient(
    TripleWorkspace& ws, const UnitaryCocycle& u);

}  // namespace kocycle::detail
