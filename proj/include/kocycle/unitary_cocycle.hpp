#pragma once

#include <map>
#include <memory>
#include <random>
#include <utility>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "kocycle/kgraph.hpp"
#include "kocycle/skeleton.hpp"

namespace kocycle {

/// Family of block unitaries U_{i,j}(v, w) : C^{v E_j E_i w} -> C^{v E_i E_j w}
/// (descending basis in, ascending basis out), one block per colour pair
/// i < j and vertex pair with nonempty path spaces.
class UnitaryCocycle {
 public:
  using BlockMap = std::map<BlockKey, Eigen::MatrixXcd>;

  UnitaryCocycle(std::shared_ptr<const Skeleton> skeleton, BlockMap blocks);

  static UnitaryCocycle from_json(std::shared_ptr<const Skeleton> skeleton,
                                  const nlohmann::json& doc);
  nlohmann::json to_json() const;

  const Skeleton& skeleton() const { return *skeleton_; }
  const std::shared_ptr<const Skeleton>& skeleton_ptr() const {
    return skeleton_;
  }
  const BlockMap& blocks() const { return blocks_; }
  BlockMap& blocks() { return blocks_; }
  const Eigen::MatrixXcd& block(const BlockKey& key) const;

 private:
  std::shared_ptr<const Skeleton> skeleton_;
  BlockMap blocks_;
};

/// Largest per-block unitarity defect ||U*U - 1||_F.
double max_unitarity_defect(const UnitaryCocycle& u);

/// Largest blockwise operator-norm distance between two families on the
/// same skeleton.
double block_distance(const UnitaryCocycle& a, const UnitaryCocycle& b);

/// Direct sum of the (v, w) blocks of one colour pair, acting on the full
/// two-colour path spaces with vertex pairs ordered lexicographically and
/// paths in canonical order inside each block.
Eigen::MatrixXcd assemble_block(
    const Skeleton& s, int i, int j,
    const std::map<std::pair<std::size_t, std::size_t>, Eigen::MatrixXcd>&
        blocks);
Eigen::MatrixXcd assemble_block(const UnitaryCocycle& u, int i, int j);

/// Monomial cocycle of a factorisation rule and cubical phases: the block
/// entry at (rule image, descending position) is the phase of the image
/// square. Both layers are validated first; invalid input throws.
UnitaryCocycle from_kgraph(std::shared_ptr<const Skeleton> skeleton,
                           const FactorisationRule& rule,
                           const CubicalCocycle& phi);

/// from_kgraph with constant phase 1 (plain permutation blocks).
UnitaryCocycle flip_cocycle(std::shared_ptr<const Skeleton> skeleton,
                            const FactorisationRule& rule);

struct TripleResidual {
  int i, j, l;        // colour triple i < j < l
  std::size_t v, w;   // vertex pair
  double residual;    // Frobenius norm of LHS - RHS on that block
};

struct ResidualReport {
  double residual = 0.0;  // sqrt of the sum of squared per-triple residuals
  std::vector<TripleResidual> per_triple;

  nlohmann::json to_json(const Skeleton& s) const;
};

/// Deviation from the three-colour exchange identity
///   (U_{ij} x 1)(1 x U_{il})(U_{jl} x 1) = (1 x U_{jl})(U_{il} x 1)(1 x U_{ij})
/// accumulated over every colour triple and vertex pair. Exactly the empty
/// sum (zero) when k = 2.
double cocycle_residual(const UnitaryCocycle& u);
ResidualReport residual_report(const UnitaryCocycle& u);

bool is_cocycle(const UnitaryCocycle& u, double tol = 1e-10);

/// Key of one edge-space gauge block: colour and vertex pair (range, source).
struct GaugeKey {
  int color = 1;
  std::size_t v = 0;
  std::size_t w = 0;

  friend bool operator==(const GaugeKey&, const GaugeKey&) = default;
  friend auto operator<=>(const GaugeKey&, const GaugeKey&) = default;
};

/// Family of unitaries Q_i(v, w) on the edge spaces C^{v E^1_i w}. Blocks
/// not set explicitly act as the identity.
class Gauge {
 public:
  using BlockMap = std::map<GaugeKey, Eigen::MatrixXcd>;

  Gauge() = default;
  explicit Gauge(BlockMap blocks) : blocks_(std::move(blocks)) {}

  const BlockMap& blocks() const { return blocks_; }
  void set(const GaugeKey& key, Eigen::MatrixXcd q);
  /// Stored block, or an identity of the right dimension.
  Eigen::MatrixXcd get(const Skeleton& s, const GaugeKey& key) const;
  Gauge adjoint() const;

  static Gauge random(const Skeleton& s, std::mt19937_64& rng);

 private:
  BlockMap blocks_;
};

/// Conjugation by the induced pair unitaries:
/// U'_{i,j}(v,w) = (Q_i (x) Q_j)(v,w) U_{i,j}(v,w) (Q_j (x) Q_i)(v,w)^*.
/// Leaves cocycle_residual invariant.
UnitaryCocycle gauge_transform(const UnitaryCocycle& u, const Gauge& q);

/// Independent Haar-random unitary block on every nonempty block key. For
/// k = 2 this is automatically a cocycle; for k >= 3 generically not.
UnitaryCocycle random_unitary_family(std::shared_ptr<const Skeleton> skeleton,
                                     std::mt19937_64& rng);

}  // namespace kocycle
