#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <vector>

#include <nlohmann/json.hpp>

#include "kocycle/skeleton.hpp"

namespace kocycle {

/// Factorisation rule: per block (i < j, v, w) a bijection from the
/// descending basis v E^1_j E^1_i w onto the ascending basis v E^1_i E^1_j w.
/// blocks()[key][r] is the ascending position of the image of the r-th
/// descending path.
class FactorisationRule {
 public:
  using Map = std::map<BlockKey, std::vector<std::size_t>>;

  FactorisationRule() = default;
  explicit FactorisationRule(Map blocks) : blocks_(std::move(blocks)) {}

  static FactorisationRule from_json(const Skeleton& s,
                                     const nlohmann::json& doc);
  nlohmann::json to_json(const Skeleton& s) const;

  const Map& blocks() const { return blocks_; }
  const std::vector<std::size_t>* find(const BlockKey& key) const;
  const std::vector<std::size_t>& at(const BlockKey& key) const;
  /// inverse(key)[a] = descending position mapped onto ascending position a.
  std::vector<std::size_t> inverse(const BlockKey& key) const;

  friend bool operator==(const FactorisationRule&,
                         const FactorisationRule&) = default;

 private:
  Map blocks_;
};

/// Cubical 2-cochain: one unit-modulus phase per commuting square, stored
/// per block (i < j, v, w) and indexed by the ascending-basis position of
/// the square. Missing entries are left as NaN and flagged by validation.
class CubicalCocycle {
 public:
  using Map = std::map<BlockKey, std::vector<std::complex<double>>>;

  CubicalCocycle() = default;
  explicit CubicalCocycle(Map phases) : phases_(std::move(phases)) {}

  static CubicalCocycle from_json(const Skeleton& s,
                                  const nlohmann::json& doc);
  nlohmann::json to_json(const Skeleton& s) const;

  const Map& phases() const { return phases_; }
  const std::vector<std::complex<double>>* find(const BlockKey& key) const;

  friend bool operator==(const CubicalCocycle&,
                         const CubicalCocycle&) = default;

 private:
  Map phases_;
};

/// Structural check (one full-size bijection per nonempty block) plus, for
/// k >= 3, cube associativity: both flip routes through every 3-cube agree.
/// For k = 2 the cube condition is vacuous and the report notes it.
ValidationReport validate_factorisation(const Skeleton& s,
                                        const FactorisationRule& rule);

/// Checks |phi| = 1 (tol 1e-12) on every square and, for k >= 3, the cube
/// identity: equal phase products along the two flip routes (tol 1e-10).
ValidationReport validate_cubical_cocycle(const Skeleton& s,
                                          const FactorisationRule& rule,
                                          const CubicalCocycle& phi);

/// Constant cochain phi = z on every commuting square.
CubicalCocycle constant_cocycle(const Skeleton& s, std::complex<double> z);

/// For a single-vertex skeleton: the coordinate-flip rule mapping the
/// descending pair (b-th of colour j, a-th of colour i) to the ascending
/// pair (a-th of colour i, b-th of colour j).
FactorisationRule tensor_rule(const Skeleton& s);

enum class EnumerationStatus { Complete, LimitReached, Truncated };

struct EnumerationOptions {
  std::uint64_t limit = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t budget = 2'000'000;  // DFS nodes visited before truncation
};

struct EnumerationResult {
  EnumerationStatus status = EnumerationStatus::Complete;
  std::uint64_t count = 0;     // rules emitted
  std::uint64_t examined = 0;  // DFS nodes visited
};

/// Streams every valid factorisation rule of s, in lexicographic order of
/// the concatenated one-line permutation encodings (blocks in key order).
/// Stops early at opts.limit emissions (LimitReached) or when the node
/// budget is exhausted (Truncated). The sink may be empty for counting.
EnumerationResult enumerate_factorisations(
    const Skeleton& s, const EnumerationOptions& opts,
    const std::function<void(const FactorisationRule&)>& sink);

}  // namespace kocycle
