#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kocycle/unitary_cocycle.hpp"

namespace kocycle {

struct PathSample {
  double t = 0.0;
  UnitaryCocycle cocycle;
  double residual = 0.0;
};

/// Discretised path of block-unitary families over t in [0, 1].
struct CocyclePath {
  std::vector<PathSample> samples;
  double max_adjacent_distance = 0.0;  // blockwise operator norm

  nlohmann::json to_json() const;
  static CocyclePath from_json(std::shared_ptr<const Skeleton> skeleton,
                               const nlohmann::json& doc);

  void recompute_stats();  // residuals assumed set; refreshes the distance
};

/// Independent re-check of a stored path against its intended endpoints:
/// endpoint distance <= 1e-12, per-sample unitarity defect <= 1e-10,
/// t strictly increasing from 0 to 1.
ValidationReport validate_path(const CocyclePath& path,
                               const UnitaryCocycle& u0,
                               const UnitaryCocycle& u1);

/// Blockwise geodesic U0 exp(t log(U0* U1)) sampled at t = m/N for
/// m = 0..N (N = number of intervals, so N+1 samples). Endpoint samples are
/// written back exactly as u0 and u1. Residuals are reported, not enforced.
CocyclePath geodesic_path(const UnitaryCocycle& u0, const UnitaryCocycle& u1,
                          int intervals);

/// Path t -> gauge_transform(u, Q^t) with Q^t = exp(t log Q) per gauge
/// block; the residual profile is constant up to roundoff.
CocyclePath conjugation_path(const UnitaryCocycle& u, const Gauge& q,
                             int intervals);

/// Riemannian gradient of f = cocycle_residual^2 on the product of unitary
/// groups: one skew-Hermitian matrix Omega_b per block, normalised so that
/// d/de f(U_b exp(e W_b)) = 2 Re sum_b <Omega_b, W_b>_F at e = 0 for
/// skew-Hermitian directions W.
std::map<BlockKey, Eigen::MatrixXcd> residual_gradient(
    const UnitaryCocycle& u);

struct PathSearchOptions {
  int samples = 64;           // initial number of intervals
  double tol = 1e-8;          // per-sample residual target
  int max_iters = 5000;       // descent iterations per sample
  double continuity_bound = 0.2;
  int max_samples = 1024;     // refinement cap (total sample count)
  std::uint64_t seed = 0;     // drives restart perturbations
};

struct PathSearchResult {
  bool success = false;
  CocyclePath path;  // best path found, also on failure
  std::uint64_t total_iterations = 0;
  std::string message;

  /// Diagnostic report for a failed search: residual profile and effort.
  /// Says nothing about nonexistence of a connecting path.
  nlohmann::json failure_report() const;
};

/// Searches for a discretised path of unitary cocycles from u0 to u1:
/// geodesic initialisation, per-sample projected gradient descent with
/// polar retraction, and adaptive insertion of midpoints while adjacent
/// samples are farther apart than the continuity bound. Both endpoints
/// must satisfy is_cocycle(tol); deterministic for a fixed seed.
PathSearchResult path_search(const UnitaryCocycle& u0,
                             const UnitaryCocycle& u1,
                             const PathSearchOptions& opts = {});

}  // namespace kocycle
