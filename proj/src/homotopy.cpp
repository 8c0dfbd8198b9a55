#include "kocycle/homotopy.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "cocycle_detail.hpp"
#include "kocycle/linalg.hpp"

namespace kocycle {

nlohmann::json CocyclePath::to_json() const {
  nlohmann::json out_samples = nlohmann::json::array();
  for (const auto& s : samples) {
    out_samples.push_back({{"t", s.t},
                           {"cocycle", s.cocycle.to_json()},
                           {"residual", s.residual}});
  }
  return {{"samples", out_samples},
          {"max_adjacent_distance", max_adjacent_distance}};
}

CocyclePath CocyclePath::from_json(std::shared_ptr<const Skeleton> skeleton,
                                   const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("samples") ||
      !doc["samples"].is_array())
    throw ParseError("path document needs a \"samples\" array");
  CocyclePath path;
  for (const auto& s : doc["samples"]) {
    if (!s.is_object() || !s.contains("t") || !s["t"].is_number() ||
        !s.contains("cocycle") || !s.contains("residual") ||
        !s["residual"].is_number())
      throw ParseError("path samples need t, cocycle and residual");
    path.samples.push_back({s["t"].get<double>(),
                            UnitaryCocycle::from_json(skeleton, s["cocycle"]),
                            s["residual"].get<double>()});
  }
  if (!doc.contains("max_adjacent_distance") ||
      !doc["max_adjacent_distance"].is_number())
    throw ParseError("path document needs max_adjacent_distance");
  path.max_adjacent_distance = doc["max_adjacent_distance"].get<double>();
  return path;
}

void CocyclePath::recompute_stats() {
  max_adjacent_distance = 0.0;
  for (std::size_t m = 0; m + 1 < samples.size(); ++m) {
    max_adjacent_distance =
        std::max(max_adjacent_distance,
                 block_distance(samples[m].cocycle, samples[m + 1].cocycle));
  }
}

ValidationReport validate_path(const CocyclePath& path,
                               const UnitaryCocycle& u0,
                               const UnitaryCocycle& u1) {
  ValidationReport report;
  if (path.samples.size() < 2) {
    report.add("samples", "a path needs at least two samples");
    return report;
  }
  for (const auto& s : path.samples) {
    if (!(s.cocycle.skeleton() == u0.skeleton())) {
      report.add("skeleton", "sample skeleton differs from the endpoints");
      return report;
    }
  }
  if (std::abs(path.samples.front().t) > 1e-12 ||
      std::abs(path.samples.back().t - 1.0) > 1e-12)
    report.add("parameter", "t must run from 0 to 1");
  for (std::size_t m = 0; m + 1 < path.samples.size(); ++m) {
    if (!(path.samples[m].t < path.samples[m + 1].t)) {
      report.add("parameter", "t must be strictly increasing");
      break;
    }
  }
  if (block_distance(path.samples.front().cocycle, u0) > 1e-12)
    report.add("endpoint", "first sample is not the requested start");
  if (block_distance(path.samples.back().cocycle, u1) > 1e-12)
    report.add("endpoint", "last sample is not the requested end");
  for (std::size_t m = 0; m < path.samples.size(); ++m) {
    if (max_unitarity_defect(path.samples[m].cocycle) > 1e-10) {
      report.add("unitarity", "sample " + std::to_string(m) +
                                  " has a non-unitary block");
    }
  }
  return report;
}

namespace {

// Per-block spectral data of log(U0* U1), for cheap sampling of
// U0 exp(t log(U0* U1)).
struct BlockGeodesic {
  Eigen::MatrixXcd u0;
  Eigen::MatrixXcd vecs;
  Eigen::VectorXd angles;

  Eigen::MatrixXcd at(double t) const {
    if (u0.size() == 0) return u0;
    Eigen::VectorXcd phases(angles.size());
    for (Eigen::Index m = 0; m < angles.size(); ++m)
      phases(m) = std::polar(1.0, t * angles(m));
    return u0 * (vecs * phases.asDiagonal() * vecs.adjoint());
  }
};

BlockGeodesic block_geodesic(const Eigen::MatrixXcd& a,
                             const Eigen::MatrixXcd& b) {
  BlockGeodesic geo;
  geo.u0 = a;
  Eigen::MatrixXcd omega = unitary_log(a.adjoint() * b);
  // omega is skew-Hermitian; -i*omega is Hermitian.
  Eigen::MatrixXcd h = std::complex<double>(0.0, -1.0) * omega;
  h = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  geo.vecs = es.eigenvectors();
  geo.angles = es.eigenvalues();
  return geo;
}

}  // namespace

CocyclePath geodesic_path(const UnitaryCocycle& u0, const UnitaryCocycle& u1,
                          int intervals) {
  if (intervals < 1) throw InvalidArgument("need at least one interval");
  if (!(u0.skeleton() == u1.skeleton()))
    throw InvalidArgument("geodesic endpoints live on different skeletons");

  std::map<BlockKey, BlockGeodesic> geos;
  for (const auto& [key, block] : u0.blocks())
    geos.emplace(key, block_geodesic(block, u1.block(key)));

  CocyclePath path;
  for (int m = 0; m <= intervals; ++m) {
    double t = static_cast<double>(m) / intervals;
    if (m == 0) {
      path.samples.push_back({0.0, u0, cocycle_residual(u0)});
      continue;
    }
    if (m == intervals) {
      path.samples.push_back({1.0, u1, cocycle_residual(u1)});
      continue;
    }
    UnitaryCocycle::BlockMap blocks;
    for (const auto& [key, geo] : geos) blocks.emplace(key, geo.at(t));
    UnitaryCocycle sample(u0.skeleton_ptr(), std::move(blocks));
    double res = cocycle_residual(sample);
    path.samples.push_back({t, std::move(sample), res});
  }
  path.recompute_stats();
  return path;
}

CocyclePath conjugation_path(const UnitaryCocycle& u, const Gauge& q,
                             int intervals) {
  if (intervals < 1) throw InvalidArgument("need at least one interval");
  std::map<GaugeKey, BlockGeodesic> geos;
  for (const auto& [key, block] : q.blocks()) {
    geos.emplace(key,
                 block_geodesic(
                     Eigen::MatrixXcd::Identity(block.rows(), block.cols()),
                     block));
  }

  CocyclePath path;
  for (int m = 0; m <= intervals; ++m) {
    double t = static_cast<double>(m) / intervals;
    if (m == 0) {
      path.samples.push_back({0.0, u, cocycle_residual(u)});
      continue;
    }
    UnitaryCocycle sample = [&] {
      if (m == intervals) return gauge_transform(u, q);
      Gauge qt;
      for (const auto& [key, geo] : geos) qt.set(key, geo.at(t));
      return gauge_transform(u, qt);
    }();
    double res = cocycle_residual(sample);
    path.samples.push_back({t, std::move(sample), res});
  }
  path.recompute_stats();
  return path;
}

std::map<BlockKey, Eigen::MatrixXcd> residual_gradient(
    const UnitaryCocycle& u) {
  detail::TripleWorkspace ws(u.skeleton());
  auto euclid = detail::euclidean_gradient(ws, u);
  std::map<BlockKey, Eigen::MatrixXcd> out;
  for (const auto& [key, g] : euclid)
    out.emplace(key, skew_part(u.block(key).adjoint() * g));
  return out;
}

namespace {

struct Descent {
  double residual = 0.0;
  std::uint64_t iterations = 0;
};

// Projected gradient descent with polar retraction on the block family,
// minimising the squared residual until it drops below target_sq.
Descent descend(detail::TripleWorkspace& ws, UnitaryCocycle& u,
                double target_sq, int max_iters, std::mt19937_64& rng) {
  double f = detail::residual_squared(ws, u);
  Descent out;
  double eta = 1.0;
  int kicks = 0;

  while (f > target_sq && out.iterations < static_cast<std::uint64_t>(max_iters)) {
    ++out.iterations;
    auto euclid = detail::euclidean_gradient(ws, u);
    std::map<BlockKey, Eigen::MatrixXcd> omega;
    double grad_sq = 0.0;
    for (const auto& [key, g] : euclid) {
      Eigen::MatrixXcd o = skew_part(u.block(key).adjoint() * g);
      grad_sq += o.squaredNorm();
      omega.emplace(key, std::move(o));
    }

    bool stepped = false;
    if (grad_sq > 1e-28) {
      double try_eta = eta;
      while (try_eta > 1e-16) {
        UnitaryCocycle::BlockMap cand;
        for (const auto& [key, block] : u.blocks())
          cand.emplace(key, polar_unitary(block - try_eta * block * omega.at(key)));
        UnitaryCocycle next(u.skeleton_ptr(), std::move(cand));
        double fn = detail::residual_squared(ws, next);
        if (fn <= f - 1e-4 * try_eta * 2.0 * grad_sq) {
          u = std::move(next);
          f = fn;
          eta = std::min(try_eta * 1.5, 4.0);
          stepped = true;
          break;
        }
        try_eta *= 0.5;
      }
    }
    if (!stepped) {
      // Stalled: either a flat spot or a bad scale. A small seeded unitary
      // kick restarts the descent; give up after a few.
      if (++kicks > 3) break;
      UnitaryCocycle::BlockMap cand;
      for (const auto& [key, block] : u.blocks()) {
        Eigen::MatrixXcd noise(block.rows(), block.rows());
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (Eigen::Index r = 0; r < noise.rows(); ++r)
          for (Eigen::Index c = 0; c < noise.cols(); ++c)
            noise(r, c) = std::complex<double>(gauss(rng), gauss(rng));
        cand.emplace(key,
                     block * exp_skew(1e-3 * skew_part(noise)));
      }
      u = UnitaryCocycle(u.skeleton_ptr(), std::move(cand));
      f = detail::residual_squared(ws, u);
      eta = 1.0;
    }
  }
  out.residual = std::sqrt(f);
  return out;
}

UnitaryCocycle blockwise_midpoint(const UnitaryCocycle& a,
                                  const UnitaryCocycle& b) {
  UnitaryCocycle::BlockMap blocks;
  for (const auto& [key, block] : a.blocks())
    blocks.emplace(key, block_geodesic(block, b.block(key)).at(0.5));
  return UnitaryCocycle(a.skeleton_ptr(), std::move(blocks));
}

}  // namespace

nlohmann::json PathSearchResult::failure_report() const {
  nlohmann::json t = nlohmann::json::array();
  nlohmann::json residuals = nlohmann::json::array();
  for (const auto& s : path.samples) {
    t.push_back(s.t);
    residuals.push_back(s.residual);
  }
  return {{"success", success},
          {"message", message},
          {"iterations", total_iterations},
          {"t", t},
          {"residuals", residuals},
          {"max_adjacent_distance", path.max_adjacent_distance}};
}

PathSearchResult path_search(const UnitaryCocycle& u0,
                             const UnitaryCocycle& u1,
                             const PathSearchOptions& opts) {
  if (!(u0.skeleton() == u1.skeleton()))
    throw InvalidArgument("path endpoints live on different skeletons");
  if (opts.samples < 1) throw InvalidArgument("need at least one interval");
  if (max_unitarity_defect(u0) > 1e-8 || max_unitarity_defect(u1) > 1e-8)
    throw InvalidArgument("path endpoints must have unitary blocks");
  if (!is_cocycle(u0, opts.tol) || !is_cocycle(u1, opts.tol))
    throw InvalidArgument(
        "path endpoints must satisfy the cocycle identity at the requested "
        "tolerance");

  detail::TripleWorkspace ws(u0.skeleton());
  std::mt19937_64 rng(opts.seed);
  const double target_sq = opts.tol * opts.tol;

  PathSearchResult result;
  result.path = geodesic_path(u0, u1, opts.samples);
  auto& samples = result.path.samples;

  auto optimize_sample = [&](std::size_t idx) {
    auto d = descend(ws, samples[idx].cocycle, target_sq, opts.max_iters, rng);
    result.total_iterations += d.iterations;
    samples[idx].residual = d.residual;
    if (d.residual > opts.tol && idx > 0 && idx + 1 < samples.size()) {
      // One smoothing retry from the neighbours' blockwise midpoint.
      UnitaryCocycle retry = blockwise_midpoint(samples[idx - 1].cocycle,
                                                samples[idx + 1].cocycle);
      auto d2 = descend(ws, retry, target_sq, opts.max_iters, rng);
      result.total_iterations += d2.iterations;
      if (d2.residual < samples[idx].residual) {
        samples[idx].cocycle = std::move(retry);
        samples[idx].residual = d2.residual;
      }
    }
  };

  for (std::size_t idx = 1; idx + 1 < samples.size(); ++idx)
    optimize_sample(idx);

  for (;;) {
    bool residuals_ok = true;
    for (const auto& s : samples) residuals_ok &= (s.residual <= opts.tol);
    if (!residuals_ok) {
      result.path.recompute_stats();
      result.message = "residual target not reached on every sample";
      return result;
    }

    result.path.recompute_stats();
    if (result.path.max_adjacent_distance <= opts.continuity_bound) {
      result.success = true;
      result.message = "connected";
      return result;
    }

    if (static_cast<int>(samples.size()) >= opts.max_samples) {
      result.message = "continuity bound not met within the sample cap";
      return result;
    }

    // Insert a midpoint into every oversized gap, then optimise the
    // newcomers.
    std::vector<PathSample> refined;
    std::vector<std::size_t> fresh;
    for (std::size_t m = 0; m + 1 < samples.size(); ++m) {
      refined.push_back(std::move(samples[m]));
      double gap = block_distance(refined.back().cocycle,
                                  samples[m + 1].cocycle);
      std::size_t projected = refined.size() + (samples.size() - m - 1);
      if (gap > opts.continuity_bound &&
          projected + 1 <= static_cast<std::size_t>(opts.max_samples)) {
        UnitaryCocycle mid = blockwise_midpoint(refined.back().cocycle,
                                                samples[m + 1].cocycle);
        double t = 0.5 * (refined.back().t + samples[m + 1].t);
        fresh.push_back(refined.size());
        refined.push_back(
            {t, std::move(mid), 0.0});
      }
    }
    refined.push_back(std::move(samples.back()));
    samples = std::move(refined);
    for (std::size_t idx : fresh) {
      samples[idx].residual =
          std::sqrt(detail::residual_squared(ws, samples[idx].cocycle));
      optimize_sample(idx);
    }
  }
}

}  // namespace kocycle
