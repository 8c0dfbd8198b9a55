#include "kocycle/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "kocycle/errors.hpp"

namespace kocycle {

using Eigen::MatrixXcd;
using Eigen::VectorXd;

double unitarity_defect(const MatrixXcd& u) {
  if (u.size() == 0) return 0.0;
  return (u.adjoint() * u - MatrixXcd::Identity(u.cols(), u.cols())).norm();
}

double operator_norm(const MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<MatrixXcd> svd(m);
  return svd.singularValues()(0);
}

MatrixXcd polar_unitary(const MatrixXcd& m) {
  if (m.rows() != m.cols())
    throw InvalidArgument("polar factor needs a square matrix");
  if (m.size() == 0) return m;
  Eigen::JacobiSVD<MatrixXcd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

MatrixXcd skew_part(const MatrixXcd& m) { return 0.5 * (m - m.adjoint()); }

MatrixXcd unitary_log(const MatrixXcd& u) {
  constexpr double pi = std::numbers::pi;
  if (u.rows() != u.cols())
    throw InvalidArgument("unitary logarithm needs a square matrix");
  const auto n = u.rows();
  if (n == 0) return u;
  if (unitarity_defect(u) > 1e-8)
    throw InvalidArgument("unitary logarithm: input is not unitary");

  Eigen::ComplexSchur<MatrixXcd> schur(u, true);
  const MatrixXcd& t = schur.matrixT();
  const MatrixXcd& q = schur.matrixU();

  std::vector<double> angles(n);
  for (Eigen::Index m = 0; m < n; ++m) angles[m] = std::arg(t(m, m));

  // Branch cut at the midpoint of the largest cyclic gap in the spectrum's
  // angles, normalized to [-pi, pi); ties pick the smallest midpoint. All
  // angles are then represented inside (cut, cut + 2*pi).
  std::vector<double> sorted = angles;
  std::sort(sorted.begin(), sorted.end());
  double best_gap = -1.0;
  double cut = -pi;
  for (std::size_t m = 0; m < sorted.size(); ++m) {
    double next =
        (m + 1 < sorted.size()) ? sorted[m + 1] : sorted[0] + 2.0 * pi;
    double gap = next - sorted[m];
    double mid = sorted[m] + 0.5 * gap;
    while (mid >= pi) mid -= 2.0 * pi;
    while (mid < -pi) mid += 2.0 * pi;
    if (gap > best_gap || (gap == best_gap && mid < cut)) {
      best_gap = gap;
      cut = mid;
    }
  }

  Eigen::VectorXcd diag(n);
  for (Eigen::Index m = 0; m < n; ++m) {
    double alpha = angles[m] > cut ? angles[m] : angles[m] + 2.0 * pi;
    diag(m) = std::complex<double>(0.0, alpha);
  }
  MatrixXcd log = q * diag.asDiagonal() * q.adjoint();
  return skew_part(log);
}

MatrixXcd exp_skew(const MatrixXcd& omega) {
  if (omega.rows() != omega.cols())
    throw InvalidArgument("exp_skew needs a square matrix");
  if (omega.size() == 0) return omega;
  // exp(Omega) = exp(i H) with H = -i Omega Hermitian.
  MatrixXcd h = std::complex<double>(0.0, -1.0) * omega;
  h = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
  Eigen::VectorXcd phases(h.rows());
  for (Eigen::Index m = 0; m < h.rows(); ++m)
    phases(m) = std::polar(1.0, es.eigenvalues()(m));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

MatrixXcd random_unitary(std::size_t n, std::mt19937_64& rng) {
  if (n == 0) return MatrixXcd(0, 0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  MatrixXcd g(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      g(r, c) = std::complex<double>(gauss(rng), gauss(rng));
    }
  }
  Eigen::HouseholderQR<MatrixXcd> qr(g);
  MatrixXcd q = qr.householderQ();
  // Fix the phase ambiguity so the distribution is Haar.
  for (std::size_t c = 0; c < n; ++c) {
    std::complex<double> r = qr.matrixQR()(c, c);
    double mag = std::abs(r);
    if (mag > 0) q.col(c) *= r / mag;
  }
  return q;
}

}  // namespace kocycle
