#pragma once

#include <random>

#include <Eigen/Dense>

namespace kocycle {

/// Frobenius distance of U*U from the identity.
double unitarity_defect(const Eigen::MatrixXcd& u);

/// Largest singular value.
double operator_norm(const Eigen::MatrixXcd& m);

/// Unitary polar factor of a (square, full-rank) matrix via SVD.
Eigen::MatrixXcd polar_unitary(const Eigen::MatrixXcd& m);

/// Skew-Hermitian logarithm of a unitary matrix. Eigenvalue angles are taken
/// in the window (c, c + 2*pi), where the cut c is the midpoint of the
/// largest cyclic gap between the spectrum's angles, normalized to
/// [-pi, pi) (ties resolved by the smallest midpoint). In particular
/// log(I) = 0, and for the single eigenvalue -1 the cut sits at angle 0, so
/// log([-1]) = [i*pi] and the geodesic [1] -> [-1] passes through [i].
Eigen::MatrixXcd unitary_log(const Eigen::MatrixXcd& u);

/// exp of a skew-Hermitian matrix, computed through a Hermitian
/// eigendecomposition so the result is unitary to machine precision.
Eigen::MatrixXcd exp_skew(const Eigen::MatrixXcd& omega);

/// Haar-distributed random unitary (Ginibre + QR with phase fixing).
Eigen::MatrixXcd random_unitary(std::size_t n, std::mt19937_64& rng);

/// Hermitian/skew-Hermitian parts.
Eigen::MatrixXcd skew_part(const Eigen::MatrixXcd& m);

}  // namespace kocycle
