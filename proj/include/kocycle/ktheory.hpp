#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

#include "kocycle/errors.hpp"

namespace kocycle {

using BigInt = boost::multiprecision::cpp_int;

/// Dense arbitrary-precision integer matrix, row-major. Supports the empty
/// shapes (0 x n, n x 0) that show up as degenerate kernels and images.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}
  IntMatrix(std::size_t rows, std::size_t cols,
            std::initializer_list<long long> entries);

  static IntMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  BigInt& operator()(std::size_t r, std::size_t c);
  const BigInt& operator()(std::size_t r, std::size_t c) const;

  IntMatrix transpose() const;
  bool is_zero() const;

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
  friend IntMatrix operator-(const IntMatrix& a, const IntMatrix& b);
  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;

  std::string str() const;  // small human-readable dump for diagnostics

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<BigInt> data_;
};

/// D = L * A * R with L, R unimodular, D diagonal with nonnegative entries
/// d_1 | d_2 | ... (trailing zeros allowed).
struct SmithDecomposition {
  IntMatrix d;
  IntMatrix l;
  IntMatrix r;

  std::size_t rank() const;
  /// Nonzero diagonal entries in divisibility order.
  std::vector<BigInt> invariant_factors() const;
};

SmithDecomposition smith_normal_form(const IntMatrix& a);

/// Finitely generated abelian group in canonical form: free rank plus
/// invariant factors t_1 | t_2 | ..., each >= 2.
struct AbelianGroup {
  std::size_t free_rank = 0;
  std::vector<BigInt> torsion;

  static AbelianGroup direct_sum(const AbelianGroup& a, const AbelianGroup& b);
  nlohmann::json to_json() const;

  friend bool operator==(const AbelianGroup&, const AbelianGroup&) = default;
};

/// Z^cols(a) / column-span(a') for the map a : Z^cols -> Z^rows; i.e. the
/// cokernel coker(a) = Z^rows / im(a).
AbelianGroup cokernel(const IntMatrix& a);

/// Basis of the integer kernel lattice {x : a x = 0}, as column vectors.
/// The basis is saturated: it generates every integer solution.
std::vector<std::vector<BigInt>> kernel_basis(const IntMatrix& a);

/// ker(a) / im(b) for maps with a * b = 0; throws InvalidArgument when the
/// containment im(b) subset-of ker(a) fails.
AbelianGroup subquotient(const IntMatrix& a, const IntMatrix& b);

struct KTheory {
  AbelianGroup k0;
  AbelianGroup k1;

  nlohmann::json to_json() const;
  friend bool operator==(const KTheory&, const KTheory&) = default;
};

/// K-groups of the C*-algebra of a 2-coloured skeleton with vertex matrices
/// m1, m2 (square, nonnegative, commuting):
///   K0 = coker[1 - m1^T | 1 - m2^T] + Z^(nullity of the column map),
///   K1 = ker[1 - m1^T | 1 - m2^T] / im[m2^T - 1 ; 1 - m1^T].
KTheory ktheory_2graph(const IntMatrix& m1, const IntMatrix& m2);

}  // namespace kocycle
