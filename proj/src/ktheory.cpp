#include "kocycle/ktheory.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <utility>

namespace kocycle {

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols,
                     std::initializer_list<long long> entries)
    : IntMatrix(rows, cols) {
  if (entries.size() != rows * cols)
    throw InvalidArgument("entry count does not match the matrix shape");
  std::size_t idx = 0;
  for (long long e : entries) data_[idx++] = e;
}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

BigInt& IntMatrix::operator()(std::size_t r, std::size_t c) {
  return data_.at(r * cols_ + c);
}

const BigInt& IntMatrix::operator()(std::size_t r, std::size_t c) const {
  return data_.at(r * cols_ + c);
}

IntMatrix IntMatrix::transpose() const {
  IntMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

bool IntMatrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](const BigInt& x) { return x == 0; });
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols() != b.rows())
    throw InvalidArgument("matrix product shape mismatch");
  IntMatrix out(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const BigInt& x = a(r, i);
      if (x == 0) continue;
      for (std::size_t c = 0; c < b.cols(); ++c) out(r, c) += x * b(i, c);
    }
  }
  return out;
}

IntMatrix operator-(const IntMatrix& a, const IntMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InvalidArgument("matrix difference shape mismatch");
  IntMatrix out(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(r, c) - b(r, c);
  return out;
}

std::string IntMatrix::str() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t r = 0; r < rows_; ++r) {
    if (r) os << "; ";
    for (std::size_t c = 0; c < cols_; ++c) {
      if (c) os << ", ";
      os << (*this)(r, c);
    }
  }
  os << "]";
  return os.str();
}

std::size_t SmithDecomposition::rank() const {
  std::size_t n = std::min(d.rows(), d.cols());
  std::size_t rank = 0;
  for (std::size_t t = 0; t < n; ++t)
    if (d(t, t) != 0) ++rank;
  return rank;
}

std::vector<BigInt> SmithDecomposition::invariant_factors() const {
  std::vector<BigInt> out;
  std::size_t n = std::min(d.rows(), d.cols());
  for (std::size_t t = 0; t < n; ++t)
    if (d(t, t) != 0) out.push_back(d(t, t));
  return out;
}

SmithDecomposition smith_normal_form(const IntMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  SmithDecomposition out{a, IntMatrix::identity(m), IntMatrix::identity(n)};
  IntMatrix& d = out.d;
  IntMatrix& l = out.l;
  IntMatrix& r = out.r;

  auto swap_rows = [&](std::size_t x, std::size_t y) {
    if (x == y) return;
    for (std::size_t c = 0; c < n; ++c) std::swap(d(x, c), d(y, c));
    for (std::size_t c = 0; c < m; ++c) std::swap(l(x, c), l(y, c));
  };
  auto swap_cols = [&](std::size_t x, std::size_t y) {
    if (x == y) return;
    for (std::size_t row = 0; row < m; ++row) std::swap(d(row, x), d(row, y));
    for (std::size_t row = 0; row < n; ++row) std::swap(r(row, x), r(row, y));
  };
  auto add_row = [&](std::size_t dst, std::size_t src, const BigInt& q) {
    for (std::size_t c = 0; c < n; ++c) d(dst, c) += q * d(src, c);
    for (std::size_t c = 0; c < m; ++c) l(dst, c) += q * l(src, c);
  };
  auto add_col = [&](std::size_t dst, std::size_t src, const BigInt& q) {
    for (std::size_t row = 0; row < m; ++row) d(row, dst) += q * d(row, src);
    for (std::size_t row = 0; row < n; ++row) r(row, dst) += q * r(row, src);
  };

  const std::size_t steps = std::min(m, n);
  for (std::size_t t = 0; t < steps; ++t) {
    bool exhausted = false;
    for (;;) {
      // Pivot: smallest nonzero absolute value in the trailing submatrix,
      // ties resolved by row-major position.
      bool found = false;
      std::size_t pr = t, pc = t;
      BigInt best;
      for (std::size_t row = t; row < m; ++row) {
        for (std::size_t col = t; col < n; ++col) {
          if (d(row, col) == 0) continue;
          BigInt mag = abs(d(row, col));
          if (!found || mag < best) {
            found = true;
            best = mag;
            pr = row;
            pc = col;
          }
        }
      }
      if (!found) {
        exhausted = true;
        break;
      }
      swap_rows(pr, t);
      swap_cols(pc, t);

      // Reduce row and column t modulo the pivot. Truncated division leaves
      // remainders strictly smaller in magnitude, so re-pivoting terminates.
      bool changed = false;
      for (std::size_t row = t + 1; row < m; ++row) {
        if (d(row, t) == 0) continue;
        BigInt q = d(row, t) / d(t, t);
        if (q != 0) add_row(row, t, -q);
        if (d(row, t) != 0) changed = true;
      }
      for (std::size_t col = t + 1; col < n; ++col) {
        if (d(t, col) == 0) continue;
        BigInt q = d(t, col) / d(t, t);
        if (q != 0) add_col(col, t, -q);
        if (d(t, col) != 0) changed = true;
      }
      if (changed) continue;

      // Pivot must divide the whole trailing submatrix for the divisibility
      // chain; if not, fold the offending row in and repeat.
      bool fixed = false;
      for (std::size_t row = t + 1; row < m && !fixed; ++row) {
        for (std::size_t col = t + 1; col < n && !fixed; ++col) {
          if (d(row, col) % d(t, t) != 0) {
            add_row(t, row, 1);
            fixed = true;
          }
        }
      }
      if (!fixed) break;
    }
    if (exhausted) break;
    if (d(t, t) < 0) {
      for (std::size_t c = 0; c < n; ++c) d(t, c) = -d(t, c);
      for (std::size_t c = 0; c < m; ++c) l(t, c) = -l(t, c);
    }
  }
  return out;
}

AbelianGroup AbelianGroup::direct_sum(const AbelianGroup& a,
                                      const AbelianGroup& b) {
  AbelianGroup out;
  out.free_rank = a.free_rank + b.free_rank;
  std::vector<BigInt> all = a.torsion;
  all.insert(all.end(), b.torsion.begin(), b.torsion.end());
  if (all.empty()) return out;
  // Re-canonicalise the combined torsion via the Smith form of a diagonal.
  IntMatrix diag(all.size(), all.size());
  for (std::size_t i = 0; i < all.size(); ++i) diag(i, i) = all[i];
  for (const BigInt& f : smith_normal_form(diag).invariant_factors()) {
    if (f > 1) out.torsion.push_back(f);
  }
  return out;
}

namespace {

nlohmann::json big_to_json(const BigInt& x) {
  if (x >= std::numeric_limits<std::int64_t>::min() &&
      x <= std::numeric_limits<std::int64_t>::max()) {
    return x.convert_to<std::int64_t>();
  }
  return x.str();
}

}  // namespace

nlohmann::json AbelianGroup::to_json() const {
  nlohmann::json t = nlohmann::json::array();
  for (const BigInt& f : torsion) t.push_back(big_to_json(f));
  return {{"free_rank", free_rank}, {"torsion", t}};
}

AbelianGroup cokernel(const IntMatrix& a) {
  auto snf = smith_normal_form(a);
  AbelianGroup out;
  out.free_rank = a.rows() - snf.rank();
  for (const BigInt& f : snf.invariant_factors()) {
    if (f > 1) out.torsion.push_back(f);
  }
  return out;
}

std::vector<std::vector<BigInt>> kernel_basis(const IntMatrix& a) {
  auto snf = smith_normal_form(a);
  std::vector<std::vector<BigInt>> basis;
  for (std::size_t col = snf.rank(); col < a.cols(); ++col) {
    std::vector<BigInt> vec(a.cols());
    for (std::size_t row = 0; row < a.cols(); ++row) vec[row] = snf.r(row, col);
    basis.push_back(std::move(vec));
  }
  return basis;
}

AbelianGroup subquotient(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols() != b.rows())
    throw InvalidArgument("subquotient: a.cols() must equal b.rows()");
  if (!(a * b).is_zero())
    throw InvalidArgument(
        "subquotient: image is not contained in the kernel (a*b != 0)");

  auto basis = kernel_basis(a);
  const std::size_t rank = basis.size();
  if (rank == 0) return {};

  IntMatrix km(a.cols(), rank);
  for (std::size_t c = 0; c < rank; ++c)
    for (std::size_t row = 0; row < a.cols(); ++row) km(row, c) = basis[c][row];

  // Solve km * x = b_col exactly for each column. The kernel basis is
  // saturated, so the divisions below cannot fail for columns inside ker(a).
  auto kmf = smith_normal_form(km);
  if (kmf.rank() != rank)
    throw InvalidArgument("subquotient: kernel basis is rank-deficient");

  IntMatrix coords(rank, b.cols());
  IntMatrix lb = kmf.l * b;  // rows: a.cols(), cols: b.cols()
  for (std::size_t c = 0; c < b.cols(); ++c) {
    IntMatrix z(rank, 1);
    for (std::size_t row = 0; row < a.cols(); ++row) {
      if (row < rank) {
        if (lb(row, c) % kmf.d(row, row) != 0)
          throw InvalidArgument(
              "subquotient: column of b is not an integer combination of "
              "the kernel basis");
        z(row, 0) = lb(row, c) / kmf.d(row, row);
      } else if (lb(row, c) != 0) {
        throw InvalidArgument(
            "subquotient: column of b leaves the kernel lattice");
      }
    }
    IntMatrix x = kmf.r * z;
    for (std::size_t row = 0; row < rank; ++row) coords(row, c) = x(row, 0);
  }
  return cokernel(coords);
}

nlohmann::json KTheory::to_json() const {
  return {{"K0", k0.to_json()}, {"K1", k1.to_json()}};
}

KTheory ktheory_2graph(const IntMatrix& m1, const IntMatrix& m2) {
  const std::size_t n = m1.rows();
  if (m1.cols() != n || m2.rows() != n || m2.cols() != n)
    throw InvalidArgument("vertex matrices must be square and equal-sized");
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      if (m1(r, c) < 0 || m2(r, c) < 0)
        throw InvalidArgument("vertex matrices must be nonnegative");
    }
  }
  if (!(m1 * m2 - m2 * m1).is_zero())
    throw InvalidArgument(
        "vertex matrices must commute (the K1 subquotient needs im inside "
        "ker)");

  IntMatrix a_row(n, 2 * n);   // [1 - m1^T | 1 - m2^T]
  IntMatrix b_col(2 * n, n);   // [m2^T - 1 ; 1 - m1^T]
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t w = 0; w < n; ++w) {
      BigInt delta = (v == w) ? 1 : 0;
      a_row(v, w) = delta - m1(w, v);
      a_row(v, n + w) = delta - m2(w, v);
      b_col(v, w) = m2(w, v) - delta;
      b_col(n + v, w) = delta - m1(w, v);
    }
  }

  KTheory out;
  AbelianGroup free_part;
  free_part.free_rank = kernel_basis(b_col).size();
  out.k0 = AbelianGroup::direct_sum(cokernel(a_row), free_part);
  out.k1 = subquotient(a_row, b_col);
  return out;
}

}  // namespace kocycle
