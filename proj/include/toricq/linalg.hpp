#pragma once

// Dense exact linear algebra: Gauss-Jordan elimination over Q or over the
// scalar span (FieldScalar), and column-style Hermite reduction over Z for
// integer kernels and integer solvability.

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "toricq/error.hpp"
#include "toricq/scalar.hpp"

namespace toricq {

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  Matrix(std::size_t rows, std::size_t cols, const T& fill)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  /// Builds a matrix whose columns are the given vectors.
  static Matrix from_columns(const std::vector<std::vector<T>>& cols, std::size_t rows) {
    Matrix m(rows, cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c)
      for (std::size_t r = 0; r < rows; ++r) m(r, c) = cols[c].at(r);
    return m;
  }
  static Matrix from_rows(const std::vector<std::vector<T>>& rows, std::size_t cols) {
    Matrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r].at(c);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::vector<T> row(std::size_t r) const {
    return std::vector<T>(data_.begin() + static_cast<long>(r * cols_),
                          data_.begin() + static_cast<long>((r + 1) * cols_));
  }
  std::vector<T> column(std::size_t c) const {
    std::vector<T> out;
    out.reserve(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out.push_back((*this)(r, c));
    return out;
  }
  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }
  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(a, c), (*this)(b, c));
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

// Scalar hooks used by the generic elimination.
inline bool is_zero(const mpq_class& x) { return x == 0; }
inline bool is_zero(const FieldScalar& x) { return x.is_zero(); }
// Higher is a better pivot.  Rational pivots never need the multiplication table.
inline int pivot_quality(const mpq_class& x) { return x == 0 ? 0 : 2; }
inline int pivot_quality(const FieldScalar& x) {
  if (x.is_zero()) return 0;
  return x.is_rational() ? 2 : 1;
}
inline mpq_class quotient(const mpq_class& a, const mpq_class& b) { return mpq_class(a / b); }
inline FieldScalar quotient(const FieldScalar& a, const FieldScalar& b) { return a / b; }
inline mpq_class product(const mpq_class& a, const mpq_class& b) { return mpq_class(a * b); }
inline FieldScalar product(const FieldScalar& a, const FieldScalar& b) { return a * b; }

template <class T>
struct Echelon {
  Matrix<T> reduced;                 // reduced row echelon form
  std::vector<std::size_t> pivots;   // pivot column of each nonzero row
  std::size_t rank() const { return pivots.size(); }
};

/// Gauss-Jordan elimination.  Columns are scanned left to right, so the pivot
/// columns are the lexicographically first independent ones.
template <class T>
Echelon<T> row_reduce(Matrix<T> m) {
  Echelon<T> out;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t best = m.rows();
    int best_q = 0;
    for (std::size_t i = r; i < m.rows(); ++i) {
      const int q = pivot_quality(m(i, c));
      if (q > best_q) {
        best_q = q;
        best = i;
        if (q == 2) break;
      }
    }
    if (best == m.rows()) continue;
    m.swap_rows(r, best);
    const T piv = m(r, c);
    for (std::size_t t = c; t < m.cols(); ++t) m(r, t) = quotient(m(r, t), piv);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || is_zero(m(i, c))) continue;
      const T f = m(i, c);
      for (std::size_t t = c; t < m.cols(); ++t) {
        if (is_zero(m(r, t))) continue;
        m(i, t) -= product(f, m(r, t));
      }
    }
    out.pivots.push_back(c);
    ++r;
  }
  out.reduced = std::move(m);
  return out;
}

template <class T>
std::size_t rank(const Matrix<T>& m) {
  return row_reduce(m).rank();
}

/// Basis of the right kernel {x : m x = 0}, one vector per free column.
template <class T>
std::vector<std::vector<T>> nullspace(const Matrix<T>& m) {
  const auto ech = row_reduce(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : ech.pivots) is_pivot[p] = true;
  std::vector<std::vector<T>> basis;
  for (std::size_t f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    std::vector<T> v(m.cols(), T(0));
    v[f] = T(1);
    for (std::size_t i = 0; i < ech.pivots.size(); ++i) v[ech.pivots[i]] = -ech.reduced(i, f);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// A particular solution of m x = b (free variables set to zero), or nullopt
/// if inconsistent.
template <class T>
std::optional<std::vector<T>> solve(const Matrix<T>& m, const std::vector<T>& b) {
  Matrix<T> aug(m.rows(), m.cols() + 1);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) aug(r, c) = m(r, c);
    aug(r, m.cols()) = b.at(r);
  }
  const auto ech = row_reduce(std::move(aug));
  if (!ech.pivots.empty() && ech.pivots.back() == m.cols()) return std::nullopt;
  std::vector<T> x(m.cols(), T(0));
  for (std::size_t i = 0; i < ech.pivots.size(); ++i)
    x[ech.pivots[i]] = ech.reduced(i, m.cols());
  return x;
}

/// Indices of a maximal independent subset of the columns (first ones win).
template <class T>
std::vector<std::size_t> independent_columns(const Matrix<T>& m) {
  return row_reduce(m).pivots;
}

template <class T>
std::vector<T> multiply(const Matrix<T>& m, const std::vector<T>& x) {
  std::vector<T> out(m.rows(), T(0));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (!is_zero(m(r, c)) && !is_zero(x.at(c))) out[r] += product(m(r, c), x[c]);
  return out;
}

template <class T>
T dot(const std::vector<T>& a, const std::vector<T>& b) {
  T s(0);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!is_zero(a[i]) && !is_zero(b.at(i))) s += product(a[i], b[i]);
  return s;
}

// ---------------------------------------------------------------------------
// Flattening: a FieldScalar vector of length n over a basis of size k becomes
// a rational vector of length n*k (entry-major).  Z-linear relations among
// real vectors are exactly Q-linear relations among their flattenings.

inline std::vector<mpq_class> flatten(const Vector& v, const BasisPtr& basis) {
  const std::size_t k = basis ? basis->size() : 1;
  std::vector<mpq_class> out;
  out.reserve(v.size() * k);
  for (const auto& s : v) {
    auto c = s.coords_in(basis);
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Integer linear algebra

/// Column Hermite reduction: a * unimodular = hermite, with hermite in column
/// echelon form (column t has its first nonzero in pivot_rows[t], strictly
/// increasing; columns >= rank are zero).
struct ColumnHermite {
  Matrix<mpz_class> hermite;
  Matrix<mpz_class> unimodular;
  std::vector<std::size_t> pivot_rows;
  std::size_t rank() const { return pivot_rows.size(); }
};

inline ColumnHermite column_hermite(Matrix<mpz_class> a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  Matrix<mpz_class> u(n, n, mpz_class(0));
  for (std::size_t i = 0; i < n; ++i) u(i, i) = 1;

  // col_c <- s*col_c + t*col_k, col_k <- x*col_c + y*col_k
  const auto combine = [](Matrix<mpz_class>& mat, std::size_t c, std::size_t k, const mpz_class& s,
                          const mpz_class& t, const mpz_class& x, const mpz_class& y) {
    for (std::size_t r = 0; r < mat.rows(); ++r) {
      const mpz_class vc = mat(r, c);
      const mpz_class vk = mat(r, k);
      mat(r, c) = s * vc + t * vk;
      mat(r, k) = x * vc + y * vk;
    }
  };

  ColumnHermite out;
  std::size_t c = 0;
  for (std::size_t i = 0; i < m && c < n; ++i) {
    for (std::size_t k = c + 1; k < n; ++k) {
      if (a(i, k) == 0) continue;
      const mpz_class p = a(i, c);
      const mpz_class q = a(i, k);
      mpz_class g, s, t;
      mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
      const mpz_class x = -q / g;
      const mpz_class y = p / g;
      combine(a, c, k, s, t, x, y);
      combine(u, c, k, s, t, x, y);
    }
    if (a(i, c) == 0) continue;
    if (a(i, c) < 0) {
      for (std::size_t r = 0; r < m; ++r) a(r, c) = -a(r, c);
      for (std::size_t r = 0; r < n; ++r) u(r, c) = -u(r, c);
    }
    // keep earlier pivot columns reduced modulo this pivot to limit growth
    for (std::size_t prev = 0; prev < c; ++prev) {
      mpz_class f;
      mpz_fdiv_q(f.get_mpz_t(), mpz_class(a(i, prev)).get_mpz_t(), mpz_class(a(i, c)).get_mpz_t());
      if (f == 0) continue;
      for (std::size_t r = 0; r < m; ++r) a(r, prev) -= f * a(r, c);
      for (std::size_t r = 0; r < n; ++r) u(r, prev) -= f * u(r, c);
    }
    out.pivot_rows.push_back(i);
    ++c;
  }
  out.hermite = std::move(a);
  out.unimodular = std::move(u);
  return out;
}

/// Scales each row of a rational system to integers (row scaling keeps the
/// solution set).
inline std::pair<Matrix<mpz_class>, std::vector<mpz_class>> integralize(
    const Matrix<mpq_class>& a, const std::vector<mpq_class>& b) {
  Matrix<mpz_class> ai(a.rows(), a.cols());
  std::vector<mpz_class> bi(a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    mpz_class l = 1;
    for (std::size_t c = 0; c < a.cols(); ++c) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), a(r, c).get_den_mpz_t());
    if (r < b.size()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), b[r].get_den_mpz_t());
    for (std::size_t c = 0; c < a.cols(); ++c) {
      const mpq_class v = a(r, c) * l;
      ai(r, c) = v.get_num();
    }
    if (r < b.size()) {
      const mpq_class v = b[r] * l;
      bi[r] = v.get_num();
    }
  }
  return {std::move(ai), std::move(bi)};
}

/// Z-basis of {x in Z^n : a x = 0} for a rational matrix a.
inline std::vector<std::vector<mpz_class>> integer_kernel(const Matrix<mpq_class>& a) {
  auto [ai, unused] = integralize(a, {});
  const auto h = column_hermite(std::move(ai));
  std::vector<std::vector<mpz_class>> basis;
  for (std::size_t c = h.rank(); c < a.cols(); ++c) basis.push_back(h.unimodular.column(c));
  return basis;
}

/// An integer solution of a x = b, or nullopt when none exists.
inline std::optional<std::vector<mpz_class>> solve_integer(const Matrix<mpq_class>& a,
                                                           const std::vector<mpq_class>& b) {
  auto [ai, bi] = integralize(a, b);
  const auto h = column_hermite(std::move(ai));
  const std::size_t n = a.cols();
  std::vector<mpz_class> y(n, mpz_class(0));
  std::size_t t = 0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    mpz_class residual = bi[i];
    for (std::size_t s = 0; s < t; ++s) residual -= h.hermite(i, s) * y[s];
    if (t < h.rank() && h.pivot_rows[t] == i) {
      const mpz_class& piv = h.hermite(i, t);
      if (!mpz_divisible_p(residual.get_mpz_t(), piv.get_mpz_t())) return std::nullopt;
      y[t] = residual / piv;
      ++t;
    } else if (residual != 0) {
      return std::nullopt;
    }
  }
  std::vector<mpz_class> x(n, mpz_class(0));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < h.rank(); ++c) x[r] += h.unimodular(r, c) * y[c];
  return x;
}

}  // namespace toricq
