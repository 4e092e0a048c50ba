#pragma once

// Exact scalars living in a declared finite-dimensional Q-span of real
// constants {1, c_1, ..., c_{k-1}}.  Coordinates are exact rationals; signs
// of nonzero elements are certified by interval evaluation of the decimal
// approximations attached to the basis.

#include <gmpxx.h>

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "toricq/error.hpp"

namespace toricq {

// ---------------------------------------------------------------------------
// Rational parsing / printing

namespace detail {

inline mpz_class pow10(long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, static_cast<unsigned long>(e));
  return r;
}

struct DecimalParse {
  mpq_class value;
  long fractional_digits = 0;  // effective digits after the point (after exponent)
  long significant_digits = 0;
};

inline std::optional<DecimalParse> parse_decimal(const std::string& text) {
  std::size_t i = 0;
  const std::size_t n = text.size();
  bool negative = false;
  if (i < n && (text[i] == '+' || text[i] == '-')) {
    negative = text[i] == '-';
    ++i;
  }
  std::string digits;
  long frac = 0;
  bool seen_point = false;
  bool any_digit = false;
  for (; i < n; ++i) {
    const char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      any_digit = true;
      if (seen_point) ++frac;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) return std::nullopt;
  long exponent = 0;
  if (i < n && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    std::size_t consumed = 0;
    try {
      exponent = std::stol(text.substr(i), &consumed);
    } catch (...) {
      return std::nullopt;
    }
    if (consumed == 0) return std::nullopt;
    i += consumed;
  }
  if (i != n) return std::nullopt;

  DecimalParse out;
  const auto first_nonzero = digits.find_first_not_of('0');
  out.significant_digits =
      first_nonzero == std::string::npos ? 0 : static_cast<long>(digits.size() - first_nonzero);
  mpz_class mantissa(digits, 10);
  if (negative) mantissa = -mantissa;
  const long scale = frac - exponent;
  out.fractional_digits = scale;
  if (scale >= 0) {
    out.value = mpq_class(mantissa, pow10(scale));
  } else {
    out.value = mpq_class(mantissa * pow10(-scale));
  }
  out.value.canonicalize();
  return out;
}

}  // namespace detail

/// Parses "p/q", "p", or a plain decimal ("-1.25", "3e-2") exactly.
inline mpq_class parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const std::string num = text.substr(0, slash);
    const std::string den = text.substr(slash + 1);
    const auto valid_int = [](const std::string& s, bool allow_sign) {
      if (s.empty()) return false;
      std::size_t i = 0;
      if (allow_sign && (s[0] == '-' || s[0] == '+')) i = 1;
      if (i == s.size()) return false;
      return std::all_of(s.begin() + static_cast<long>(i), s.end(),
                         [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    };
    if (!valid_int(num, true) || !valid_int(den, false))
      throw ConfigError("malformed rational '" + text + "'");
    mpz_class p(num[0] == '+' ? num.substr(1) : num, 10);
    mpz_class q(den, 10);
    if (q == 0) throw ConfigError("zero denominator in '" + text + "'");
    mpq_class r(p, q);
    r.canonicalize();
    return r;
  }
  auto parsed = detail::parse_decimal(text);
  if (!parsed) throw ConfigError("malformed rational '" + text + "'");
  return parsed->value;
}

inline std::string rational_to_string(mpq_class q) {
  q.canonicalize();
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

// ---------------------------------------------------------------------------
// Basis

/// Ordered basis {1, c_1, ...} of the ambient Q-vector space of reals.
/// Q-linear independence is a user assertion and is not checked.  An optional
/// multiplication table (products c_i * c_j as coordinate vectors) turns the
/// span into a Q-algebra, which enables products and inverses of irrational
/// scalars.
class ScalarBasis {
 public:
  struct Product {
    std::size_t i;
    std::size_t j;
    std::vector<mpq_class> value;
  };

  static constexpr long kMinSignificantDigits = 40;

  ScalarBasis(std::vector<std::string> names, std::vector<std::string> approximations,
              std::vector<Product> products = {})
      : names_(std::move(names)), approx_strings_(std::move(approximations)) {
    if (names_.empty()) throw ConfigError("scalar basis must contain the constant 1");
    if (names_.size() != approx_strings_.size())
      throw ConfigError("scalar basis: names and approximations differ in length");
    for (std::size_t i = 0; i < names_.size(); ++i) {
      auto parsed = detail::parse_decimal(approx_strings_[i]);
      if (!parsed)
        throw ConfigError("scalar basis: cannot parse approximation of '" + names_[i] + "'");
      if (i == 0) {
        if (parsed->value != 1)
          throw ConfigError("scalar basis: first element must be the constant 1");
        centers_.emplace_back(1);
        radii_.emplace_back(0);
        continue;
      }
      if (parsed->significant_digits < kMinSignificantDigits)
        throw ConfigError("scalar basis: approximation of '" + names_[i] + "' has fewer than " +
                          std::to_string(kMinSignificantDigits) + " significant digits");
      centers_.push_back(parsed->value);
      radii_.push_back(parsed->fractional_digits >= 0
                           ? mpq_class(1, detail::pow10(parsed->fractional_digits))
                           : mpq_class(detail::pow10(-parsed->fractional_digits)));
    }
    for (auto& p : products) {
      if (p.i == 0 || p.j == 0 || p.i >= size() || p.j >= size())
        throw ConfigError("scalar basis: product indices out of range");
      if (p.value.size() != size())
        throw ConfigError("scalar basis: product value has wrong length");
      products_[{std::min(p.i, p.j), std::max(p.i, p.j)}] = p.value;
    }
  }

  /// The trivial basis {1}: plain rational arithmetic.
  static std::shared_ptr<const ScalarBasis> rational() {
    static const auto basis =
        std::make_shared<const ScalarBasis>(std::vector<std::string>{"1"},
                                            std::vector<std::string>{"1"});
    return basis;
  }

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<std::string>& approximation_strings() const { return approx_strings_; }
  const mpq_class& center(std::size_t i) const { return centers_.at(i); }
  const mpq_class& radius(std::size_t i) const { return radii_.at(i); }

  const std::vector<mpq_class>* product(std::size_t i, std::size_t j) const {
    auto it = products_.find({std::min(i, j), std::max(i, j)});
    return it == products_.end() ? nullptr : &it->second;
  }
  bool has_full_table() const {
    return products_.size() == (size() - 1) * size() / 2;
  }
  std::vector<Product> products() const {
    std::vector<Product> out;
    for (const auto& [key, value] : products_) out.push_back({key.first, key.second, value});
    return out;
  }

  bool operator==(const ScalarBasis& o) const {
    return names_ == o.names_ && centers_ == o.centers_ && products_ == o.products_;
  }

 private:
  std::vector<std::string> names_;
  std::vector<std::string> approx_strings_;
  std::vector<mpq_class> centers_;
  std::vector<mpq_class> radii_;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<mpq_class>> products_;
};

using BasisPtr = std::shared_ptr<const ScalarBasis>;

enum class Sign { negative = -1, zero = 0, positive = 1 };

/// Interval half-widths tried in order by certified_sign, as powers of ten.
struct PrecisionSchedule {
  std::vector<long> digits{20, 40, 80};
};

// ---------------------------------------------------------------------------
// FieldScalar

/// Exact element sum_i coords[i] * c_i.  A scalar without a basis is a plain
/// rational and combines with scalars over any basis.
class FieldScalar {
 public:
  FieldScalar() : coords_(1) {}
  FieldScalar(long v) : coords_{mpq_class(v)} {}  // NOLINT: implicit by design of arithmetic
  FieldScalar(const mpq_class& q) : coords_{q} { coords_[0].canonicalize(); }  // NOLINT
  FieldScalar(BasisPtr basis, std::vector<mpq_class> coords)
      : basis_(std::move(basis)), coords_(std::move(coords)) {
    // mpq_class(n, d) is not reduced; every later comparison assumes it is
    for (auto& c : coords_) c.canonicalize();
    if (!basis_) {
      if (coords_.size() != 1) throw ConfigError("rational scalar needs exactly one coordinate");
    } else if (coords_.size() != basis_->size()) {
      throw ConfigError("scalar has " + std::to_string(coords_.size()) +
                        " coordinates, basis has " + std::to_string(basis_->size()));
    }
  }

  /// The element c_index of the basis.
  static FieldScalar unit(BasisPtr basis, std::size_t index) {
    std::vector<mpq_class> c(basis->size());
    c.at(index) = 1;
    return FieldScalar(std::move(basis), std::move(c));
  }

  const BasisPtr& basis() const { return basis_; }
  std::size_t size() const { return coords_.size(); }
  /// Coordinate i (zero beyond the stored length).
  mpq_class coord(std::size_t i) const { return i < coords_.size() ? coords_[i] : mpq_class(0); }
  const std::vector<mpq_class>& coords() const { return coords_; }

  bool is_zero() const {
    return std::all_of(coords_.begin(), coords_.end(), [](const mpq_class& q) { return q == 0; });
  }
  bool is_rational() const {
    return std::all_of(coords_.begin() + 1, coords_.end(),
                       [](const mpq_class& q) { return q == 0; });
  }
  const mpq_class& rational_part() const { return coords_[0]; }

  /// Coordinates padded to the given basis (used for flattening to Q^k).
  std::vector<mpq_class> coords_in(const BasisPtr& basis) const {
    const std::size_t k = basis ? basis->size() : 1;
    if (basis_ && basis && basis_ != basis && !(*basis_ == *basis))
      throw ConfigError("scalar basis mismatch");
    if (coords_.size() > k && !is_rational()) throw ConfigError("scalar basis mismatch");
    std::vector<mpq_class> out(k);
    for (std::size_t i = 0; i < std::min(k, coords_.size()); ++i) out[i] = coords_[i];
    return out;
  }

  FieldScalar operator-() const {
    FieldScalar r = *this;
    for (auto& c : r.coords_) c = -c;
    return r;
  }

  FieldScalar& operator+=(const FieldScalar& o) {
    adopt(o);
    for (std::size_t i = 0; i < o.coords_.size(); ++i) coords_[i] += o.coords_[i];
    return *this;
  }
  FieldScalar& operator-=(const FieldScalar& o) {
    adopt(o);
    for (std::size_t i = 0; i < o.coords_.size(); ++i) coords_[i] -= o.coords_[i];
    return *this;
  }
  FieldScalar& operator*=(mpq_class q) {
    q.canonicalize();
    for (auto& c : coords_) c *= q;
    return *this;
  }
  FieldScalar& operator/=(mpq_class q) {
    q.canonicalize();
    if (q == 0) throw InternalError("division of a scalar by zero");
    for (auto& c : coords_) c /= q;
    return *this;
  }

  friend FieldScalar operator+(FieldScalar a, const FieldScalar& b) { return a += b; }
  friend FieldScalar operator-(FieldScalar a, const FieldScalar& b) { return a -= b; }
  friend FieldScalar operator*(FieldScalar a, const mpq_class& q) { return a *= q; }
  friend FieldScalar operator*(const mpq_class& q, FieldScalar a) { return a *= q; }
  friend FieldScalar operator/(FieldScalar a, const mpq_class& q) { return a /= q; }

  /// General product.  Needs the basis multiplication table unless one
  /// factor is rational.
  friend FieldScalar operator*(const FieldScalar& a, const FieldScalar& b) {
    if (a.is_rational()) return b * a.rational_part();
    if (b.is_rational()) return a * b.rational_part();
    const BasisPtr basis = common_basis(a, b);
    std::vector<mpq_class> out(basis->size());
    for (std::size_t i = 0; i < a.coords_.size(); ++i) {
      if (a.coords_[i] == 0) continue;
      for (std::size_t j = 0; j < b.coords_.size(); ++j) {
        if (b.coords_[j] == 0) continue;
        const mpq_class w = a.coords_[i] * b.coords_[j];
        if (i == 0 || j == 0) {
          out[i + j] += w;
          continue;
        }
        const auto* prod = basis->product(i, j);
        if (!prod)
          throw ConfigError("product " + basis->names()[i] + "*" + basis->names()[j] +
                            " needs a multiplication table entry");
        for (std::size_t t = 0; t < out.size(); ++t) out[t] += w * (*prod)[t];
      }
    }
    return FieldScalar(basis, std::move(out));
  }

  FieldScalar inverse() const;

  friend FieldScalar operator/(const FieldScalar& a, const FieldScalar& b) {
    if (b.is_rational()) return a / b.rational_part();
    return a * b.inverse();
  }

  friend bool operator==(const FieldScalar& a, const FieldScalar& b) {
    if (a.basis_ && b.basis_) (void)common_basis(a, b);
    const std::size_t k = std::max(a.coords_.size(), b.coords_.size());
    for (std::size_t i = 0; i < k; ++i)
      if (a.coord(i) != b.coord(i)) return false;
    return true;
  }

  /// Midpoint value from the basis approximations (exact rational).
  mpq_class approximate() const {
    mpq_class v = coords_[0];
    for (std::size_t i = 1; i < coords_.size(); ++i)
      if (coords_[i] != 0) v += coords_[i] * basis_->center(i);
    return v;
  }
  double to_double() const { return approximate().get_d(); }

  /// Sign, with zero decided exactly and nonzero signs by interval evaluation
  /// at successively finer widths.
  Sign certified_sign(const PrecisionSchedule& schedule = {}) const {
    if (is_zero()) return Sign::zero;
    if (is_rational()) return coords_[0] > 0 ? Sign::positive : Sign::negative;
    for (long digits : schedule.digits) {
      const mpz_class scale = detail::pow10(digits);
      const mpq_class width(1, scale);
      mpq_class center = coords_[0];
      mpq_class radius = 0;
      for (std::size_t i = 1; i < coords_.size(); ++i) {
        if (coords_[i] == 0) continue;
        // truncate the basis approximation to the current width
        mpq_class scaled = basis_->center(i) * scale;
        mpz_class truncated = scaled.get_num() / scaled.get_den();
        const mpq_class a(truncated, scale);
        center += coords_[i] * a;
        radius += abs(coords_[i]) * (width + basis_->radius(i));
      }
      if (center - radius > 0) return Sign::positive;
      if (center + radius < 0) return Sign::negative;
    }
    throw UndecidedSignError("sign of " + to_string() +
                             " undecided: basis approximations too coarse");
  }

  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      if (coords_[i] == 0) continue;
      if (!out.empty()) out += " + ";
      out += rational_to_string(coords_[i]);
      if (i > 0) out += "*" + basis_->names()[i];
    }
    return out.empty() ? "0" : out;
  }

  friend std::ostream& operator<<(std::ostream& os, const FieldScalar& s) {
    return os << s.to_string();
  }

 private:
  static BasisPtr common_basis(const FieldScalar& a, const FieldScalar& b) {
    if (!a.basis_) return b.basis_;
    if (!b.basis_) return a.basis_;
    if (a.basis_ != b.basis_ && !(*a.basis_ == *b.basis_))
      throw ConfigError("scalar basis mismatch");
    return a.basis_;
  }

  void adopt(const FieldScalar& o) {
    if (o.basis_ && !basis_) {
      basis_ = o.basis_;
      coords_.resize(basis_->size());
    } else if (o.basis_ && basis_) {
      (void)common_basis(*this, o);
    }
  }

  BasisPtr basis_;
  std::vector<mpq_class> coords_;
};

inline FieldScalar FieldScalar::inverse() const {
  if (is_zero()) throw InternalError("inverse of zero scalar");
  if (is_rational()) return FieldScalar(mpq_class(1) / coords_[0]);
  if (!basis_->has_full_table())
    throw ConfigError("inverse of an irrational scalar needs a full multiplication table");
  // Solve (multiplication-by-this) x = 1 over Q.
  const std::size_t k = basis_->size();
  std::vector<std::vector<mpq_class>> m(k, std::vector<mpq_class>(k + 1));
  for (std::size_t col = 0; col < k; ++col) {
    const FieldScalar img = *this * unit(basis_, col);
    for (std::size_t row = 0; row < k; ++row) m[row][col] = img.coord(row);
  }
  m[0][k] = 1;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t p = c;
    while (p < k && m[p][c] == 0) ++p;
    if (p == k) throw ConfigError("basis algebra is not a field: " + to_string() + " has no inverse");
    std::swap(m[p], m[c]);
    const mpq_class piv = m[c][c];
    for (auto& x : m[c]) x /= piv;
    for (std::size_t r = 0; r < k; ++r) {
      if (r == c || m[r][c] == 0) continue;
      const mpq_class f = m[r][c];
      for (std::size_t t = c; t <= k; ++t) m[r][t] -= f * m[c][t];
    }
  }
  std::vector<mpq_class> x(k);
  for (std::size_t r = 0; r < k; ++r) x[r] = m[r][k];
  return FieldScalar(basis_, std::move(x));
}

inline Sign certified_sign(const FieldScalar& a, const PrecisionSchedule& schedule = {}) {
  return a.certified_sign(schedule);
}

/// Sign of a - b.
inline Sign compare(const FieldScalar& a, const FieldScalar& b,
                    const PrecisionSchedule& schedule = {}) {
  return (a - b).certified_sign(schedule);
}

inline const char* to_string(Sign s) {
  switch (s) {
    case Sign::negative: return "negative";
    case Sign::zero: return "zero";
    case Sign::positive: return "positive";
  }
  return "?";
}

using Vector = std::vector<FieldScalar>;

}  // namespace toricq
