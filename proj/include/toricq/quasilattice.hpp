#pragma once

// The quasilattice Q, the map pi: R^d -> d (e_j -> X_j), its kernel n, and
// "lattice + subspace" subgroups with an exact membership test.

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "toricq/error.hpp"
#include "toricq/linalg.hpp"
#include "toricq/scalar.hpp"

namespace toricq {

/// The set (Z-span of lattice_part) + (R-span of subspace_part).  The two
/// parts are kept apart; quasilattices are dense, so there is no reduced form.
struct SubgroupDescriptor {
  std::size_t ambient_dim = 0;
  std::vector<Vector> lattice_part;
  std::vector<Vector> subspace_part;
};

/// Q-rank of the flattened vectors, i.e. the rank of their Z-span as an
/// abelian group.
inline std::size_t z_rank(const std::vector<Vector>& vectors, const BasisPtr& basis) {
  if (vectors.empty()) return 0;
  std::vector<std::vector<mpq_class>> flat;
  for (const auto& v : vectors) flat.push_back(flatten(v, basis));
  return rank(Matrix<mpq_class>::from_columns(flat, flat.front().size()));
}

namespace detail {

/// Rows w spanning the annihilator of span(vectors) in R^dim (w . v = 0).
inline std::vector<Vector> annihilator(const std::vector<Vector>& vectors, std::size_t dim) {
  if (vectors.empty()) {
    std::vector<Vector> id(dim, Vector(dim, FieldScalar(0)));
    for (std::size_t i = 0; i < dim; ++i) id[i][i] = FieldScalar(1);
    return id;
  }
  return nullspace(Matrix<FieldScalar>::from_rows(vectors, dim));
}

inline Vector apply_rows(const std::vector<Vector>& rows, const Vector& v) {
  Vector out;
  out.reserve(rows.size());
  for (const auto& w : rows) out.push_back(dot(w, v));
  return out;
}

inline BasisPtr basis_of(const std::vector<Vector>& vs) {
  for (const auto& v : vs)
    for (const auto& s : v)
      if (s.basis()) return s.basis();
  return nullptr;
}

}  // namespace detail

/// Decides v in (Z-span lattice_part) + (R-span subspace_part): the subspace
/// is quotiented out exactly, then the remaining Z-span question is an
/// integer linear system over Q solved by Hermite reduction.
inline bool membership(const Vector& v, const SubgroupDescriptor& g) {
  if (v.size() != g.ambient_dim) throw ConfigError("membership: dimension mismatch");
  const auto w = detail::annihilator(g.subspace_part, g.ambient_dim);
  const Vector target = detail::apply_rows(w, v);
  if (std::all_of(target.begin(), target.end(), [](const FieldScalar& s) { return s.is_zero(); }))
    return true;
  if (g.lattice_part.empty()) return false;

  std::vector<Vector> images;
  for (const auto& l : g.lattice_part) images.push_back(detail::apply_rows(w, l));
  images.push_back(target);
  const BasisPtr basis = detail::basis_of(images);
  std::vector<std::vector<mpq_class>> cols;
  for (std::size_t i = 0; i + 1 < images.size(); ++i) cols.push_back(flatten(images[i], basis));
  const auto b = flatten(target, basis);
  const auto a = Matrix<mpq_class>::from_columns(cols, b.size());
  return solve_integer(a, b).has_value();
}

struct QuasilatticeSetup {
  std::size_t dim = 0;               // n
  BasisPtr basis;
  std::vector<Vector> generators;    // generators of Q
  bool normals_included = true;      // every X_j verified to lie in Q
  std::vector<Vector> normals;       // pi(e_j) = X_j
  std::vector<Vector> kernel_basis;  // basis of n = ker pi, vectors in R^d
  std::size_t z_rank = 0;

  std::size_t facet_count() const { return normals.size(); }

  SubgroupDescriptor descriptor() const { return {dim, generators, {}}; }

  /// pi(u) = sum_j u_j X_j
  Vector pi(const Vector& u) const {
    Vector out(dim, FieldScalar(0));
    for (std::size_t j = 0; j < normals.size(); ++j) {
      if (u.at(j).is_zero()) continue;
      for (std::size_t i = 0; i < dim; ++i) out[i] += u[j] * normals[j][i];
    }
    return out;
  }
};

/// Q defaults to the Z-span of the normals; explicit generators must contain them.
inline QuasilatticeSetup build_setup(std::size_t dim, const std::vector<Vector>& normals,
                                     const std::optional<std::vector<Vector>>& generators,
                                     BasisPtr basis) {
  QuasilatticeSetup s;
  s.dim = dim;
  s.basis = std::move(basis);
  s.normals = normals;
  const auto pi = Matrix<FieldScalar>::from_columns(normals, dim);
  if (rank(pi) != dim) throw ConfigError("normals do not span d");
  s.kernel_basis = nullspace(pi);

  if (generators && !generators->empty()) {
    for (const auto& g : *generators)
      if (g.size() != dim) throw ConfigError("quasilattice generator of wrong length");
    if (rank(Matrix<FieldScalar>::from_columns(*generators, dim)) != dim)
      throw ConfigError("quasilattice generators do not span d");
    s.generators = *generators;
    const SubgroupDescriptor q{dim, s.generators, {}};
    for (std::size_t j = 0; j < normals.size(); ++j)
      if (!membership(normals[j], q))
        throw ConfigError("normal X_" + std::to_string(j + 1) + " is not in the quasilattice");
  } else {
    s.generators = normals;
  }
  s.normals_included = true;
  s.z_rank = z_rank(s.generators, s.basis);
  return s;
}

/// Q is a lattice iff its Z-rank equals dim d.
inline bool is_rational_choice(const QuasilatticeSetup& s) { return s.z_rank == s.dim; }

/// Generators of Q ∩ span(subspace): the integer kernel of Z^m -> d/span
/// induced by the generators, mapped back into d (zero images dropped).
inline SubgroupDescriptor intersect_with_subspace(const QuasilatticeSetup& s,
                                                  const std::vector<Vector>& subspace) {
  SubgroupDescriptor out{s.dim, {}, {}};
  const auto w = detail::annihilator(subspace, s.dim);
  const auto& gens = s.generators;
  if (w.empty()) {
    out.lattice_part = gens;
    return out;
  }
  std::vector<std::vector<mpq_class>> cols;
  for (const auto& g : gens) cols.push_back(flatten(detail::apply_rows(w, g), s.basis));
  const auto a = Matrix<mpq_class>::from_columns(cols, cols.front().size());
  for (const auto& m : integer_kernel(a)) {
    Vector v(s.dim, FieldScalar(0));
    for (std::size_t i = 0; i < gens.size(); ++i) {
      if (m[i] == 0) continue;
      const mpq_class coef(m[i]);
      for (std::size_t c = 0; c < s.dim; ++c) v[c] += gens[i][c] * coef;
    }
    if (std::any_of(v.begin(), v.end(), [](const FieldScalar& x) { return !x.is_zero(); }))
      out.lattice_part.push_back(std::move(v));
  }
  return out;
}

}  // namespace toricq
