#pragma once

// Polytopes given by facet inequalities <mu, X_j> >= lambda_j, their face
// lattices (exact vertex enumeration + closure of vertex active sets),
// regular/singular classification, depth, and link polytopes Delta_F.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "toricq/error.hpp"
#include "toricq/linalg.hpp"
#include "toricq/scalar.hpp"

namespace toricq {

using IndexSet = std::vector<std::size_t>;  // sorted, 0-based facet indices

struct HPolytope {
  std::size_t dim = 0;
  std::vector<Vector> normals;  // X_1..X_d, each of length dim
  Vector offsets;               // lambda_1..lambda_d
  BasisPtr basis;               // scalar basis shared by all entries (may be null)

  std::size_t facet_count() const { return normals.size(); }

  /// <mu, X_j> - lambda_j
  FieldScalar slack(std::size_t j, const Vector& mu) const {
    return dot(mu, normals.at(j)) - offsets.at(j);
  }

  /// The dim x d matrix with columns X_j (the map pi).
  Matrix<FieldScalar> normal_matrix() const {
    return Matrix<FieldScalar>::from_columns(normals, dim);
  }
  Matrix<FieldScalar> normal_rows(const IndexSet& rows) const {
    Matrix<FieldScalar> m(rows.size(), dim);
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < dim; ++c) m(r, c) = normals[rows[r]][c];
    return m;
  }
};

struct Face {
  IndexSet active;         // I_F
  std::size_t dim = 0;     // p
  bool regular = true;     // r_F == n - p
  Vector interior_point;   // barycenter of the face's vertices
  std::vector<std::size_t> vertices;

  std::size_t r() const { return active.size(); }
};

enum class FaceClass { regular, singular };

inline FaceClass classify_face(const Face& f, std::size_t ambient_dim) {
  return f.active.size() == ambient_dim - f.dim ? FaceClass::regular : FaceClass::singular;
}

class FaceLattice {
 public:
  FaceLattice() = default;
  FaceLattice(std::size_t dim, std::size_t facets, std::vector<Vector> vertices,
              std::vector<Face> faces)
      : dim_(dim), facets_(facets), vertices_(std::move(vertices)), faces_(std::move(faces)) {
    for (std::size_t i = 0; i < faces_.size(); ++i) index_[faces_[i].active] = i;
  }

  std::size_t dim() const { return dim_; }
  std::size_t facet_count() const { return facets_; }
  const std::vector<Vector>& vertices() const { return vertices_; }
  const std::vector<Face>& faces() const { return faces_; }
  const Face& face(std::size_t i) const { return faces_.at(i); }

  std::optional<std::size_t> find(const IndexSet& active) const {
    auto it = index_.find(active);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// F <= G iff F is contained in the closure of G iff I_F contains I_G.
  bool leq(std::size_t f, std::size_t g) const {
    return std::includes(faces_[f].active.begin(), faces_[f].active.end(),
                         faces_[g].active.begin(), faces_[g].active.end());
  }

  /// f_p for p = 0..dim (the polytope itself counts as f_dim = 1).
  std::vector<std::size_t> f_vector() const {
    std::vector<std::size_t> f(dim_ + 1, 0);
    for (const auto& face : faces_) ++f[face.dim];
    return f;
  }

  bool is_simple() const {
    return std::all_of(faces_.begin(), faces_.end(), [](const Face& f) { return f.regular; });
  }

  std::vector<std::size_t> singular_faces() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < faces_.size(); ++i)
      if (!faces_[i].regular) out.push_back(i);
    return out;
  }

 private:
  std::size_t dim_ = 0;
  std::size_t facets_ = 0;
  std::vector<Vector> vertices_;
  std::vector<Face> faces_;  // sorted by (dim, active)
  std::map<IndexSet, std::size_t> index_;
};

namespace detail {

/// Calls fn(subset) for every k-subset of {0..n-1} in lexicographic order.
inline void for_each_subset(std::size_t n, std::size_t k,
                            const std::function<void(const IndexSet&)>& fn) {
  if (k > n) return;
  IndexSet s(k);
  for (std::size_t i = 0; i < k; ++i) s[i] = i;
  while (true) {
    fn(s);
    std::size_t i = k;
    while (i > 0 && s[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++s[i - 1];
    for (std::size_t j = i; j < k; ++j) s[j] = s[j - 1] + 1;
  }
}

inline IndexSet mask_to_set(std::uint64_t mask) {
  IndexSet s;
  for (std::size_t i = 0; i < 64; ++i)
    if (mask & (std::uint64_t{1} << i)) s.push_back(i);
  return s;
}

inline std::string set_to_string(const IndexSet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i] + 1);
  }
  return out + "}";
}

}  // namespace detail

/// Enumerates every nonempty face, with exact active sets, after checking that
/// the inequalities describe a bounded full-dimensional polytope without
/// redundant facets.
inline FaceLattice enumerate_faces(const HPolytope& p, const PrecisionSchedule& schedule = {}) {
  const std::size_t n = p.dim;
  const std::size_t d = p.facet_count();
  if (n == 0) throw LoadError("polytope dimension must be positive");
  if (d != p.offsets.size()) throw LoadError("normals and offsets differ in count");
  if (d > 64) throw LoadError("at most 64 facets are supported");
  for (const auto& x : p.normals)
    if (x.size() != n) throw LoadError("normal of wrong length");
  if (d < n + 1) throw LoadError("unbounded: fewer than n+1 facets");
  if (rank(p.normal_matrix()) != n) throw LoadError("unbounded: normals do not span");

  // vertices: unique solutions of n tight inequalities that satisfy the rest
  std::vector<Vector> vertices;
  std::vector<std::uint64_t> vertex_masks;
  detail::for_each_subset(d, n, [&](const IndexSet& rows) {
    const auto m = p.normal_rows(rows);
    if (rank(m) != n) return;
    Vector rhs;
    for (auto j : rows) rhs.push_back(p.offsets[j]);
    const auto mu = solve(m, rhs);
    if (!mu) return;
    std::uint64_t mask = 0;
    for (std::size_t j = 0; j < d; ++j) {
      const Sign s = p.slack(j, *mu).certified_sign(schedule);
      if (s == Sign::negative) return;
      if (s == Sign::zero) mask |= std::uint64_t{1} << j;
    }
    for (std::size_t v = 0; v < vertices.size(); ++v)
      if (vertex_masks[v] == mask && vertices[v] == *mu) return;
    vertices.push_back(*mu);
    vertex_masks.push_back(mask);
  });
  if (vertices.empty()) throw LoadError("empty polytope: no feasible vertex");

  // recession cone {y : <y, X_j> >= 0} must be {0}: test every candidate ray
  bool unbounded = false;
  detail::for_each_subset(d, n - 1, [&](const IndexSet& rows) {
    if (unbounded) return;
    Matrix<FieldScalar> m = rows.empty() ? Matrix<FieldScalar>(0, n) : p.normal_rows(rows);
    if (rank(m) != n - 1) return;
    const auto ker = nullspace(m);
    for (int sgn : {1, -1}) {
      Vector y = ker.front();
      if (sgn < 0)
        for (auto& v : y) v = -v;
      bool in_cone = true;
      for (std::size_t j = 0; j < d && in_cone; ++j)
        in_cone = dot(y, p.normals[j]).certified_sign(schedule) != Sign::negative;
      if (in_cone) unbounded = true;
    }
  });
  if (unbounded) throw LoadError("unbounded polyhedron");

  for (std::size_t j = 0; j < d; ++j) {
    const bool strict_somewhere = std::any_of(vertex_masks.begin(), vertex_masks.end(),
                                              [&](std::uint64_t m) { return !(m >> j & 1u); });
    if (!strict_somewhere)
      throw LoadError("not full-dimensional: facet " + std::to_string(j + 1) +
                      " is tight on the whole polytope");
  }

  // faces are exactly the intersections of vertex active sets
  std::set<std::uint64_t> closed(vertex_masks.begin(), vertex_masks.end());
  closed.insert(0);
  for (bool grew = true; grew;) {
    grew = false;
    const std::vector<std::uint64_t> current(closed.begin(), closed.end());
    for (std::size_t i = 0; i < current.size(); ++i)
      for (std::size_t k = 0; k < i; ++k)
        grew |= closed.insert(current[i] & current[k]).second;
  }

  std::vector<Face> faces;
  faces.reserve(closed.size());
  for (const std::uint64_t mask : closed) {
    Face f;
    f.active = detail::mask_to_set(mask);
    f.dim = n - (f.active.empty() ? 0 : rank(p.normal_rows(f.active)));
    f.regular = f.active.size() == n - f.dim;
    Vector bary(n, FieldScalar(0));
    for (std::size_t v = 0; v < vertices.size(); ++v) {
      if ((vertex_masks[v] & mask) != mask) continue;
      f.vertices.push_back(v);
      for (std::size_t c = 0; c < n; ++c) bary[c] += vertices[v][c];
    }
    for (auto& c : bary) c /= mpq_class(static_cast<long>(f.vertices.size()));
    f.interior_point = std::move(bary);
    faces.push_back(std::move(f));
  }
  std::sort(faces.begin(), faces.end(), [](const Face& a, const Face& b) {
    return a.dim != b.dim ? a.dim < b.dim : a.active < b.active;
  });

  // each facet inequality must carve out its own (n-1)-face
  std::vector<bool> has_facet(d, false);
  for (const auto& f : faces) {
    if (f.dim != n - 1) continue;
    if (f.active.size() != 1)
      throw LoadError("redundant facets: inequalities " + detail::set_to_string(f.active) +
                      " define the same facet");
    has_facet[f.active.front()] = true;
  }
  for (std::size_t j = 0; j < d; ++j)
    if (!has_facet[j]) throw LoadError("redundant inequality " + std::to_string(j + 1));

  return FaceLattice(n, d, std::move(vertices), std::move(faces));
}

/// Longest chain F_1 < F_2 < ... of singular faces (0 when the polytope is simple).
inline std::size_t depth(const FaceLattice& lattice) {
  const auto& faces = lattice.faces();
  std::vector<std::size_t> chain(faces.size(), 0);
  std::size_t best = 0;
  // faces are sorted by dimension, so every F < G appears before G
  for (std::size_t g = 0; g < faces.size(); ++g) {
    if (faces[g].regular) continue;
    std::size_t below = 0;
    for (std::size_t f = 0; f < g; ++f)
      if (!faces[f].regular && faces[f].dim < faces[g].dim && lattice.leq(f, g))
        below = std::max(below, chain[f]);
    chain[g] = below + 1;
    best = std::max(best, chain[g]);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Link polytopes

/// Delta_F together with the data used to build it.  Coordinates on d_F^* are
/// eta_k = <xi, X_{b_k}> for the basis {X_{b_k}} of d_F = span{X_j : j in I_F}.
struct LinkPolytope {
  IndexSet parent_active;            // I_F; link facet i comes from parent facet I_F[i]
  std::size_t parent_dim = 0;        // p
  IndexSet span_basis;               // b_k, parent facet indices
  std::vector<Vector> cone_normals;  // X_j, j in I_F, in the basis b (the cone Sigma_F)
  Vector cone_apex;                  // j_F^*(F) in eta coordinates
  std::vector<mpq_class> s;          // s_j, length d, zero off I_F
  Vector x0;                         // X_0 = sum s_j X_j in the basis b
  std::vector<Vector> annihilator_basis;  // basis of ann(X_0) in eta coordinates
  Vector cut_point;                  // eta' with <eta', X_0> = 1
  HPolytope polytope;                // Delta_F in coordinates t for ann(X_0)
  std::vector<Vector> quasilattice_generators;  // images of Q ∩ d_F, empty if not supplied

  std::size_t dim() const { return polytope.dim; }
};

namespace detail {

inline Vector coordinates_in_span(const HPolytope& p, const IndexSet& basis_idx, const Vector& v) {
  Matrix<FieldScalar> b(p.dim, basis_idx.size());
  for (std::size_t k = 0; k < basis_idx.size(); ++k)
    for (std::size_t r = 0; r < p.dim; ++r) b(r, k) = p.normals[basis_idx[k]][r];
  const auto c = solve(b, v);
  if (!c) throw InternalError("vector is not in the span d_F");
  return *c;
}

}  // namespace detail

/// Builds the (n-p-1)-dimensional link polytope of face `face_index` by cutting
/// the cone Sigma_F with <xi - j_F^*(F), X_0> = 1, X_0 = sum_{I_F} X_j/(r_F+1).
/// `span_generators`, when given, are generators of Q ∩ d_F (vectors in d)
/// and are carried over as the induced quasilattice.
inline LinkPolytope link_polytope(const HPolytope& p, const FaceLattice& lattice,
                                  std::size_t face_index,
                                  const std::vector<Vector>* span_generators = nullptr) {
  const Face& face = lattice.face(face_index);
  if (face.active.empty()) throw DomainError("the polytope itself has no link");
  if (face.dim + 1 >= p.dim) throw DomainError("link of a facet is a point");

  LinkPolytope link;
  link.parent_active = face.active;
  link.parent_dim = face.dim;

  const auto rows = p.normal_rows(face.active);
  // first independent X_j (in I_F order) form the basis of d_F
  const auto pivots = independent_columns(rows.transpose());
  for (auto k : pivots) link.span_basis.push_back(face.active[k]);
  const std::size_t r = link.span_basis.size();
  if (r != p.dim - face.dim) throw InternalError("rank of I_F inconsistent with face dimension");

  for (auto j : face.active)
    link.cone_normals.push_back(detail::coordinates_in_span(p, link.span_basis, p.normals[j]));
  for (auto b : link.span_basis) link.cone_apex.push_back(p.offsets[b]);
  for (std::size_t i = 0; i < face.active.size(); ++i)
    if (!(dot(link.cone_normals[i], link.cone_apex) == p.offsets[face.active[i]]))
      throw InternalError("cone apex inconsistent with offsets on I_F");

  link.s.assign(p.facet_count(), mpq_class(0));
  const mpq_class weight(1, static_cast<long>(face.active.size() + 1));
  link.x0.assign(r, FieldScalar(0));
  for (std::size_t i = 0; i < face.active.size(); ++i) {
    link.s[face.active[i]] = weight;
    for (std::size_t k = 0; k < r; ++k) link.x0[k] += link.cone_normals[i][k] * weight;
  }

  Matrix<FieldScalar> x0_row(1, r);
  for (std::size_t k = 0; k < r; ++k) x0_row(0, k) = link.x0[k];
  link.annihilator_basis = nullspace(x0_row);
  {
    std::size_t best = r;
    for (std::size_t k = 0; k < r; ++k) {
      if (link.x0[k].is_zero()) continue;
      if (best == r || (link.x0[k].is_rational() && !link.x0[best].is_rational())) best = k;
    }
    if (best == r) throw InternalError("X_0 vanishes: s_j choice must be revised");
    link.cut_point.assign(r, FieldScalar(0));
    link.cut_point[best] = FieldScalar(1) / link.x0[best];
  }

  HPolytope& out = link.polytope;
  out.dim = r - 1;
  out.basis = p.basis;
  for (const auto& c : link.cone_normals) {
    Vector normal;
    for (const auto& a : link.annihilator_basis) normal.push_back(dot(c, a));
    out.normals.push_back(std::move(normal));
    out.offsets.push_back(-dot(c, link.cut_point));
  }

  if (span_generators) {
    for (const auto& g : *span_generators) {
      const Vector gamma = detail::coordinates_in_span(p, link.span_basis, g);
      Vector image;
      for (const auto& a : link.annihilator_basis) image.push_back(dot(gamma, a));
      link.quasilattice_generators.push_back(std::move(image));
    }
  }
  return link;
}

}  // namespace toricq
