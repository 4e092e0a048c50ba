#pragma once

// The quotient X_Delta = C^d_Delta // N_C: admissible supports, the closed-orbit
// criterion, strata T_max and T_F with their models (C^*)^p / Gamma_F, the
// subgroups N^F and N^F_0, and the orbit-equivalence decision.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "toricq/error.hpp"
#include "toricq/linalg.hpp"
#include "toricq/momentflow.hpp"
#include "toricq/polytope.hpp"
#include "toricq/quasilattice.hpp"
#include "toricq/scalar.hpp"

namespace toricq {

// ---------------------------------------------------------------------------
// Supports

struct Admissibility {
  bool admissible = false;
  std::vector<std::size_t> witnesses;  // faces with J ⊆ I_F and I_F minimal
};

inline bool contains(const IndexSet& big, const IndexSet& small) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

/// z with zero set J lies in C^d_Delta iff J ⊆ I_F for some face F.
inline Admissibility is_admissible(const IndexSet& zeros, const FaceLattice& lattice) {
  Admissibility out;
  const auto& faces = lattice.faces();
  std::vector<std::size_t> cands;
  for (std::size_t i = 0; i < faces.size(); ++i)
    if (contains(faces[i].active, zeros)) cands.push_back(i);
  for (auto i : cands) {
    const bool minimal = std::none_of(cands.begin(), cands.end(), [&](std::size_t k) {
      return k != i && faces[k].active.size() < faces[i].active.size() &&
             contains(faces[i].active, faces[k].active);
    });
    if (minimal) out.witnesses.push_back(i);
  }
  out.admissible = !cands.empty();
  return out;
}

/// Closed A-orbits are exactly those with zero set equal to some I_F.
inline bool is_closed_orbit(const IndexSet& zeros, const FaceLattice& lattice) {
  if (!is_admissible(zeros, lattice).admissible)
    throw DomainError("support " + detail::set_to_string(zeros) + " is outside C^d_Delta");
  return lattice.find(zeros).has_value();
}

// ---------------------------------------------------------------------------
// Strata

/// T_F ≅ (C^*)^p / Gamma_F in the exponent coordinates y = B^{-1} rho(x),
/// where rho: d -> d/d_F and B is built from rho(X_j), j ∉ I_F.
struct StratumModel {
  std::size_t p = 0;
  IndexSet coordinate_facets;          // j whose rho(X_j) form B
  std::vector<Vector> rho_rows;        // rows of rho in R^n (annihilator of d_F)
  std::vector<Vector> gamma_generators;  // exponent vectors mod Z^p, none integral
  std::size_t gamma_rank = 0;          // Z-rank of Gamma_F
  bool finite = true;
  std::optional<mpz_class> order;      // |Gamma_F| when finite
  bool acts_freely = true;
};

struct Stratum {
  bool maximal = false;
  std::optional<std::size_t> face;     // singular face index (none for T_max)
  std::size_t dim = 0;
  std::vector<IndexSet> member_supports;
  StratumModel model;
};

namespace detail {

inline FieldScalar fractional_part(const FieldScalar& x) {
  // reduce the rational coordinate mod 1; irrational coordinates stay
  mpq_class q = x.rational_part();
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return x - FieldScalar(mpq_class(fl));
}

inline bool is_integral(const FieldScalar& x) {
  return x.is_rational() && x.rational_part().get_den() == 1;
}

}  // namespace detail

inline StratumModel stratum_model(const FaceLattice& lattice, std::size_t face_index,
                                  const QuasilatticeSetup& q) {
  const Face& face = lattice.face(face_index);
  StratumModel m;
  m.p = face.dim;

  std::vector<Vector> span;
  for (auto j : face.active) span.push_back(q.normals[j]);
  m.rho_rows = detail::annihilator(span, q.dim);
  if (m.rho_rows.size() != m.p) throw InternalError("codimension of d_F differs from face dim");
  if (m.p == 0) return m;

  // basis of d/d_F from the images of the facets not in I_F
  IndexSet outside;
  std::vector<Vector> images;
  for (std::size_t j = 0; j < q.facet_count(); ++j) {
    if (std::binary_search(face.active.begin(), face.active.end(), j)) continue;
    outside.push_back(j);
    images.push_back(detail::apply_rows(m.rho_rows, q.normals[j]));
  }
  const auto img = Matrix<FieldScalar>::from_columns(images, m.p);
  Matrix<FieldScalar> b(m.p, m.p);
  std::size_t col = 0;
  for (auto k : independent_columns(img)) {
    m.coordinate_facets.push_back(outside[k]);
    for (std::size_t r = 0; r < m.p; ++r) b(r, col) = images[k][r];
    ++col;
  }
  if (col != m.p) throw InternalError("facets outside I_F do not span d/d_F");

  std::vector<Vector> lattice_gens;  // B^{-1} rho(Q) together with Z^p
  for (const auto& g : q.generators) {
    const auto y = solve(b, detail::apply_rows(m.rho_rows, g));
    if (!y) throw InternalError("rho(g) outside d/d_F");
    Vector reduced;
    for (const auto& c : *y) reduced.push_back(detail::fractional_part(c));
    lattice_gens.push_back(reduced);
    const bool trivial = std::all_of(reduced.begin(), reduced.end(),
                                     [](const FieldScalar& c) { return c.is_zero(); });
    if (!trivial) m.gamma_generators.push_back(std::move(reduced));
  }
  for (std::size_t i = 0; i < m.p; ++i) {
    Vector e(m.p, FieldScalar(0));
    e[i] = FieldScalar(1);
    lattice_gens.push_back(std::move(e));
  }
  const std::size_t rank_l = z_rank(lattice_gens, q.basis);
  m.gamma_rank = rank_l - m.p;
  m.finite = rank_l == m.p;
  // a translation exp(2 pi i y) has a fixed point only if y ∈ Z^p
  m.acts_freely = std::none_of(m.gamma_generators.begin(), m.gamma_generators.end(),
                               [](const Vector& y) {
                                 return std::all_of(y.begin(), y.end(), detail::is_integral);
                               });
  if (m.finite) {
    // L = (1/D) Z-span(D * gens); [L : Z^p] = D^p / det(HNF basis)
    mpz_class den = 1;
    for (const auto& v : lattice_gens)
      for (const auto& c : v) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.rational_part().get_den_mpz_t());
    Matrix<mpz_class> a(m.p, lattice_gens.size());
    for (std::size_t c = 0; c < lattice_gens.size(); ++c)
      for (std::size_t r = 0; r < m.p; ++r) {
        const mpq_class v = lattice_gens[c][r].rational_part() * den;
        a(r, c) = v.get_num();
      }
    const auto h = column_hermite(std::move(a));
    mpz_class det = 1;
    for (std::size_t t = 0; t < h.rank(); ++t) det *= h.hermite(h.pivot_rows[t], t);
    mpz_class dp;
    mpz_pow_ui(dp.get_mpz_t(), den.get_mpz_t(), m.p);
    m.order = dp / det;
  }
  return m;
}

struct StratumRef {
  bool maximal = false;
  std::size_t face = 0;
  std::size_t dim = 0;
};

/// T_F when the face with I_F = J is singular, T_max when it is regular.
inline StratumRef stratum_of(const IndexSet& zeros, const FaceLattice& lattice) {
  if (!is_admissible(zeros, lattice).admissible)
    throw DomainError("support " + detail::set_to_string(zeros) + " is outside C^d_Delta");
  const auto f = lattice.find(zeros);
  if (!f)
    throw DomainError("support " + detail::set_to_string(zeros) +
                      " is not a closed-orbit support; flow to the closed orbit first");
  const Face& face = lattice.face(*f);
  if (face.regular) return {true, *f, lattice.dim()};
  return {false, *f, face.dim};
}

/// T_max followed by one stratum per singular face (in face order).
inline std::vector<Stratum> strata(const FaceLattice& lattice, const QuasilatticeSetup& q) {
  std::vector<Stratum> out;
  Stratum top;
  top.maximal = true;
  top.dim = lattice.dim();
  for (const auto& f : lattice.faces())
    if (f.regular) top.member_supports.push_back(f.active);
  top.model = stratum_model(lattice, *lattice.find({}), q);  // dense open orbit C^n / Q
  out.push_back(std::move(top));
  for (auto i : lattice.singular_faces()) {
    Stratum s;
    s.face = i;
    s.dim = lattice.face(i).dim;
    s.member_supports.push_back(lattice.face(i).active);
    s.model = stratum_model(lattice, i, q);
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// N^F and N^F_0 (exponent coordinates on R^{I_F})

struct FaceGroups {
  SubgroupDescriptor nf;    // N^F = N ∩ (S^1)^{I_F}; complexification doubles the subspace
  SubgroupDescriptor nf0;   // N^F_0: N^F extended by span{s}
  std::size_t nf_dim = 0;   // r_F - n + p
};

inline FaceGroups face_groups(const FaceLattice& lattice, std::size_t face_index,
                              const QuasilatticeSetup& q, const std::vector<mpq_class>& s) {
  const Face& face = lattice.face(face_index);
  const std::size_t r = face.active.size();
  FaceGroups out;
  std::vector<Vector> cols;
  for (auto j : face.active) cols.push_back(q.normals[j]);
  const auto xi = Matrix<FieldScalar>::from_columns(cols, q.dim);
  out.nf.ambient_dim = r;
  out.nf.subspace_part = nullspace(xi);
  out.nf_dim = out.nf.subspace_part.size();
  for (std::size_t i = 0; i < r; ++i) {
    Vector e(r, FieldScalar(0));
    e[i] = FieldScalar(1);
    out.nf.lattice_part.push_back(std::move(e));
  }
  for (const auto& g : intersect_with_subspace(q, cols).lattice_part) {
    const auto u = solve(xi, g);
    if (!u) throw InternalError("element of Q ∩ d_F has no preimage in R^{I_F}");
    out.nf.lattice_part.push_back(*u);
  }
  out.nf0 = out.nf;
  Vector sv;
  for (auto j : face.active) sv.push_back(FieldScalar(s.at(j)));
  out.nf0.subspace_part.push_back(std::move(sv));
  return out;
}

// ---------------------------------------------------------------------------
// Points and equivalence

/// A point of C^d.  Exact mode stores z_j = modulus_j * exp(2 pi i angle_j)
/// with the angle in the scalar span; numeric mode stores complex values.
struct TorusPoint {
  enum class Mode { exact, numeric };
  Mode mode = Mode::numeric;
  std::vector<mpq_class> modulus;               // exact; 0 marks a zero coordinate
  Vector angle;                                 // exact; angle / 2 pi
  std::vector<std::complex<double>> value;      // numeric

  static TorusPoint numeric(std::vector<std::complex<double>> v) {
    TorusPoint p;
    p.mode = Mode::numeric;
    p.value = std::move(v);
    return p;
  }
  static TorusPoint exact(std::vector<mpq_class> modulus, Vector angle) {
    TorusPoint p;
    p.mode = Mode::exact;
    if (modulus.size() != angle.size()) throw ConfigError("modulus/angle length mismatch");
    for (const auto& m : modulus)
      if (m < 0) throw ConfigError("negative modulus");
    p.modulus = std::move(modulus);
    p.angle = std::move(angle);
    return p;
  }

  std::size_t size() const { return mode == Mode::exact ? modulus.size() : value.size(); }

  IndexSet zero_set() const {
    IndexSet j;
    for (std::size_t i = 0; i < size(); ++i)
      if (mode == Mode::exact ? modulus[i] == 0 : value[i] == std::complex<double>(0, 0))
        j.push_back(i);
    return j;
  }

  std::vector<Real> moduli() const {
    std::vector<Real> out;
    for (std::size_t i = 0; i < size(); ++i)
      out.push_back(mode == Mode::exact ? to_real(modulus[i]) : Real(std::abs(value[i])));
    return out;
  }

  std::vector<std::complex<double>> phases() const {
    std::vector<std::complex<double>> out;
    for (std::size_t i = 0; i < size(); ++i) {
      if (mode == Mode::exact) {
        out.push_back(std::polar(1.0, 2 * M_PI * angle[i].to_double()));
      } else {
        const double r = std::abs(value[i]);
        out.push_back(r == 0 ? std::complex<double>(1, 0) : value[i] / r);
      }
    }
    return out;
  }

  std::vector<std::complex<double>> to_complex() const {
    if (mode == Mode::numeric) return value;
    std::vector<std::complex<double>> out;
    const auto ph = phases();
    for (std::size_t i = 0; i < size(); ++i) out.push_back(ph[i] * modulus[i].get_d());
    return out;
  }

  bool identical(const TorusPoint& o) const {
    if (mode != o.mode || size() != o.size()) return false;
    if (mode == Mode::numeric) return value == o.value;
    for (std::size_t i = 0; i < size(); ++i) {
      if (modulus[i] != o.modulus[i]) return false;
      if (modulus[i] != 0 && !(angle[i] == o.angle[i])) return false;
    }
    return true;
  }
};

inline FlowResult flow_to_closed_orbit(const TorusPoint& z, const MomentSetup& s,
                                       const FaceLattice& lattice) {
  return flow_moduli(z.moduli(), z.phases(), s, lattice);
}

enum class Verdict { equivalent, not_equivalent, undecided };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::equivalent: return "equivalent";
    case Verdict::not_equivalent: return "not_equivalent";
    case Verdict::undecided: return "undecided";
  }
  return "?";
}

struct EquivalenceResult {
  Verdict verdict = Verdict::undecided;
  TorusPoint::Mode mode = TorusPoint::Mode::exact;
  std::string reason;
  IndexSet support_a;     // limit supports after the flow
  IndexSet support_b;
  double modulus_residual = 0;
  std::optional<double> phase_residual;  // numeric mode only
};

namespace detail {

/// Orthonormal rows (Real) spanning the same space as the given rows.
inline std::vector<std::vector<Real>> orthonormal_rows(const std::vector<Vector>& rows) {
  std::vector<std::vector<Real>> out;
  for (const auto& r : rows) {
    std::vector<Real> v;
    for (const auto& x : r) v.push_back(to_real(x));
    for (const auto& u : out) {
      Real c = 0;
      for (std::size_t i = 0; i < v.size(); ++i) c += u[i] * v[i];
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * u[i];
    }
    const Real nv = norm2(v);
    if (nv == 0) continue;
    for (auto& x : v) x /= nv;
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace detail

/// Decides whether N(closure(A z)) meets closure(A w).  Both points are first
/// flowed to their closed A-orbits; with equal limit supports J the question
/// becomes w0 ∈ N_C z0, i.e. a phase part  sum_{j∉J} theta_j X_j ∈ Q + R-span{X_j : j ∈ J}
/// and a modulus part  sum_{j∉J} log(|w0_j|/|z0_j|) X_j ∈ R-span{X_j : j ∈ J}.
inline EquivalenceResult equivalent(const TorusPoint& a, const TorusPoint& b,
                                    const QuasilatticeSetup& q, const FaceLattice& lattice,
                                    const MomentSetup& s) {
  if (a.mode != b.mode) throw ConfigError("points must use the same coordinate mode");
  if (a.size() != q.facet_count() || b.size() != q.facet_count())
    throw ConfigError("point has wrong number of coordinates");
  EquivalenceResult out;
  out.mode = a.mode;
  for (const auto* p : {&a, &b})
    if (!is_admissible(p->zero_set(), lattice).admissible)
      throw DomainError("point outside C^d_Delta");

  if (a.identical(b)) {
    out.verdict = Verdict::equivalent;
    out.reason = "identical points";
    out.support_a = out.support_b = a.zero_set();
    return out;
  }

  const FlowResult fa = flow_to_closed_orbit(a, s, lattice);
  const FlowResult fb = flow_to_closed_orbit(b, s, lattice);
  if (!fa.converged || !fb.converged) throw NonconvergenceError("flow did not converge");
  out.support_a = fa.limit_support;
  out.support_b = fb.limit_support;
  if (fa.limit_support != fb.limit_support) {
    out.verdict = Verdict::not_equivalent;
    out.reason = "closed orbits lie over different faces";
    return out;
  }
  const IndexSet& zeros = fa.limit_support;
  IndexSet nonzero;
  for (std::size_t j = 0; j < q.facet_count(); ++j)
    if (!std::binary_search(zeros.begin(), zeros.end(), j)) nonzero.push_back(j);

  std::vector<Vector> span;
  for (auto j : zeros) span.push_back(q.normals[j]);
  const auto rho = detail::annihilator(span, q.dim);
  const double threshold = 1e3 * s.options.tolerance;

  // modulus part
  {
    std::vector<Real> v(q.dim, Real(0));
    for (auto j : nonzero) {
      const Real l = log(fb.representative_modulus[j] / fa.representative_modulus[j]);
      for (std::size_t i = 0; i < q.dim; ++i) v[i] += l * to_real(q.normals[j][i]);
    }
    Real res = 0;
    for (const auto& u : detail::orthonormal_rows(rho)) {
      Real c = 0;
      for (std::size_t i = 0; i < q.dim; ++i) c += u[i] * v[i];
      res += c * c;
    }
    out.modulus_residual = static_cast<double>(sqrt(res));
    if (out.modulus_residual > threshold) {
      out.verdict = Verdict::not_equivalent;
      out.reason = "moduli of the closed-orbit representatives differ along A";
      return out;
    }
  }

  if (rho.empty()) {
    out.verdict = Verdict::equivalent;
    out.reason = "N_C acts transitively on the closed orbit";
    return out;
  }

  if (a.mode == TorusPoint::Mode::exact) {
    Vector v(q.dim, FieldScalar(0));
    for (auto j : nonzero) {
      const FieldScalar theta = b.angle[j] - a.angle[j];
      for (std::size_t i = 0; i < q.dim; ++i) v[i] += theta * q.normals[j][i];
    }
    const SubgroupDescriptor g{q.dim, q.generators, span};
    const bool member = membership(v, g);
    out.verdict = member ? Verdict::equivalent : Verdict::not_equivalent;
    out.reason = member ? "phase difference lies in Q + span{X_j : j in J}"
                        : "phase difference is not in Q + span{X_j : j in J}";
    return out;
  }

  // numeric mode: distance from rho(v) to the projected group rho(Q)
  std::vector<Vector> projected;
  for (const auto& g : q.generators) projected.push_back(detail::apply_rows(rho, g));
  const std::size_t p = rho.size();
  if (z_rank(projected, q.basis) != p) {
    out.verdict = Verdict::undecided;
    out.reason = "projected quasilattice is dense; phase membership not numerically decidable";
    return out;
  }
  const bool rational_image = std::all_of(projected.begin(), projected.end(), [](const Vector& v) {
    return std::all_of(v.begin(), v.end(), [](const FieldScalar& c) { return c.is_rational(); });
  });
  if (!rational_image) {
    out.verdict = Verdict::undecided;
    out.reason = "projected quasilattice has irrational coordinates; no numeric lattice basis";
    return out;
  }
  // lattice basis of rho(Q) via Hermite reduction of the scaled generators
  mpz_class den = 1;
  for (const auto& v : projected)
    for (const auto& c : v) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.rational_part().get_den_mpz_t());
  Matrix<mpz_class> mat(p, projected.size());
  for (std::size_t c = 0; c < projected.size(); ++c)
    for (std::size_t r = 0; r < p; ++r) {
      const mpq_class v = projected[c][r].rational_part() * den;
      mat(r, c) = v.get_num();
    }
  const auto h = column_hermite(std::move(mat));
  std::vector<std::vector<double>> basis(p, std::vector<double>(p));
  for (std::size_t c = 0; c < p; ++c)
    for (std::size_t r = 0; r < p; ++r)
      basis[r][c] = mpq_class(h.hermite(r, c), den).get_d();
  std::vector<double> target(p, 0.0);
  const auto pa = a.phases();
  const auto pb = b.phases();
  for (auto j : nonzero) {
    const double theta = std::arg(pb[j] / pa[j]) / (2 * M_PI);
    for (std::size_t r = 0; r < p; ++r) {
      double rv = 0;
      for (std::size_t i = 0; i < q.dim; ++i) rv += rho[r][i].to_double() * q.normals[j][i].to_double();
      target[r] += theta * rv;
    }
  }
  // basis is lower triangular (column echelon with p pivots): forward substitution
  std::vector<double> coef(p);
  for (std::size_t r = 0; r < p; ++r) {
    double v = target[r];
    for (std::size_t c = 0; c < r; ++c) v -= basis[r][c] * coef[c];
    coef[r] = v / basis[r][r];
  }
  double best = INFINITY;
  std::vector<int> shift(p, -1);
  while (true) {
    std::vector<double> diff(p, 0.0);
    for (std::size_t c = 0; c < p; ++c) {
      const double k = std::round(coef[c]) + shift[c];
      for (std::size_t r = 0; r < p; ++r) diff[r] += basis[r][c] * (coef[c] - k);
    }
    double nrm = 0;
    for (double x : diff) nrm += x * x;
    best = std::min(best, std::sqrt(nrm));
    std::size_t i = 0;
    while (i < p && shift[i] == 1) shift[i++] = -1;
    if (i == p) break;
    ++shift[i];
  }
  out.phase_residual = best;
  if (best > threshold) {
    out.verdict = Verdict::not_equivalent;
    out.reason = "phase difference is bounded away from the projected lattice";
  } else {
    out.verdict = Verdict::undecided;
    out.reason = "phase residual below 1e3 x tolerance; numeric membership not certified";
  }
  return out;
}

}  // namespace toricq
