#pragma once

// Moment map Psi_Delta on C^d for the action of N, the Kempf-Ness functional
// on n = ker pi, and the Newton flow that finds the closed A-orbit in the
// closure of A z (collapsing coordinates whose exponents diverge).
//
// Convention: xi in n acts by z_j -> e^{xi_j} z_j.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "toricq/error.hpp"
#include "toricq/polytope.hpp"
#include "toricq/quasilattice.hpp"
#include "toricq/scalar.hpp"

namespace toricq {

/// Working precision of the flow.  Collapsing coordinates reach |z_j|^2 ~ 1e-20
/// while the other gradient components sit near 1; double cannot resolve that.
using Real = boost::multiprecision::cpp_bin_float_50;

inline Real to_real(const mpq_class& q) {
  return Real(q.get_num().get_str()) / Real(q.get_den().get_str());
}
inline Real to_real(const FieldScalar& s) { return to_real(s.approximate()); }

struct FlowOptions {
  double tolerance = 1e-9;              // on |Psi|
  std::size_t max_iterations = 500;     // per support level
  double collapse_threshold = 1e-10;    // on |z_j e^{xi_j}|
  std::size_t collapse_window = 25;     // consecutive decreasing iterations
  double step_tolerance = 1e-6;         // Newton step (inf-norm) at convergence
  double exponent_limit = 700;
};

struct MomentSetup {
  std::vector<std::vector<Real>> kernel;  // k vectors of length d (basis of n)
  std::vector<Real> offsets;              // lambda_j
  FlowOptions options;

  std::size_t d() const { return offsets.size(); }
  std::size_t k() const { return kernel.size(); }

  static MomentSetup from(const QuasilatticeSetup& q, const Vector& offsets,
                          FlowOptions options = {}) {
    MomentSetup s;
    s.options = options;
    for (const auto& b : q.kernel_basis) {
      std::vector<Real> v;
      for (const auto& x : b) v.push_back(to_real(x));
      s.kernel.push_back(std::move(v));
    }
    for (const auto& l : offsets) s.offsets.push_back(to_real(l));
    return s;
  }

  /// xi_j = sum_i y_i b_i[j]
  std::vector<Real> ambient(const std::vector<Real>& y) const {
    std::vector<Real> xi(d(), Real(0));
    for (std::size_t i = 0; i < k(); ++i)
      for (std::size_t j = 0; j < d(); ++j) xi[j] += y[i] * kernel[i][j];
    return xi;
  }
};

/// <Psi(z), b_i> = sum_j b_i[j] (|z_j|^2/2 + lambda_j); Psi(0) = sum_j lambda_j iota^*(e_j^*).
inline std::vector<Real> moment_map_sq(const std::vector<Real>& modulus_sq, const MomentSetup& s) {
  std::vector<Real> out(s.k(), Real(0));
  for (std::size_t i = 0; i < s.k(); ++i)
    for (std::size_t j = 0; j < s.d(); ++j)
      out[i] += s.kernel[i][j] * (modulus_sq[j] / 2 + s.offsets[j]);
  return out;
}

inline std::vector<double> moment_map(const std::vector<std::complex<double>>& z,
                                      const MomentSetup& s) {
  std::vector<Real> m2;
  for (const auto& c : z) m2.push_back(Real(std::norm(c)));
  std::vector<double> out;
  for (const auto& v : moment_map_sq(m2, s)) out.push_back(static_cast<double>(v));
  return out;
}

namespace detail {

inline void guard_exponents(const std::vector<Real>& xi, const FlowOptions& o) {
  for (const auto& x : xi)
    if (boost::multiprecision::abs(x) > o.exponent_limit)
      throw NonconvergenceError("exponent beyond +-" + std::to_string(o.exponent_limit) +
                                ": Kempf-Ness functional unbounded along the flow");
}

/// f(y) = sum_j (m_j^2/4) e^{2 xi_j} + sum_j lambda_j xi_j with xi = N y.
inline Real kempf_ness_value(const std::vector<Real>& y, const std::vector<Real>& modulus_sq,
                             const MomentSetup& s) {
  const auto xi = s.ambient(y);
  guard_exponents(xi, s.options);
  Real f = 0;
  for (std::size_t j = 0; j < s.d(); ++j) {
    if (modulus_sq[j] != 0) f += modulus_sq[j] / 4 * exp(2 * xi[j]);
    f += s.offsets[j] * xi[j];
  }
  return f;
}

inline std::vector<Real> kempf_ness_gradient(const std::vector<Real>& y,
                                             const std::vector<Real>& modulus_sq,
                                             const MomentSetup& s) {
  const auto xi = s.ambient(y);
  guard_exponents(xi, s.options);
  std::vector<Real> scaled(s.d());
  for (std::size_t j = 0; j < s.d(); ++j)
    scaled[j] = modulus_sq[j] == 0 ? Real(0) : Real(modulus_sq[j] * exp(2 * xi[j]));
  return moment_map_sq(scaled, s);
}

/// Solves a symmetric positive definite system by Cholesky.
inline std::vector<Real> cholesky_solve(std::vector<std::vector<Real>> a, std::vector<Real> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    Real diag = a[c][c];
    for (std::size_t t = 0; t < c; ++t) diag -= a[c][t] * a[c][t];
    if (diag <= 0) throw InternalError("Newton system not positive definite");
    a[c][c] = sqrt(diag);
    for (std::size_t r = c + 1; r < n; ++r) {
      Real v = a[r][c];
      for (std::size_t t = 0; t < c; ++t) v -= a[r][t] * a[c][t];
      a[r][c] = v / a[c][c];
    }
  }
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t t = 0; t < r; ++t) b[r] -= a[r][t] * b[t];
    b[r] /= a[r][r];
  }
  for (std::size_t r = n; r-- > 0;) {
    for (std::size_t t = r + 1; t < n; ++t) b[r] -= a[t][r] * b[t];
    b[r] /= a[r][r];
  }
  return b;
}

inline Real norm2(const std::vector<Real>& v) {
  Real s = 0;
  for (const auto& x : v) s += x * x;
  return sqrt(s);
}

inline Real norm_inf(const std::vector<Real>& v) {
  Real s = 0;
  for (const auto& x : v) s = std::max<Real>(s, boost::multiprecision::abs(x));
  return s;
}

}  // namespace detail

/// Kempf-Ness functional at xi (kernel-basis coordinates).
inline double kempf_ness(const std::vector<double>& xi, const std::vector<std::complex<double>>& z,
                         const MomentSetup& s) {
  std::vector<Real> y(xi.begin(), xi.end());
  std::vector<Real> m2;
  for (const auto& c : z) m2.push_back(Real(std::norm(c)));
  return static_cast<double>(detail::kempf_ness_value(y, m2, s));
}

/// Gradient of the Kempf-Ness functional; equals <Psi(exp(xi) z), b_i>.
inline std::vector<double> kempf_ness_gradient(const std::vector<double>& xi,
                                               const std::vector<std::complex<double>>& z,
                                               const MomentSetup& s) {
  std::vector<Real> y(xi.begin(), xi.end());
  std::vector<Real> m2;
  for (const auto& c : z) m2.push_back(Real(std::norm(c)));
  std::vector<double> out;
  for (const auto& v : detail::kempf_ness_gradient(y, m2, s)) out.push_back(static_cast<double>(v));
  return out;
}

struct CollapseEvent {
  std::size_t coordinate;   // 0-based
  std::size_t iteration;    // total iteration count at the collapse
  double amplitude;         // |z_j e^{xi_j}| when declared collapsed
};

struct FlowResult {
  std::vector<double> minimizer;                      // y* in the kernel basis
  std::vector<Real> representative_modulus;           // |z*_j|
  std::vector<std::complex<double>> representative;   // z*
  IndexSet limit_support;                             // J*, zero set of z*
  bool converged = false;
  double residual = 0;                                // |Psi(z*)|
  std::size_t iterations = 0;
  std::vector<CollapseEvent> collapses;
};

inline IndexSet zero_set(const std::vector<Real>& modulus) {
  IndexSet j;
  for (std::size_t i = 0; i < modulus.size(); ++i)
    if (modulus[i] == 0) j.push_back(i);
  return j;
}

inline IndexSet zero_set(const std::vector<std::complex<double>>& z) {
  IndexSet j;
  for (std::size_t i = 0; i < z.size(); ++i)
    if (z[i] == std::complex<double>(0, 0)) j.push_back(i);
  return j;
}

/// True iff J is contained in I_F for some face F.
inline bool support_admissible(const IndexSet& zeros, const FaceLattice& lattice) {
  for (const auto& f : lattice.faces())
    if (std::includes(f.active.begin(), f.active.end(), zeros.begin(), zeros.end())) return true;
  return false;
}

/// Minimises the Kempf-Ness functional from xi = 0 by regularised Newton with
/// Armijo backtracking.  Coordinates whose amplitude keeps shrinking below the
/// collapse threshold are set to zero and the minimisation restarts on the
/// reduced support.  `phase` gives z_j / |z_j| for the representative.
inline FlowResult flow_moduli(const std::vector<Real>& modulus,
                              const std::vector<std::complex<double>>& phase, const MomentSetup& s,
                              const FaceLattice& lattice) {
  const FlowOptions& o = s.options;
  if (modulus.size() != s.d()) throw ConfigError("point has wrong number of coordinates");
  if (!support_admissible(zero_set(modulus), lattice))
    throw DomainError("point outside C^d_Delta: zero set " +
                      detail::set_to_string(zero_set(modulus)) + " is in no I_F");

  FlowResult res;
  std::vector<Real> m2(s.d());
  for (std::size_t j = 0; j < s.d(); ++j) m2[j] = modulus[j] * modulus[j];
  std::vector<Real> y(s.k(), Real(0));
  std::vector<Real> last_amp(s.d(), Real(-1));
  std::vector<std::size_t> streak(s.d(), 0);
  std::size_t level_iterations = 0;

  const auto amplitude = [&](const std::vector<Real>& xi, std::size_t j) {
    return Real(modulus[j] * exp(xi[j]));
  };

  while (true) {
    const auto g = detail::kempf_ness_gradient(y, m2, s);
    const Real gnorm = detail::norm2(g);

    // Newton system (H + mu I) p = -g, H = N^T diag(m_j^2 e^{2 xi_j}) N
    const auto xi = s.ambient(y);
    std::vector<std::vector<Real>> h(s.k(), std::vector<Real>(s.k(), Real(0)));
    for (std::size_t j = 0; j < s.d(); ++j) {
      if (m2[j] == 0) continue;
      const Real w = m2[j] * exp(2 * xi[j]);
      for (std::size_t a = 0; a < s.k(); ++a)
        for (std::size_t b = 0; b <= a; ++b) h[a][b] += w * s.kernel[a][j] * s.kernel[b][j];
    }
    for (std::size_t a = 0; a < s.k(); ++a) {
      for (std::size_t b = 0; b < a; ++b) h[b][a] = h[a][b];
      h[a][a] += gnorm;
    }
    std::vector<Real> p(s.k(), Real(0));
    if (gnorm > 0) {
      std::vector<Real> rhs(g);
      for (auto& v : rhs) v = -v;
      p = detail::cholesky_solve(h, rhs);
    }

    if (gnorm <= o.tolerance && detail::norm_inf(p) <= o.step_tolerance) {
      res.converged = true;
      break;
    }
    if (level_iterations >= o.max_iterations) break;

    // Armijo backtracking
    const Real f0 = detail::kempf_ness_value(y, m2, s);
    Real slope = 0;
    for (std::size_t i = 0; i < s.k(); ++i) slope += g[i] * p[i];
    Real alpha = 1;
    std::vector<Real> trial(s.k());
    for (int halvings = 0; halvings < 60; ++halvings) {
      for (std::size_t i = 0; i < s.k(); ++i) trial[i] = y[i] + alpha * p[i];
      if (detail::kempf_ness_value(trial, m2, s) <= f0 + Real(1e-4) * alpha * slope) break;
      alpha /= 2;
    }
    y = trial;
    ++level_iterations;
    ++res.iterations;

    // collapse detection
    const auto xi_new = s.ambient(y);
    std::vector<std::size_t> collapsing;
    for (std::size_t j = 0; j < s.d(); ++j) {
      if (m2[j] == 0) continue;
      const Real a = amplitude(xi_new, j);
      streak[j] = (last_amp[j] >= 0 && a < last_amp[j]) ? streak[j] + 1 : 0;
      last_amp[j] = a;
      if (a < o.collapse_threshold && streak[j] >= o.collapse_window) collapsing.push_back(j);
    }
    if (!collapsing.empty()) {
      for (auto j : collapsing) {
        res.collapses.push_back(
            {j, res.iterations, static_cast<double>(amplitude(xi_new, j))});
        m2[j] = 0;
      }
      std::fill(streak.begin(), streak.end(), 0);
      std::fill(last_amp.begin(), last_amp.end(), Real(-1));
      level_iterations = 0;
    }
  }

  const auto xi = s.ambient(y);
  res.minimizer.clear();
  for (const auto& v : y) res.minimizer.push_back(static_cast<double>(v));
  res.representative_modulus.assign(s.d(), Real(0));
  res.representative.assign(s.d(), {0, 0});
  std::vector<Real> rep_sq(s.d(), Real(0));
  for (std::size_t j = 0; j < s.d(); ++j) {
    if (m2[j] == 0) continue;
    res.representative_modulus[j] = modulus[j] * exp(xi[j]);
    rep_sq[j] = res.representative_modulus[j] * res.representative_modulus[j];
    res.representative[j] = phase[j] * static_cast<double>(res.representative_modulus[j]);
  }
  res.limit_support = zero_set(res.representative_modulus);
  res.residual = static_cast<double>(detail::norm2(moment_map_sq(rep_sq, s)));
  return res;
}

inline FlowResult flow_to_closed_orbit(const std::vector<std::complex<double>>& z,
                                       const MomentSetup& s, const FaceLattice& lattice) {
  std::vector<Real> modulus;
  std::vector<std::complex<double>> phase;
  for (const auto& c : z) {
    const double r = std::abs(c);
    modulus.emplace_back(r);
    phase.push_back(r == 0 ? std::complex<double>(1, 0) : c / r);
  }
  return flow_moduli(modulus, phase, s, lattice);
}

/// The A-orbit of z is closed iff the flow converges without collapsing.
inline bool verify_closed(const std::vector<std::complex<double>>& z, const MomentSetup& s,
                          const FaceLattice& lattice) {
  const auto r = flow_to_closed_orbit(z, s, lattice);
  if (!r.converged)
    throw NonconvergenceError("flow did not converge within " +
                              std::to_string(s.options.max_iterations) + " iterations");
  return r.limit_support == zero_set(z);
}

}  // namespace toricq
