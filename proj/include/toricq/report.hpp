#pragma once

// Stratification reports and the JSON verdicts behind the CLI subcommands.
// Every report is a pure function of its ProblemSpec; link subtrees are built
// from the serialized child problem so that re-feeding it reproduces them.

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "toricq/error.hpp"
#include "toricq/json_io.hpp"
#include "toricq/momentflow.hpp"
#include "toricq/polytope.hpp"
#include "toricq/quasilattice.hpp"
#include "toricq/quotient.hpp"

namespace toricq {

inline constexpr const char* kToolName = "toricq";
inline constexpr const char* kToolVersion = "1.0.0";

/// A loaded problem: the face lattice, the quasilattice setup and the moment data.
struct Session {
  ProblemSpec spec;
  FaceLattice lattice;
  QuasilatticeSetup setup;
  MomentSetup moment;

  static Session load(ProblemSpec spec) {
    Session s;
    s.lattice = enumerate_faces(spec.polytope);
    s.setup = build_setup(spec.polytope.dim, spec.polytope.normals, spec.quasilattice, spec.basis);
    s.moment = MomentSetup::from(s.setup, spec.polytope.offsets, spec.flow);
    s.spec = std::move(spec);
    return s;
  }

  const BasisPtr& basis() const { return spec.basis; }

  std::size_t face_by_active(const IndexSet& active) const {
    const auto f = lattice.find(active);
    if (!f) throw ConfigError(detail::set_to_string(active) + " is not the facet set of a face");
    return *f;
  }
};

// ---------------------------------------------------------------------------
// pieces

inline json descriptor_to_json(const SubgroupDescriptor& g, const BasisPtr& basis) {
  return {{"ambient_dim", g.ambient_dim},
          {"lattice_part", vectors_to_json(g.lattice_part, basis)},
          {"subspace_part", vectors_to_json(g.subspace_part, basis)}};
}

inline json face_to_json(const Face& f, const BasisPtr& basis) {
  return {{"active", index_set_to_json(f.active)},
          {"dim", f.dim},
          {"r", f.r()},
          {"regular", f.regular},
          {"interior_point", vector_to_json(f.interior_point, basis)}};
}

inline json faces_json(const Session& s) {
  json faces = json::array();
  for (const auto& f : s.lattice.faces()) faces.push_back(face_to_json(f, s.basis()));
  json singular = json::array();
  for (auto i : s.lattice.singular_faces()) singular.push_back(index_set_to_json(s.lattice.face(i).active));
  return {{"dimension", s.lattice.dim()},
          {"facet_count", s.lattice.facet_count()},
          {"f_vector", s.lattice.f_vector()},
          {"simple", s.lattice.is_simple()},
          {"depth", depth(s.lattice)},
          {"faces", faces},
          {"singular_faces", singular},
          {"vertices", vectors_to_json(s.lattice.vertices(), s.basis())}};
}

inline json stratum_model_to_json(const StratumModel& m, const BasisPtr& basis) {
  return {{"p", m.p},
          {"coordinate_facets", index_set_to_json(m.coordinate_facets)},
          {"rho_rows", vectors_to_json(m.rho_rows, basis)},
          {"gamma_generators", vectors_to_json(m.gamma_generators, basis)},
          {"gamma_rank", m.gamma_rank},
          {"finite", m.finite},
          {"order", m.order ? json(m.order->get_str()) : json(nullptr)},
          {"acts_freely", m.acts_freely}};
}

inline json stratum_to_json(const Stratum& st, const FaceLattice& lattice, const BasisPtr& basis) {
  json supports = json::array();
  for (const auto& j : st.member_supports) supports.push_back(index_set_to_json(j));
  return {{"kind", st.maximal ? "maximal" : "singular"},
          {"face", st.face ? index_set_to_json(lattice.face(*st.face).active) : json(nullptr)},
          {"dim", st.dim},
          {"member_supports", supports},
          {"model", stratum_model_to_json(st.model, basis)}};
}

inline json strata_json(const Session& s) {
  json out = json::array();
  for (const auto& st : strata(s.lattice, s.setup)) out.push_back(stratum_to_json(st, s.lattice, s.basis()));
  return {{"count", out.size()}, {"strata", out}};
}

inline json quasilattice_json(const Session& s) {
  return {{"generators", vectors_to_json(s.setup.generators, s.basis())},
          {"z_rank", s.setup.z_rank},
          {"dimension", s.setup.dim},
          {"rational", is_rational_choice(s.setup)},
          {"kernel_basis", vectors_to_json(s.setup.kernel_basis, s.basis())},
          {"group_dim", s.setup.kernel_basis.size()}};
}

/// Delta_F with the quasilattice Q ∩ d_F carried into its coordinates.
inline LinkPolytope session_link(const Session& s, std::size_t face_index) {
  std::vector<Vector> span;
  for (auto j : s.lattice.face(face_index).active) span.push_back(s.setup.normals[j]);
  const auto inter = intersect_with_subspace(s.setup, span);
  LinkPolytope link = link_polytope(s.spec.polytope, s.lattice, face_index, &inter.lattice_part);
  auto& gens = link.quasilattice_generators;
  gens.erase(std::remove_if(gens.begin(), gens.end(),
                            [](const Vector& v) {
                              return std::all_of(v.begin(), v.end(),
                                                 [](const FieldScalar& x) { return x.is_zero(); });
                            }),
             gens.end());
  return link;
}

inline ProblemSpec link_problem(const Session& s, const LinkPolytope& link) {
  ProblemSpec child;
  child.basis = s.spec.basis;
  child.polytope = link.polytope;
  child.polytope.basis = child.basis;
  child.quasilattice = link.quasilattice_generators;
  child.flow = s.spec.flow;
  return child;
}

inline json link_data_to_json(const LinkPolytope& link, const BasisPtr& basis) {
  return {{"parent_face", index_set_to_json(link.parent_active)},
          {"parent_face_dim", link.parent_dim},
          {"dim", link.dim()},
          {"span_basis", index_set_to_json(link.span_basis)},
          {"cone_normals", vectors_to_json(link.cone_normals, basis)},
          {"cone_apex", vector_to_json(link.cone_apex, basis)},
          {"s", rationals_to_json(link.s)},
          {"x0", vector_to_json(link.x0, basis)},
          {"annihilator_basis", vectors_to_json(link.annihilator_basis, basis)},
          {"cut_point", vector_to_json(link.cut_point, basis)}};
}

inline json build_report(const Session& s);

inline json link_entry(const Session& s, std::size_t face_index) {
  const LinkPolytope link = session_link(s, face_index);
  const json problem = problem_to_json(link_problem(s, link));
  const Session child = Session::load(problem_from_json(problem));
  const FaceGroups groups = face_groups(s.lattice, face_index, s.setup, link.s);

  json s_on_face = json::array();
  for (auto j : link.parent_active) s_on_face.push_back(rational_to_string(link.s[j]));
  json entry = link_data_to_json(link, s.basis());
  entry["problem"] = problem;
  entry["fiber_group"] = {{"s", s_on_face}, {"description", "exp(s + i s), s = span{(s_j)_{j in I_F}}"}};
  entry["groups"] = {{"N_F", descriptor_to_json(groups.nf, s.basis())},
                     {"N_F0", descriptor_to_json(groups.nf0, s.basis())},
                     {"N_F_dim", groups.nf_dim}};
  entry["report"] = build_report(child);
  return entry;
}

inline json build_report(const Session& s) {
  json links = json::array();
  std::size_t tree_depth = 0;
  for (auto i : s.lattice.singular_faces()) {
    json entry = link_entry(s, i);
    tree_depth = std::max(tree_depth, 1 + entry["report"]["link_tree_depth"].get<std::size_t>());
    links.push_back(std::move(entry));
  }
  json faces = faces_json(s);
  json st = strata_json(s);
  return {{"tool", {{"name", kToolName}, {"version", kToolVersion}}},
          {"dimension", s.lattice.dim()},
          {"facet_count", s.lattice.facet_count()},
          {"f_vector", faces["f_vector"]},
          {"simple", faces["simple"]},
          {"depth", faces["depth"]},
          {"faces", faces["faces"]},
          {"rational", is_rational_choice(s.setup)},
          {"quasilattice", quasilattice_json(s)},
          {"strata", st["strata"]},
          {"stratum_count", st["count"]},
          {"links", links},
          {"link_tree_depth", tree_depth},
          {"provenance",
           {{"basis", basis_to_json(s.basis())},
            {"s_choice", "s_j = 1/(r_F + 1) for j in I_F, 0 otherwise"},
            {"link_cut", "<eta - apex, X_0> = 1, X_0 = sum_j s_j X_j"},
            {"span_basis", "first independent X_j, j in I_F, in index order"},
            {"stratum_coordinates", "first independent rho(X_j), j not in I_F, in index order"},
            {"face_order", "by dimension, then by sorted facet set"},
            {"index_base", 1},
            {"flow", flow_options_to_json(s.spec.flow)}}}};
}

inline json link_json(const Session& s, const IndexSet& active) {
  const std::size_t f = s.face_by_active(active);
  if (s.lattice.face(f).regular)
    throw ConfigError(detail::set_to_string(active) + " is a regular face; links are built for singular faces");
  return link_entry(s, f);
}

inline json check_rational_json(const Session& s) { return quasilattice_json(s); }

// ---------------------------------------------------------------------------
// points

inline json stratum_ref_json(const Session& s, const IndexSet& support) {
  const StratumRef ref = stratum_of(support, s.lattice);
  return {{"kind", ref.maximal ? "maximal" : "singular"},
          {"face", ref.maximal ? json(nullptr) : index_set_to_json(s.lattice.face(ref.face).active)},
          {"dim", ref.dim}};
}

inline json outside_json(const IndexSet& zeros) {
  return {{"admissible", false},
          {"verdict", "outside C^d_Delta"},
          {"point_support", index_set_to_json(zeros)}};
}

/// Orbit type of z: admissibility, closedness, and the stratum of its closed orbit.
inline json classify_json(const Session& s, const TorusPoint& z) {
  if (z.size() != s.setup.facet_count()) throw ConfigError("point has wrong number of coordinates");
  const IndexSet zeros = z.zero_set();
  const Admissibility adm = is_admissible(zeros, s.lattice);
  if (!adm.admissible) return outside_json(zeros);
  const FlowResult r = flow_to_closed_orbit(z, s.moment, s.lattice);
  if (!r.converged) throw NonconvergenceError("flow did not converge", flow_result_to_json(r).dump());
  json witnesses = json::array();
  for (auto w : adm.witnesses) witnesses.push_back(index_set_to_json(s.lattice.face(w).active));
  const bool closed = is_closed_orbit(zeros, s.lattice);
  return {{"admissible", true},
          {"verdict", closed ? "closed orbit" : "nonclosed orbit"},
          {"mode", z.mode == TorusPoint::Mode::exact ? "exact" : "numeric"},
          {"point_support", index_set_to_json(zeros)},
          {"witness_faces", witnesses},
          {"closed_orbit", closed},
          {"flow_agrees", (r.limit_support == zeros) == closed},
          {"limit_support", index_set_to_json(r.limit_support)},
          {"stratum", stratum_ref_json(s, r.limit_support)}};
}

inline json closed_orbit_json(const Session& s, const TorusPoint& z) {
  if (z.size() != s.setup.facet_count()) throw ConfigError("point has wrong number of coordinates");
  const IndexSet zeros = z.zero_set();
  if (!is_admissible(zeros, s.lattice).admissible) return outside_json(zeros);
  const FlowResult r = flow_to_closed_orbit(z, s.moment, s.lattice);
  if (!r.converged) throw NonconvergenceError("flow did not converge", flow_result_to_json(r).dump());
  return {{"admissible", true},
          {"point_support", index_set_to_json(zeros)},
          {"limit_support", index_set_to_json(r.limit_support)},
          {"stratum", stratum_ref_json(s, r.limit_support)},
          {"flow", flow_result_to_json(r)}};
}

inline json equivalent_json(const Session& s, const TorusPoint& a, const TorusPoint& b) {
  for (const auto* p : {&a, &b}) {
    if (p->size() != s.setup.facet_count()) throw ConfigError("point has wrong number of coordinates");
    if (!is_admissible(p->zero_set(), s.lattice).admissible) {
      json out = outside_json(p->zero_set());
      out["point"] = p == &a ? "a" : "b";
      return out;
    }
  }
  const EquivalenceResult r = equivalent(a, b, s.setup, s.lattice, s.moment);
  json out = {{"admissible", true},
              {"verdict", to_string(r.verdict)},
              {"mode", r.mode == TorusPoint::Mode::exact ? "exact" : "numeric"},
              {"reason", r.reason},
              {"limit_support_a", index_set_to_json(r.support_a)},
              {"limit_support_b", index_set_to_json(r.support_b)},
              {"modulus_residual", r.modulus_residual}};
  out["phase_residual"] = r.phase_residual ? json(*r.phase_residual) : json(nullptr);
  return out;
}

}  // namespace toricq
