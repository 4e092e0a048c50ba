#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"

namespace toricq {
namespace {

using namespace testing;

MomentSetup moment(const Problem& pr) { return MomentSetup::from(pr.setup, pr.polytope.offsets); }

std::vector<IndexSet> all_supports(std::size_t d) {
  std::vector<IndexSet> out;
  for (std::uint64_t m = 0; m < (1ull << d); ++m) out.push_back(detail::mask_to_set(m));
  return out;
}

TEST(Quotient, AdmissibilityExamples) {
  const auto tri = enumerate_faces(triangle());
  const auto pyr = enumerate_faces(square_pyramid());
  const auto empty = is_admissible({}, tri);
  EXPECT_TRUE(empty.admissible);
  ASSERT_EQ(empty.witnesses.size(), 1u);
  EXPECT_TRUE(tri.face(empty.witnesses[0]).active.empty());
  EXPECT_FALSE(is_admissible({0, 1, 2}, tri).admissible);
  const auto a = is_admissible({0, 1, 2}, pyr);
  EXPECT_TRUE(a.admissible);
  ASSERT_EQ(a.witnesses.size(), 1u);
  EXPECT_EQ(pyr.face(a.witnesses[0]).active, (IndexSet{0, 1, 2, 3}));
}

TEST(Quotient, ClosedOrbitExamples) {
  const auto tri = enumerate_faces(triangle());
  const auto pyr = enumerate_faces(square_pyramid());
  EXPECT_TRUE(is_closed_orbit({2}, tri));
  EXPECT_TRUE(is_closed_orbit({}, tri));
  EXPECT_TRUE(is_closed_orbit({}, pyr));
  EXPECT_FALSE(is_closed_orbit({0, 1, 2}, pyr));
  EXPECT_TRUE(is_closed_orbit({3}, pyr));  // facet 4 is a face
  EXPECT_THROW(is_closed_orbit({0, 1, 2}, tri), DomainError);
}

TEST(Quotient, ClosedImpliesAdmissibleAndSimplicityDichotomy) {
  for (const auto& p : {triangle(), square(), square_pyramid(), cone_over_pyramid(), prism_over_pyramid()}) {
    const auto l = enumerate_faces(p);
    bool all_admissible_closed = true;
    for (const auto& j : all_supports(p.facet_count())) {
      if (!is_admissible(j, l).admissible) continue;
      if (!is_closed_orbit(j, l)) all_admissible_closed = false;
    }
    EXPECT_EQ(all_admissible_closed, l.is_simple());
  }
}

TEST(Quotient, StratumOfExamples) {
  const auto pyr = enumerate_faces(square_pyramid());
  const auto apex = stratum_of({0, 1, 2, 3}, pyr);
  EXPECT_FALSE(apex.maximal);
  EXPECT_EQ(apex.dim, 0u);
  EXPECT_TRUE(stratum_of({4}, pyr).maximal);
  EXPECT_THROW(stratum_of({0, 1, 2}, pyr), DomainError);
  const auto tri = enumerate_faces(triangle());
  for (const auto& f : tri.faces()) EXPECT_TRUE(stratum_of(f.active, tri).maximal);
}

TEST(Quotient, StrataCountsAndDims) {
  for (const auto& p : {triangle(), square(), square_pyramid(), cone_over_pyramid(), prism_over_pyramid(),
                        sqrt2_rectangle()}) {
    const auto pr = make_problem("", p);
    const auto st = strata(pr.lattice, pr.setup);
    EXPECT_EQ(st.size(), 1 + pr.lattice.singular_faces().size());
    EXPECT_TRUE(st[0].maximal);
    EXPECT_EQ(st[0].dim, p.dim);
    std::set<IndexSet> seen;
    for (const auto& s : st) {
      if (!s.maximal) {
        EXPECT_EQ(s.dim, pr.lattice.face(*s.face).dim);
      }
      EXPECT_EQ(s.model.p, s.dim);
      for (const auto& j : s.member_supports) EXPECT_TRUE(seen.insert(j).second);
    }
    // the strata exhaust the closed-orbit supports
    std::size_t closed = 0;
    for (const auto& j : all_supports(p.facet_count()))
      if (is_admissible(j, pr.lattice).admissible && is_closed_orbit(j, pr.lattice)) ++closed;
    EXPECT_EQ(seen.size(), closed);
  }
}

TEST(Quotient, PyramidApexModelIsAPoint) {
  const auto pr = make_problem("pyramid", square_pyramid());
  const auto m = stratum_model(pr.lattice, pr.lattice.singular_faces()[0], pr.setup);
  EXPECT_EQ(m.p, 0u);
  EXPECT_TRUE(m.gamma_generators.empty());
  EXPECT_TRUE(m.finite);
}

TEST(Quotient, PrismEdgeModel) {
  const auto pr = make_problem("prism", prism_over_pyramid());
  const auto edge = pr.lattice.find({0, 1, 2, 3});
  ASSERT_TRUE(edge);
  const auto m = stratum_model(pr.lattice, *edge, pr.setup);
  EXPECT_EQ(m.p, 1u);
  EXPECT_TRUE(m.acts_freely);
  EXPECT_TRUE(m.finite);
  EXPECT_EQ(m.order, mpz_class(1));

  // adding (0,0,0,sqrt2) to Q makes Gamma dense in S^1, still free
  std::vector<Vector> gens = pr.polytope.normals;
  gens.push_back(Vector{q(0), q(0), q(0), sqrt2()});
  auto p = prism_over_pyramid();
  p.basis = sqrt2_basis();
  const auto pn = make_problem("prism-sqrt2", p, gens);
  const auto mn = stratum_model(pn.lattice, *pn.lattice.find({0, 1, 2, 3}), pn.setup);
  EXPECT_EQ(mn.p, 1u);
  EXPECT_FALSE(mn.finite);
  EXPECT_EQ(mn.gamma_rank, 1u);
  EXPECT_TRUE(mn.acts_freely);
  EXPECT_FALSE(mn.order);
}

// For a rational probe the order of Gamma equals the index of the Z-span of
// the normals in Q, computed here as a ratio of 2x2 determinants.
TEST(Quotient, FiniteOrderIsLatticeIndex) {
  for (long k : {2L, 3L, 5L}) {
    const auto p = triangle();
    const std::vector<Vector> gens{ivec({1, 0}), Vector{q(0), q(1, k)}};
    const auto pr = make_problem("probe", p, gens);
    const mpq_class det_q = mpq_class(1) * mpq_class(1, k);  // |det((1,0),(0,1/k))|
    const mpq_class det_x = 1;                               // normals span Z^2
    const mpq_class index = det_x / det_q;
    const auto m = stratum_model(pr.lattice, *pr.lattice.find({0}), pr.setup);
    ASSERT_TRUE(m.order);
    EXPECT_EQ(mpq_class(*m.order), index);
    EXPECT_TRUE(m.finite);
    EXPECT_TRUE(m.acts_freely);
  }
}

TEST(Quotient, FaceGroupsOfPyramidApex) {
  const auto pr = make_problem("pyramid", square_pyramid());
  const std::size_t apex = pr.lattice.singular_faces()[0];
  const auto link = link_polytope(pr.polytope, pr.lattice, apex);
  const auto g = face_groups(pr.lattice, apex, pr.setup, link.s);
  EXPECT_EQ(g.nf_dim, 1u);  // r_F - n + p = 4 - 3 + 0
  EXPECT_EQ(g.nf0.subspace_part.size(), 2u);
  // the kernel direction (1,1,-1,-1) of X_1..X_4 lies in N^F's Lie algebra
  EXPECT_TRUE(membership(ivec({1, 1, -1, -1}), {4, {}, g.nf.subspace_part}));
  EXPECT_TRUE(membership(ivec({1, 1, 1, 1}), {4, {}, g.nf0.subspace_part}));
  EXPECT_FALSE(membership(ivec({1, 1, 1, 1}), {4, {}, g.nf.subspace_part}));
}

TorusPoint exact_point(std::vector<long> modulus, Vector angle) {
  std::vector<mpq_class> m;
  for (long x : modulus) m.emplace_back(x);
  return TorusPoint::exact(std::move(m), std::move(angle));
}

TEST(Quotient, EquivalenceExamples) {
  auto p = triangle();
  p.basis = sqrt2_basis();
  const auto pr = make_problem("triangle", p);
  const auto s = moment(pr);
  const auto z = exact_point({1, 1, 1}, {q(0), q(0), q(0)});
  EXPECT_EQ(equivalent(z, z, pr.setup, pr.lattice, s).verdict, Verdict::equivalent);

  // w = exp(tau (1,1,1)) z lies in the A-orbit
  const auto zn = TorusPoint::numeric({{1, 0}, {1, 0}, {1, 0}});
  const double t = std::exp(0.7);
  const auto wn = TorusPoint::numeric({{t, 0}, {t, 0}, {t, 0}});
  const auto numeric = equivalent(zn, wn, pr.setup, pr.lattice, s);
  EXPECT_EQ(numeric.verdict, Verdict::undecided);  // phases agree; numeric mode never certifies
  const auto ze = exact_point({2, 2, 2}, {q(0), q(0), q(0)});
  EXPECT_EQ(equivalent(z, ze, pr.setup, pr.lattice, s).verdict, Verdict::equivalent);

  const auto w = exact_point({1, 1, 1}, {q(0), q(0), sqrt2()});
  const auto r = equivalent(z, w, pr.setup, pr.lattice, s);
  EXPECT_EQ(r.verdict, Verdict::not_equivalent);
  EXPECT_EQ(r.mode, TorusPoint::Mode::exact);
}

TEST(Quotient, BranchIndependence) {
  auto p = triangle();
  p.basis = sqrt2_basis();
  const auto pr = make_problem("triangle", p);
  const auto s = moment(pr);
  const auto z = exact_point({1, 2, 1}, {q(1, 3), q(0), q(1, 5)});
  for (long shift : {-2L, 1L, 7L}) {
    const auto w = exact_point({1, 2, 1}, {q(1, 3) + q(shift), q(shift), q(1, 5) - q(shift)});
    EXPECT_EQ(equivalent(z, w, pr.setup, pr.lattice, s).verdict, Verdict::equivalent);
    const auto v = exact_point({1, 2, 1}, {q(1, 3) + q(shift), sqrt2(), q(1, 5)});
    EXPECT_EQ(equivalent(z, v, pr.setup, pr.lattice, s).verdict, Verdict::not_equivalent);
  }
}

// exp(2 pi i u) with pi(u) in Q, for the nonrational triangle quasilattice
// generated by e_1, e_2 and (sqrt2, sqrt2).
TEST(Quotient, TranslatesByQuasilatticePreimagesAreEquivalent) {
  auto p = triangle();
  p.basis = sqrt2_basis();
  const std::vector<Vector> gens{ivec({1, 0}), ivec({0, 1}), Vector{sqrt2(), sqrt2()}};
  const auto pr = make_problem("triangle-q", p, gens);
  const auto s = moment(pr);
  const auto z = exact_point({1, 3, 2}, {q(1, 7), q(0), q(2, 5)});
  // u = (0, 0, -sqrt2) gives pi(u) = (sqrt2, sqrt2) in Q
  const auto w = exact_point({1, 3, 2}, {q(1, 7), q(0), q(2, 5) - sqrt2()});
  EXPECT_EQ(equivalent(z, w, pr.setup, pr.lattice, s).verdict, Verdict::equivalent);
  // u = (0, 0, -sqrt2/2) gives (sqrt2/2, sqrt2/2), not in Q
  const auto v = exact_point({1, 3, 2}, {q(1, 7), q(0), q(2, 5) - sqrt2() * mpq_class(1, 2)});
  EXPECT_EQ(equivalent(z, v, pr.setup, pr.lattice, s).verdict, Verdict::not_equivalent);
}

TEST(Quotient, ExactEquivalenceIsTransitiveOnSharedSupport) {
  auto p = square_pyramid();
  p.basis = sqrt2_basis();
  const auto pr = make_problem("pyramid", p);
  const auto s = moment(pr);
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<long> num(0, 11);
  const auto draw = [&] {
    Vector angle;
    for (int j = 0; j < 5; ++j) angle.push_back(num(rng) % 3 == 0 ? q(num(rng), 4) : q(0));
    return exact_point({1, 1, 2, 1, 1}, angle);
  };
  int checked = 0;
  for (int i = 0; i < 12; ++i) {
    const auto a = draw(), b = draw(), c = draw();
    const auto ab = equivalent(a, b, pr.setup, pr.lattice, s).verdict;
    const auto bc = equivalent(b, c, pr.setup, pr.lattice, s).verdict;
    const auto ac = equivalent(a, c, pr.setup, pr.lattice, s).verdict;
    EXPECT_EQ(ab, equivalent(b, a, pr.setup, pr.lattice, s).verdict);
    if (ab == Verdict::equivalent && bc == Verdict::equivalent) {
      EXPECT_EQ(ac, Verdict::equivalent);
      ++checked;
    }
  }
  EXPECT_GT(checked, 0);
}

TEST(Quotient, NonclosedPointsMeetTheirLimit) {
  const auto pr = make_problem("pyramid", square_pyramid());
  const auto s = moment(pr);
  // (0,0,0,1,1) has zero set {1,2,3}; its closure meets the apex orbit
  const auto z = TorusPoint::numeric({{0, 0}, {0, 0}, {0, 0}, {1, 0}, {1, 0}});
  const auto apex = TorusPoint::numeric({{0, 0}, {0, 0}, {0, 0}, {0, 0}, {1, 0}});
  const auto r = equivalent(z, apex, pr.setup, pr.lattice, s);
  EXPECT_EQ(r.support_a, (IndexSet{0, 1, 2, 3}));
  EXPECT_EQ(r.verdict, Verdict::equivalent);  // p = 0: N_C is transitive on the apex orbit
}

TEST(Quotient, RationalCrossCheckByIntegerAlgebra) {
  // square: Q = Z^2, closed supports; equivalence of phases reduces to
  // theta . X in Z^2 + span X_J, which for J = {} means the integer lattice
  const auto pr = make_problem("square", square());
  const auto s = moment(pr);
  const auto z = exact_point({1, 1, 1, 1}, {q(0), q(0), q(0), q(0)});
  for (long a = -2; a <= 2; ++a)
    for (long b = 1; b <= 4; ++b) {
      const auto w = exact_point({1, 1, 1, 1}, {q(a, b), q(0), q(0), q(0)});
      mpq_class theta(a, b);
      theta.canonicalize();
      const bool integral = theta.get_den() == 1;
      EXPECT_EQ(equivalent(z, w, pr.setup, pr.lattice, s).verdict,
                integral ? Verdict::equivalent : Verdict::not_equivalent);
      // same phase split across opposite facets: theta X1 + theta X3 = 0
      const auto v = exact_point({1, 1, 1, 1}, {q(a, b), q(0), q(a, b), q(0)});
      EXPECT_EQ(equivalent(z, v, pr.setup, pr.lattice, s).verdict, Verdict::equivalent);
    }
}

}  // namespace
}  // namespace toricq
