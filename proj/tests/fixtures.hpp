#pragma once

// Test polytopes shared by the unit and acceptance suites.

#include <initializer_list>
#include <memory>
#include <string>
#include <vector>

#include "toricq/toricq.hpp"

namespace toricq::testing {

inline const char* kSqrt2Digits =
    "1.414213562373095048801688724209698078569671875376948073176679737990732";

/// {1, sqrt2} with sqrt2 * sqrt2 = 2.
inline BasisPtr sqrt2_basis() {
  static const BasisPtr b = std::make_shared<const ScalarBasis>(
      std::vector<std::string>{"1", "sqrt2"}, std::vector<std::string>{"1", kSqrt2Digits},
      std::vector<ScalarBasis::Product>{{1, 1, {mpq_class(2), mpq_class(0)}}});
  return b;
}

inline FieldScalar q(long num, long den = 1) { return FieldScalar(mpq_class(num, den)); }

inline FieldScalar sqrt2(long rational = 0, long irrational = 1) {
  return FieldScalar(sqrt2_basis(), {mpq_class(rational), mpq_class(irrational)});
}

inline Vector ivec(std::initializer_list<long> xs) {
  Vector v;
  for (long x : xs) v.push_back(q(x));
  return v;
}

inline HPolytope integer_polytope(std::size_t dim, std::vector<std::vector<long>> normals,
                                  std::vector<long> offsets) {
  HPolytope p;
  p.dim = dim;
  for (const auto& n : normals) {
    Vector v;
    for (long x : n) v.push_back(q(x));
    p.normals.push_back(std::move(v));
  }
  for (long l : offsets) p.offsets.push_back(q(l));
  return p;
}

inline HPolytope triangle() {
  return integer_polytope(2, {{1, 0}, {0, 1}, {-1, -1}}, {0, 0, -1});
}

inline HPolytope square() {
  return integer_polytope(2, {{1, 0}, {0, 1}, {-1, 0}, {0, -1}}, {0, 0, -1, -1});
}

/// Square pyramid with apex (0,0,1); facets 1-4 are lateral, 5 is the base.
inline HPolytope square_pyramid() {
  return integer_polytope(3, {{-1, 0, -1}, {1, 0, -1}, {0, -1, -1}, {0, 1, -1}, {0, 0, 1}},
                          {-1, -1, -1, -1, 0});
}

/// Pyramid over the square pyramid with apex (0,0,1/2,1); facets 1-5 lie over
/// the pyramid's facets, 6 is the base w >= 0.
inline HPolytope cone_over_pyramid() {
  return integer_polytope(4,
                          {{-2, 0, -2, -1},
                           {2, 0, -2, -1},
                           {0, -2, -2, -1},
                           {0, 2, -2, -1},
                           {0, 0, 2, -1},
                           {0, 0, 0, 1}},
                          {-2, -2, -2, -2, 0, 0});
}

/// Square pyramid x [0,1]; facets 6,7 are the interval ends.
inline HPolytope prism_over_pyramid() {
  return integer_polytope(4,
                          {{-1, 0, -1, 0},
                           {1, 0, -1, 0},
                           {0, -1, -1, 0},
                           {0, 1, -1, 0},
                           {0, 0, 1, 0},
                           {0, 0, 0, 1},
                           {0, 0, 0, -1}},
                          {-1, -1, -1, -1, 0, 0, -1});
}

/// Unit square whose top edge is written with the normal (0,-sqrt2).
inline HPolytope sqrt2_rectangle() {
  HPolytope p = integer_polytope(2, {{1, 0}, {0, 1}, {-1, 0}, {0, 0}}, {0, 0, -1, 0});
  p.basis = sqrt2_basis();
  p.normals[3] = {q(0), sqrt2(0, -1)};
  p.offsets[3] = sqrt2(0, -1);
  return p;
}

/// Rectangle [0,1] x [0,sqrt2] with rational normals and offset lambda_4 = -sqrt2.
inline HPolytope sqrt2_offset_rectangle() {
  HPolytope p = square();
  p.basis = sqrt2_basis();
  p.offsets[3] = sqrt2(0, -1);
  return p;
}

struct Problem {
  std::string name;
  HPolytope polytope;
  FaceLattice lattice;
  QuasilatticeSetup setup;
};

inline Problem make_problem(std::string name, HPolytope p,
                            std::optional<std::vector<Vector>> generators = std::nullopt) {
  Problem pr;
  pr.name = std::move(name);
  pr.lattice = enumerate_faces(p);
  pr.setup = build_setup(p.dim, p.normals, generators, p.basis);
  pr.polytope = std::move(p);
  return pr;
}

}  // namespace toricq::testing
