#pragma once

// JSON encoding of scalars, polytopes, problem documents and points.
// Scalars are {"coeffs": ["p/q", ...]} against the document's basis header;
// index sets are 1-based sorted arrays.

#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "toricq/error.hpp"
#include "toricq/momentflow.hpp"
#include "toricq/polytope.hpp"
#include "toricq/quasilattice.hpp"
#include "toricq/quotient.hpp"
#include "toricq/scalar.hpp"

namespace toricq {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// scalars

inline json scalar_to_json(const FieldScalar& s, const BasisPtr& basis) {
  json coeffs = json::array();
  for (const auto& c : s.coords_in(basis)) coeffs.push_back(rational_to_string(c));
  return {{"coeffs", coeffs}};
}

inline json vector_to_json(const Vector& v, const BasisPtr& basis) {
  json out = json::array();
  for (const auto& s : v) out.push_back(scalar_to_json(s, basis));
  return out;
}

inline json vectors_to_json(const std::vector<Vector>& vs, const BasisPtr& basis) {
  json out = json::array();
  for (const auto& v : vs) out.push_back(vector_to_json(v, basis));
  return out;
}

inline json rationals_to_json(const std::vector<mpq_class>& qs) {
  json out = json::array();
  for (const auto& q : qs) out.push_back(rational_to_string(q));
  return out;
}

/// Accepts {"coeffs": [...]}, a rational string, or an integer.
inline FieldScalar scalar_from_json(const json& j, const BasisPtr& basis) {
  if (j.is_number_integer()) return FieldScalar(mpq_class(j.get<long>()));
  if (j.is_string()) return FieldScalar(parse_rational(j.get<std::string>()));
  if (!j.is_object() || !j.contains("coeffs") || !j.at("coeffs").is_array())
    throw ConfigError("scalar must be {\"coeffs\": [...]}, a rational string, or an integer");
  std::vector<mpq_class> coords;
  for (const auto& c : j.at("coeffs")) {
    if (c.is_number_integer()) coords.emplace_back(c.get<long>());
    else if (c.is_string()) coords.push_back(parse_rational(c.get<std::string>()));
    else throw ConfigError("scalar coefficient must be a rational string");
  }
  const std::size_t k = basis ? basis->size() : 1;
  if (coords.size() != k)
    throw ConfigError("scalar has " + std::to_string(coords.size()) + " coefficients, basis has " +
                      std::to_string(k));
  if (!basis) return FieldScalar(coords[0]);
  return FieldScalar(basis, std::move(coords));
}

inline Vector vector_from_json(const json& j, const BasisPtr& basis) {
  if (!j.is_array()) throw ConfigError("expected an array of scalars");
  Vector v;
  for (const auto& x : j) v.push_back(scalar_from_json(x, basis));
  return v;
}

inline json index_set_to_json(const IndexSet& s) {
  json out = json::array();
  for (auto i : s) out.push_back(i + 1);
  return out;
}

inline IndexSet index_set_from_json(const json& j, std::size_t bound) {
  if (!j.is_array()) throw ConfigError("index set must be an array");
  IndexSet s;
  for (const auto& x : j) {
    if (!x.is_number_integer()) throw ConfigError("index must be an integer");
    const long i = x.get<long>();
    if (i < 1 || static_cast<std::size_t>(i) > bound)
      throw ConfigError("index " + std::to_string(i) + " out of range 1.." + std::to_string(bound));
    s.push_back(static_cast<std::size_t>(i - 1));
  }
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

/// "1,2,3" or "{1,2,3}" or "[1,2,3]".
inline IndexSet parse_index_list(std::string text, std::size_t bound) {
  for (char& c : text)
    if (c == '{' || c == '}' || c == '[' || c == ']') c = ' ';
  json arr = json::array();
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto next = text.find(',', pos);
    const std::string tok = text.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
    if (tok.find_first_not_of(' ') != std::string::npos) {
      try {
        arr.push_back(std::stol(tok));
      } catch (...) {
        throw ConfigError("malformed index list '" + text + "'");
      }
    }
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return index_set_from_json(arr, bound);
}

// ---------------------------------------------------------------------------
// basis

inline json basis_to_json(const BasisPtr& basis) {
  const BasisPtr b = basis ? basis : ScalarBasis::rational();
  json out = {{"names", b->names()}, {"approximations", b->approximation_strings()}};
  json products = json::array();
  for (const auto& p : b->products())
    products.push_back({{"i", p.i}, {"j", p.j}, {"value", {{"coeffs", rationals_to_json(p.value)}}}});
  if (!products.empty()) out["products"] = products;
  return out;
}

inline BasisPtr basis_from_json(const json& j) {
  if (!j.is_object() || !j.contains("names") || !j.contains("approximations"))
    throw ConfigError("basis needs 'names' and 'approximations'");
  const auto names = j.at("names").get<std::vector<std::string>>();
  const auto approx = j.at("approximations").get<std::vector<std::string>>();
  std::vector<ScalarBasis::Product> products;
  if (j.contains("products")) {
    for (const auto& p : j.at("products")) {
      ScalarBasis::Product prod;
      prod.i = p.at("i").get<std::size_t>();
      prod.j = p.at("j").get<std::size_t>();
      for (const auto& c : p.at("value").at("coeffs")) prod.value.push_back(parse_rational(c.get<std::string>()));
      products.push_back(std::move(prod));
    }
  }
  if (names.size() == 1 && products.empty()) {
    (void)ScalarBasis(names, approx);  // validates the constant 1
    return nullptr;                     // plain rationals
  }
  return std::make_shared<const ScalarBasis>(names, approx, std::move(products));
}

// ---------------------------------------------------------------------------
// problem documents

struct ProblemSpec {
  BasisPtr basis;
  HPolytope polytope;
  std::optional<std::vector<Vector>> quasilattice;
  FlowOptions flow;
};

inline json flow_options_to_json(const FlowOptions& o) {
  return {{"tolerance", o.tolerance},
          {"max_iterations", o.max_iterations},
          {"collapse_threshold", o.collapse_threshold},
          {"collapse_window", o.collapse_window},
          {"step_tolerance", o.step_tolerance}};
}

inline FlowOptions flow_options_from_json(const json& j) {
  FlowOptions o;
  if (j.contains("tolerance")) o.tolerance = j.at("tolerance").get<double>();
  if (j.contains("max_iterations")) o.max_iterations = j.at("max_iterations").get<std::size_t>();
  if (j.contains("collapse_threshold")) o.collapse_threshold = j.at("collapse_threshold").get<double>();
  if (j.contains("collapse_window")) o.collapse_window = j.at("collapse_window").get<std::size_t>();
  if (j.contains("step_tolerance")) o.step_tolerance = j.at("step_tolerance").get<double>();
  if (!(o.tolerance > 0) || !(o.step_tolerance > 0) || !(o.collapse_threshold > 0))
    throw ConfigError("flow tolerances must be positive");
  return o;
}

inline json problem_to_json(const ProblemSpec& p) {
  json facets = json::array();
  for (std::size_t j = 0; j < p.polytope.facet_count(); ++j)
    facets.push_back({{"normal", vector_to_json(p.polytope.normals[j], p.basis)},
                      {"offset", scalar_to_json(p.polytope.offsets[j], p.basis)}});
  json out = {{"basis", basis_to_json(p.basis)},
              {"dimension", p.polytope.dim},
              {"facets", facets},
              {"flow", flow_options_to_json(p.flow)}};
  if (p.quasilattice) out["quasilattice"] = vectors_to_json(*p.quasilattice, p.basis);
  return out;
}

inline ProblemSpec problem_from_json(const json& j) {
  try {
    if (!j.is_object()) throw ConfigError("problem document must be a JSON object");
    ProblemSpec p;
    p.basis = j.contains("basis") ? basis_from_json(j.at("basis")) : nullptr;
    p.polytope.basis = p.basis;
    if (!j.contains("dimension") || !j.at("dimension").is_number_unsigned())
      throw ConfigError("'dimension' must be a positive integer");
    p.polytope.dim = j.at("dimension").get<std::size_t>();
    if (!j.contains("facets") || !j.at("facets").is_array())
      throw ConfigError("'facets' must be an array");
    for (const auto& f : j.at("facets")) {
      Vector normal = vector_from_json(f.at("normal"), p.basis);
      if (normal.size() != p.polytope.dim) throw ConfigError("facet normal has wrong length");
      p.polytope.normals.push_back(std::move(normal));
      p.polytope.offsets.push_back(scalar_from_json(f.at("offset"), p.basis));
    }
    if (j.contains("quasilattice")) {
      std::vector<Vector> gens;
      for (const auto& g : j.at("quasilattice")) gens.push_back(vector_from_json(g, p.basis));
      p.quasilattice = std::move(gens);
    }
    if (j.contains("flow")) p.flow = flow_options_from_json(j.at("flow"));
    return p;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed problem document: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// points

/// Numeric points: [[re, im], ...] or [x, ...].  Exact points:
/// [{"modulus": "1", "angle": scalar}, ...] with angle in units of 2 pi.
inline TorusPoint point_from_json(const json& j, TorusPoint::Mode mode, const BasisPtr& basis) {
  try {
    if (!j.is_array()) throw ConfigError("point must be an array of coordinates");
    if (mode == TorusPoint::Mode::numeric) {
      std::vector<std::complex<double>> v;
      for (const auto& c : j) {
        if (c.is_number()) v.emplace_back(c.get<double>(), 0.0);
        else if (c.is_array() && c.size() == 2) v.emplace_back(c[0].get<double>(), c[1].get<double>());
        else throw ConfigError("numeric coordinate must be a number or [re, im]");
      }
      return TorusPoint::numeric(std::move(v));
    }
    std::vector<mpq_class> modulus;
    Vector angle;
    for (const auto& c : j) {
      if (c.is_number_integer() || c.is_string()) {
        modulus.push_back(c.is_string() ? parse_rational(c.get<std::string>()) : mpq_class(c.get<long>()));
        angle.push_back(FieldScalar(0));
        continue;
      }
      if (!c.is_object() || !c.contains("modulus"))
        throw ConfigError("exact coordinate must be {\"modulus\": ..., \"angle\": ...}");
      const auto& m = c.at("modulus");
      modulus.push_back(m.is_string() ? parse_rational(m.get<std::string>()) : mpq_class(m.get<long>()));
      angle.push_back(c.contains("angle") ? scalar_from_json(c.at("angle"), basis) : FieldScalar(0));
    }
    return TorusPoint::exact(std::move(modulus), std::move(angle));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed point: ") + e.what());
  }
}

inline json complex_vector_to_json(const std::vector<std::complex<double>>& z) {
  json out = json::array();
  for (const auto& c : z) out.push_back({c.real(), c.imag()});
  return out;
}

inline json flow_result_to_json(const FlowResult& r) {
  json collapses = json::array();
  for (const auto& c : r.collapses)
    collapses.push_back({{"coordinate", c.coordinate + 1}, {"iteration", c.iteration}, {"amplitude", c.amplitude}});
  return {{"converged", r.converged},
          {"iterations", r.iterations},
          {"residual", r.residual},
          {"limit_support", index_set_to_json(r.limit_support)},
          {"minimizer", r.minimizer},
          {"representative", complex_vector_to_json(r.representative)},
          {"collapses", collapses}};
}

}  // namespace toricq
