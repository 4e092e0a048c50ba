#include <gtest/gtest.h>

#include <fstream>

#include "fixtures.hpp"

namespace toricq {
namespace {

json load_file(const std::string& name) {
  std::ifstream in(std::string(TORICQ_SOURCE_DIR) + "/problems/" + name);
  EXPECT_TRUE(in) << name;
  return json::parse(in);
}

Session session(const std::string& name) { return Session::load(problem_from_json(load_file(name))); }

std::size_t singular_count(const json& report) {
  std::size_t n = 0;
  for (const auto& f : report["faces"]) n += f["regular"].get<bool>() ? 0 : 1;
  return n;
}

TEST(Report, Triangle) {
  const json r = build_report(session("triangle.json"));
  EXPECT_EQ(r["f_vector"], json({3, 3, 1}));
  EXPECT_TRUE(r["simple"].get<bool>());
  EXPECT_EQ(r["depth"], 0);
  EXPECT_EQ(r["stratum_count"], 1);
  EXPECT_TRUE(r["rational"].get<bool>());
  EXPECT_TRUE(r["links"].empty());
}

TEST(Report, Pyramid) {
  const json r = build_report(session("square_pyramid.json"));
  EXPECT_EQ(r["f_vector"], json({5, 8, 5, 1}));
  EXPECT_EQ(r["faces"].size(), 19u);  // 18 proper faces and the polytope
  EXPECT_EQ(singular_count(r), 1u);
  EXPECT_EQ(r["depth"], 1);
  EXPECT_EQ(r["stratum_count"], 2);
  ASSERT_EQ(r["links"].size(), 1u);
  const json& link = r["links"][0];
  EXPECT_EQ(link["parent_face"], json({1, 2, 3, 4}));
  EXPECT_EQ(link["report"]["f_vector"], json({4, 4, 1}));
  EXPECT_TRUE(link["report"]["simple"].get<bool>());
  EXPECT_EQ(link["fiber_group"]["s"], json({"1/5", "1/5", "1/5", "1/5"}));
  EXPECT_EQ(link["groups"]["N_F_dim"], 1);
}

TEST(Report, Sqrt2Rectangle) {
  const json r = build_report(session("sqrt2_rectangle.json"));
  EXPECT_FALSE(r["rational"].get<bool>());
  EXPECT_EQ(r["quasilattice"]["z_rank"], 3);
  EXPECT_EQ(r["depth"], 0);
}

void check_tree(const json& report) {
  EXPECT_EQ(report["stratum_count"].get<std::size_t>(), 1 + singular_count(report));
  EXPECT_EQ(report["link_tree_depth"], report["depth"]);
  for (const auto& link : report["links"]) {
    EXPECT_LT(link["report"]["depth"].get<std::size_t>(), report["depth"].get<std::size_t>());
    // re-feeding the emitted problem reproduces the subtree
    const json again = build_report(Session::load(problem_from_json(link["problem"])));
    EXPECT_EQ(again.dump(), link["report"].dump());
    check_tree(link["report"]);
  }
}

TEST(Report, InvariantsAndRoundTrip) {
  for (const char* name : {"triangle.json", "square.json", "square_pyramid.json", "cone_over_pyramid.json",
                           "prism_over_pyramid.json", "sqrt2_rectangle.json", "sqrt2_offset_rectangle.json",
                           "triangle_sqrt2_quasilattice.json"}) {
    SCOPED_TRACE(name);
    const json r = build_report(session(name));
    check_tree(r);
  }
}

TEST(Report, ConeOverPyramidRecursion) {
  const json r = build_report(session("cone_over_pyramid.json"));
  EXPECT_EQ(r["depth"], 2);
  EXPECT_EQ(r["link_tree_depth"], 2);
  bool found_pyramid = false;
  for (const auto& link : r["links"])
    if (link["parent_face"] == json({1, 2, 3, 4, 5})) {
      found_pyramid = true;
      EXPECT_EQ(link["report"]["f_vector"], json({5, 8, 5, 1}));
      EXPECT_EQ(link["report"]["depth"], 1);
    }
  EXPECT_TRUE(found_pyramid);
}

TEST(Report, Deterministic) {
  for (const char* name : {"cone_over_pyramid.json", "sqrt2_rectangle.json"}) {
    const std::string a = build_report(session(name)).dump(2);
    const std::string b = build_report(session(name)).dump(2);
    EXPECT_EQ(a, b);
    // canonical re-serialization of the input gives the same report
    const json canonical = problem_to_json(problem_from_json(load_file(name)));
    EXPECT_EQ(build_report(Session::load(problem_from_json(canonical))).dump(2), a);
  }
}

TEST(Report, ScalarEncoding) {
  const auto b = testing::sqrt2_basis();
  const FieldScalar s = testing::sqrt2(-3, 1) * mpq_class(1, 2);
  const json j = scalar_to_json(s, b);
  EXPECT_EQ(j, json({{"coeffs", {"-3/2", "1/2"}}}));
  EXPECT_EQ(scalar_from_json(j, b), s);
  EXPECT_EQ(scalar_from_json(json("2/4"), b), testing::q(1, 2));
  EXPECT_EQ(scalar_from_json(json(7), nullptr), testing::q(7));
  EXPECT_THROW(scalar_from_json(json({{"coeffs", {"1"}}}), b), ConfigError);
  EXPECT_THROW(scalar_from_json(json({{"coeffs", {1.5}}}), b), ConfigError);
}

TEST(Report, ProblemValidation) {
  json p = load_file("triangle.json");
  p["facets"][0]["normal"] = json::array({{{"coeffs", {"1"}}}});
  EXPECT_THROW(problem_from_json(p), ConfigError);
  json unbounded = load_file("triangle.json");
  unbounded["facets"].erase(2);
  EXPECT_THROW(Session::load(problem_from_json(unbounded)), Error);
  json short_digits = load_file("sqrt2_rectangle.json");
  short_digits["basis"]["approximations"][1] = "1.41421356";
  EXPECT_THROW(problem_from_json(short_digits), ConfigError);
}

TEST(Report, PointVerdicts) {
  const Session tri = session("triangle.json");
  const json c = classify_json(tri, point_from_json(json::parse("[1,1,1]"), TorusPoint::Mode::exact, nullptr));
  EXPECT_EQ(c["verdict"], "closed orbit");
  EXPECT_EQ(c["stratum"]["kind"], "maximal");
  EXPECT_EQ(c["point_support"], json::array());

  const json outside = classify_json(tri, point_from_json(json::parse("[0,0,0]"), TorusPoint::Mode::exact, nullptr));
  EXPECT_FALSE(outside["admissible"].get<bool>());
  EXPECT_EQ(outside["verdict"], "outside C^d_Delta");

  const Session pyr = session("square_pyramid.json");
  const json co = closed_orbit_json(
      pyr, point_from_json(json::parse("[[0,0],[0,0],[0,0],[1,0],[1,0]]"), TorusPoint::Mode::numeric, nullptr));
  EXPECT_EQ(co["limit_support"], json({1, 2, 3, 4}));
  EXPECT_EQ(co["stratum"]["kind"], "singular");
  EXPECT_EQ(co["stratum"]["dim"], 0);
  EXPECT_FALSE(co["flow"]["collapses"].empty());

  const auto z = point_from_json(json::parse(R"([1, {"modulus": "2", "angle": "1/3"}, 1])"), TorusPoint::Mode::exact,
                                 nullptr);
  const json e = equivalent_json(tri, z, z);
  EXPECT_EQ(e["verdict"], "equivalent");
  EXPECT_EQ(e["mode"], "exact");
}

}  // namespace
}  // namespace toricq
