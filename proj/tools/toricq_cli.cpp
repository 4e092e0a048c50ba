// toricq: JSON-in/JSON-out front end for the stratification library.
//
// Exit codes: 0 success, 2 invalid input, 3 nonconvergence, 4 undecided
// (numeric equivalence), 1 internal error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "toricq/toricq.hpp"

namespace {

using toricq::json;

constexpr int kExitInvalid = 2;
constexpr int kExitNonconvergence = 3;
constexpr int kExitUndecided = 4;

std::string read_text(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw toricq::ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw toricq::ConfigError("invalid JSON in " + what + ": " + e.what());
  }
}

/// Inline JSON (starting with '[' or '{') or a file containing either a bare
/// coordinate array or {"point": [...]}.
json point_document(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t\n");
  const bool inline_json = first != std::string::npos && (arg[first] == '[' || arg[first] == '{');
  json j = parse_json(inline_json ? arg : read_text(arg), "point");
  if (j.is_object() && j.contains("point")) return j.at("point");
  return j;
}

void emit(const json& doc, const std::string& output) {
  const std::string text = doc.dump(2) + "\n";
  if (output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(output);
  if (!out) throw toricq::ConfigError("cannot write '" + output + "'");
  out << text;
}

void emit_error(const std::string& code, const std::string& message, const std::string& detail = {}) {
  json err = {{"code", code}, {"message", message}};
  if (!detail.empty()) err["last_iterate"] = json::parse(detail, nullptr, false);
  std::cerr << json{{"error", err}}.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stratification of nonrational toric complex quotients"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string problem_path;
  std::optional<double> tolerance;
  std::optional<std::size_t> max_iter;
  std::string mode = "exact";
  std::string output;
  std::string face;
  std::string point, point_a, point_b;

  app.add_option("--tolerance", tolerance, "flow tolerance on |moment map|")->check(CLI::PositiveNumber);
  app.add_option("--max-iter", max_iter, "flow iteration cap per support level")->check(CLI::PositiveNumber);
  app.add_option("--mode", mode, "point coordinates: exact or numeric")
      ->check(CLI::IsMember({"exact", "numeric"}));
  app.add_option("--output", output, "write JSON here instead of stdout");

  const auto with_problem = [&](CLI::App* sub) {
    sub->add_option("problem", problem_path, "problem JSON file ('-' for stdin)")->required();
    return sub;
  };
  auto* report = with_problem(app.add_subcommand("report", "full stratification report"));
  auto* faces = with_problem(app.add_subcommand("faces", "face lattice"));
  auto* strata = with_problem(app.add_subcommand("strata", "strata and their models"));
  auto* link = with_problem(app.add_subcommand("link", "link polytope of a singular face"));
  link->add_option("--face", face, "sorted facet set, e.g. 1,2,3,4")->required();
  auto* classify = with_problem(app.add_subcommand("classify", "orbit type of a point"));
  classify->add_option("--point", point, "coordinates: file or inline JSON")->required();
  auto* closed = with_problem(app.add_subcommand("closed-orbit", "flow a point to its closed orbit"));
  closed->add_option("--point", point, "coordinates: file or inline JSON")->required();
  auto* equiv = with_problem(app.add_subcommand("equivalent", "decide equivalence of two points"));
  equiv->add_option("--a", point_a, "first point")->required();
  equiv->add_option("--b", point_b, "second point")->required();
  auto* rational = with_problem(app.add_subcommand("check-rational", "is the quasilattice a lattice"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    toricq::ProblemSpec spec = toricq::problem_from_json(parse_json(read_text(problem_path), "problem"));
    if (tolerance) spec.flow.tolerance = *tolerance;
    if (max_iter) spec.flow.max_iterations = *max_iter;
    const toricq::Session session = toricq::Session::load(std::move(spec));
    const auto point_mode =
        mode == "numeric" ? toricq::TorusPoint::Mode::numeric : toricq::TorusPoint::Mode::exact;
    const auto load_point = [&](const std::string& arg) {
      return toricq::point_from_json(point_document(arg), point_mode, session.basis());
    };

    json doc;
    int status = 0;
    if (report->parsed()) {
      doc = toricq::build_report(session);
    } else if (faces->parsed()) {
      doc = toricq::faces_json(session);
    } else if (strata->parsed()) {
      doc = toricq::strata_json(session);
    } else if (link->parsed()) {
      doc = toricq::link_json(session, toricq::parse_index_list(face, session.lattice.facet_count()));
    } else if (classify->parsed()) {
      doc = toricq::classify_json(session, load_point(point));
    } else if (closed->parsed()) {
      doc = toricq::closed_orbit_json(session, load_point(point));
    } else if (equiv->parsed()) {
      doc = toricq::equivalent_json(session, load_point(point_a), load_point(point_b));
      if (doc.value("verdict", "") == "undecided") status = kExitUndecided;
    } else if (rational->parsed()) {
      doc = toricq::check_rational_json(session);
    }
    emit(doc, output);
    return status;
  } catch (const toricq::NonconvergenceError& e) {
    emit_error(toricq::to_string(e.code()), e.what(), e.last_iterate());
    return kExitNonconvergence;
  } catch (const toricq::Error& e) {
    emit_error(toricq::to_string(e.code()), e.what());
    return e.code() == toricq::ErrorCode::internal ? 1 : kExitInvalid;
  } catch (const json::exception& e) {
    emit_error("config", e.what());
    return kExitInvalid;
  } catch (const std::exception& e) {
    emit_error("internal", e.what());
    return 1;
  }
}
