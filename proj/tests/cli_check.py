"""End-to-end checks of the toricq binary: exit codes, schema validity,
byte-identical output and the link round-trip."""

import json
import os
import subprocess
import sys
import tempfile

import jsonschema

BIN, ROOT = sys.argv[1], sys.argv[2]
PROBLEMS = os.path.join(ROOT, "problems")
SCHEMA = json.load(open(os.path.join(ROOT, "schemas", "toricq.schema.json")))
failures = []


def validator(kind):
    schema = dict(SCHEMA)
    schema["$ref"] = "#/$defs/" + kind
    return jsonschema.Draft202012Validator(schema)


def run(*args, expect=0):
    proc = subprocess.run([BIN, *args], capture_output=True, text=True)
    if proc.returncode != expect:
        failures.append(f"{args}: exit {proc.returncode}, expected {expect}\n{proc.stderr}")
    return proc


def check(cond, msg):
    if not cond:
        failures.append(msg)


def problem(name):
    return os.path.join(PROBLEMS, name)


def validate(kind, doc, what):
    errors = list(validator(kind).iter_errors(doc))
    check(not errors, f"{what}: schema errors {[e.message for e in errors[:3]]}")


# every problem file is a valid problem document; every report validates and is deterministic
for name in sorted(os.listdir(PROBLEMS)):
    validate("problem", json.load(open(problem(name))), name)
    first = run("report", problem(name)).stdout
    second = run("report", problem(name)).stdout
    check(first == second, f"{name}: report output differs between runs")
    report = json.loads(first)
    validate("report", report, name)
    validate("faces", json.loads(run("faces", problem(name)).stdout), name + " faces")
    validate("strata", json.loads(run("strata", problem(name)).stdout), name + " strata")
    validate("quasilattice", json.loads(run("check-rational", problem(name)).stdout), name + " check-rational")

    # round-trip: re-feed every emitted link problem and compare subtrees
    def walk(rep):
        for link in rep["links"]:
            with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as f:
                json.dump(link["problem"], f)
            sub = json.loads(run("report", f.name).stdout)
            os.unlink(f.name)
            check(sub == link["report"], f"{name}: link {link['parent_face']} subtree not reproduced")
            walk(link["report"])

    walk(report)

# report examples
tri = json.loads(run("report", problem("triangle.json")).stdout)
check(tri["f_vector"] == [3, 3, 1] and tri["simple"] and tri["depth"] == 0 and tri["stratum_count"] == 1
      and tri["rational"], "triangle report")
pyr = json.loads(run("report", problem("square_pyramid.json")).stdout)
check(pyr["depth"] == 1 and pyr["stratum_count"] == 2 and pyr["links"][0]["report"]["f_vector"] == [4, 4, 1],
      "pyramid report")
rect = json.loads(run("report", problem("sqrt2_rectangle.json")).stdout)
check(not rect["rational"] and rect["depth"] == 0, "sqrt2-rectangle report")

# link subcommand
link = json.loads(run("link", problem("square_pyramid.json"), "--face", "1,2,3,4").stdout)
validate("link", link, "link")
check(link == pyr["links"][0], "link subcommand differs from the report entry")
run("link", problem("square_pyramid.json"), "--face", "{1,2}", expect=2)  # regular face
run("link", problem("square_pyramid.json"), "--face", "1,2,3", expect=2)  # not a face

# point verdicts
c = json.loads(run("classify", problem("triangle.json"), "--point", "[1,1,1]").stdout)
validate("classify", c, "classify")
check(c["verdict"] == "closed orbit" and c["stratum"]["kind"] == "maximal" and c["point_support"] == [],
      "classify (1,1,1) on the triangle")
out = json.loads(run("classify", problem("triangle.json"), "--point", "[0,0,0]").stdout)
validate("classify", out, "classify outside")
check(out["verdict"] == "outside C^d_Delta", "inadmissible point verdict")

co = json.loads(run("closed-orbit", problem("square_pyramid.json"), "--point", "[0,0,0,1,1]").stdout)
validate("closed_orbit", co, "closed-orbit")
check(co["limit_support"] == [1, 2, 3, 4] and co["stratum"]["kind"] == "singular", "closed-orbit collapse")

with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as f:
    json.dump({"point": [1, {"modulus": "1", "angle": "1/4"}, 1]}, f)
    point_file = f.name
eq = json.loads(run("equivalent", problem("triangle.json"), "--a", point_file, "--b", point_file).stdout)
validate("equivalent", eq, "equivalent")
check(eq["verdict"] == "equivalent" and eq["mode"] == "exact", "reflexive equivalence")
os.unlink(point_file)

sqrt2_angle = '[1,1,{"modulus":"1","angle":{"coeffs":["0","1"]}}]'
ne = json.loads(run("equivalent", problem("triangle_over_q_sqrt2.json"), "--a", "[1,1,1]", "--b", sqrt2_angle).stdout)
check(ne["verdict"] == "not_equivalent", "sqrt2-angle pair")

# numeric mode undecided -> exit 4
und = run("equivalent", problem("triangle.json"), "--mode", "numeric", "--a", "[1,1,1]", "--b", "[2,2,2]", expect=4)
check(json.loads(und.stdout)["verdict"] == "undecided", "numeric undecided verdict")

# nonconvergence -> exit 3 with the last iterate
nc = run("closed-orbit", problem("square_pyramid.json"), "--point", "[0,0,0,1,1]", "--max-iter", "2", expect=3)
err = json.loads(nc.stderr)
validate("error", err, "nonconvergence error")
check(err["error"]["code"] == "nonconvergence" and "last_iterate" in err["error"], "nonconvergence report")

# invalid input -> exit 2
run("report", os.path.join(ROOT, "no-such-file.json"), expect=2)
run("classify", problem("triangle.json"), "--point", "[1,1]", expect=2)
run("classify", problem("triangle.json"), "--point", "[1,1,", expect=2)
run("report", problem("triangle.json"), "--mode", "fuzzy", expect=2)
run("bogus", expect=2)
with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as f:
    json.dump({"dimension": 2, "facets": [{"normal": ["1", "0"], "offset": "0"},
                                          {"normal": ["0", "1"], "offset": "0"}]}, f)
    unbounded = f.name
bad = run("report", unbounded, expect=2)
check(json.loads(bad.stderr)["error"]["code"] == "load", "unbounded polytope error code")
os.unlink(unbounded)

# --output writes the same bytes as stdout
with tempfile.TemporaryDirectory() as d:
    target = os.path.join(d, "r.json")
    run("report", problem("cone_over_pyramid.json"), "--output", target)
    check(open(target).read() == run("report", problem("cone_over_pyramid.json")).stdout, "--output differs")

for f in failures:
    print("FAIL:", f)
print(f"cli checks: {len(failures)} failure(s)")
sys.exit(1 if failures else 0)
