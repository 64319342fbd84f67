#!/usr/bin/env python3
"""End-to-end checks of the cm executable: values, exit codes, determinism,
schema conformance of every subcommand and the TSV view."""

import json
import math
import pathlib
import subprocess
import sys

import jsonschema

CM = sys.argv[1]
SCHEMAS = pathlib.Path(sys.argv[2])

report_schema = json.loads((SCHEMAS / "cm-report-1.schema.json").read_text())
jsonschema.Draft202012Validator.check_schema(report_schema)
validator = jsonschema.Draft202012Validator(report_schema)
input_validators = {
    name: jsonschema.Draft202012Validator(json.loads((SCHEMAS / f"{name}-1.schema.json").read_text()))
    for name in ("cm-deg", "cm-poly", "cm-rv")
}

failures = []


def check(cond, what):
    print(("ok   " if cond else "FAIL ") + what)
    if not cond:
        failures.append(what)


def run(*args):
    p = subprocess.run([CM, *args], capture_output=True, text=True)
    return p.returncode, p.stdout, p.stderr


def run_json(*args):
    code, out, err = run(*args)
    if code != 0:
        print(err, file=sys.stderr)
        return code, None
    doc = json.loads(out)
    errors = list(validator.iter_errors(doc))
    for e in errors[:5]:
        print(f"     schema: {list(e.absolute_path)}: {e.message[:200]}")
    check(not errors, f"{args[0]} output matches cm-report/1")
    return code, doc


CUBIC8 = {"version": "cm-deg/1", "d": [3] * 8}
REG10 = {"version": "cm-deg/1", "d": [5] * 10}
BIP = {"version": "cm-deg/1", "d": [2, 2, 2, 1, 1, 1] * 2, "bipartition": [6, 6]}
CONC = {"version": "cm-deg/1", "d": [2] * 6, "Y": [[0, 1], [2, 3]], "gamma": [1, 2], "trials": 200}
POLY = {"version": "cm-poly/1", "terms": [[[2, 0], [1, 0]], [[1, 1], [0, 1]]]}
RV = {
    "version": "cm-rv/1",
    "coords": [[[[1, 0], 0.5], [[-1, 0], 0.5]]] * 2,
    "table": [[[0, 0], [0.1, 0]], [[0, 1], [0, 0.05]], [[1, 0], [0, -0.05]], [[1, 1], [-0.1, 0]]],
}
for name, doc in (("cm-deg", CUBIC8), ("cm-deg", BIP), ("cm-deg", CONC), ("cm-poly", POLY), ("cm-rv", RV)):
    check(input_validators[name].is_valid(doc), f"sample input is a valid {name}/1 document")

j = json.dumps

# Values.
code, doc = run_json("count", "--input", j(REG10))
check(code == 0, "count exits 0")
if doc:
    lo = doc["count"] * math.exp(-doc["error_radius"])
    hi = doc["count"] * math.exp(doc["error_radius"])
    check(lo <= 66462606 <= hi and abs(doc["count"] / 66462606 - 1.036) < 1e-3,
          f"5-regular on 10 vertices: estimate {doc['count']:.6g} near 66462606")
_, oc = run_json("oracle-count", "--input", j(CUBIC8))
check(oc is not None and oc["count"] == 19355, "oracle-count of cubic graphs on 8 vertices is 19355")
_, doc = run_json("count", "--input", j(CUBIC8))
if doc:
    r = doc["error_radius"]
    check(doc["count"] * math.exp(-r) <= 19355 <= doc["count"] * math.exp(r),
          "cubic estimate bracket contains 19355")

_, doc = run_json("tournament", "--n", "7", "--exact")
check(doc is not None and doc["exact"] == 2640 and abs(doc["ratio"] - 0.959) < 5e-4,
      "regular tournaments on 7 vertices: 2640, ratio 0.959")
_, doc = run_json("tournament", "--n", "41")
check(doc is not None and doc["exact"] is None and doc["asymptotic"] > 0, "tournament without --exact")

_, doc = run_json("count-bipartite", "--input", j(BIP))
check(doc is not None and doc["mode"] == "bipartite", "count-bipartite")
_, doc = run_json("saddle", "--input", j(CUBIC8))
check(doc is not None and abs(doc["saddle"]["lambda"][0][1] - 3 / 7) < 1e-12, "saddle of a regular sequence")
_, doc = run_json("saddle", "--input", j(CUBIC8), "--alpha-beta", "[0.3,0.5]")
_, doc = run_json("prob", "--input", j(CUBIC8), "--H-plus", "[[0,1]]")
check(doc is not None and abs(doc["prob"] - 3 / 7) < 1e-12, "prob of one edge in a cubic graph is 3/7")
_, doc = run_json("prob", "--input", j(CUBIC8), "--H-plus", "[[0,1]]", "--mode", "upper-bound")
_, doc = run_json("sample", "--input", j(CONC), "--count", "4")
check(doc is not None and len(doc["graphs"]) == 4, "sample returns the requested number of graphs")
_, doc = run_json("sample", "--input", j(CONC), "--count", "4", "--method", "beta-model")
_, doc = run_json("concentration", "--input", j(CONC))
check(doc is not None and len(doc["rows"]) == 2, "concentration reports one row per gamma")
_, doc = run_json("whiten", "--input",
                  j({"A": [[2, 0.01, 0], [0.01, 2, 0.01], [0, 0.01, 2]], "D": [2, 2, 2], "r": 0.5, "gamma": 0.1}))
check(doc is not None and doc["all_pass"], "whiten certificate passes")
_, doc = run_json("rv-estimate", "--input", j(RV), "--order", "both")
check(doc is not None and "first" in doc and "second" in doc, "rv-estimate reports both orders")
_, doc = run_json("poly-moments", "--input", j(POLY), "--sigma", "[[1,0.2],[0.2,1]]")
check(doc is not None and abs(doc["mean"][0] - 1) < 1e-12 and abs(doc["mean"][1] - 0.2) < 1e-12,
      "poly-moments mean of x^2 + i x y")

code, doc = run_json("validate")
check(code == 0 and doc is not None and doc["pass"], "validate (quick) exits 0")

# Determinism.
for args in (("sample", "--input", j(CONC), "--count", "5", "--seed", "7"),
             ("concentration", "--input", j(CONC), "--seed", "7"),
             ("validate", "--suite", "isserlis", "--seed", "3")):
    a, b = run(*args), run(*args)
    check(a[0] == 0 and a[1] == b[1], f"{args[0]} output is byte-identical for identical argv")
check(run("sample", "--input", j(CONC), "--count", "5", "--seed", "7")[1]
      != run("sample", "--input", j(CONC), "--count", "5", "--seed", "8")[1], "sample depends on the seed")

# Exit codes and error reporting.
def expect_error(args, want, what):
    code, out, err = run(*args)
    ok = code == want
    if want in (1, 2, 3) and "--bogus" not in args:
        try:
            e = json.loads(err)["error"]
            ok = ok and e["exit_code"] == want and e["kind"] and e["message"]
        except (ValueError, KeyError, TypeError):
            ok = False
    check(ok and out == "", f"{what}: exit {code} (want {want})")


expect_error(("count", "--input", j({"d": [3, 3, 3]})), 2, "odd degree sum")
expect_error(("count", "--input", j({"version": "cm-deg/9", "d": [1, 1]})), 2, "wrong document version")
expect_error(("count", "--input", j(BIP)), 2, "count on a bipartite document")
expect_error(("oracle-count", "--input", j(REG10), "--budget", "1"), 3, "oracle budget exhausted")
expect_error(("tournament", "--n", "6"), 2, "tournament with even n")
expect_error(("count", "--bogus"), 2, "unknown flag")
expect_error(("validate", "--suite", "nope"), 2, "unknown suite")

# TSV view.
code, tsv, _ = run("--format", "tsv", "count", "--input", j(CUBIC8))
lines = tsv.splitlines()
check(code == 0 and lines[0] == "key\tvalue", "TSV header")
rows = dict(line.split("\t", 1) for line in lines[1:])
_, js, _ = run("count", "--input", j(CUBIC8))
ref = json.loads(js)
check(float(rows["log_count"]) == ref["log_count"], "TSV log_count equals JSON log_count exactly")
check("error_radius" in rows and "components.log_C" in rows, "TSV carries error_radius and components")
check(json.loads(rows["saddle.beta.0"]) == ref["saddle"]["beta"][0], "TSV keeps beta bit for bit")

print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
