#!/usr/bin/env python3
"""End-to-end checks of the kacm executable: exit codes, error lines, report formats."""
import json
import os
import subprocess
import sys
import tempfile

KACM, ROOT = sys.argv[1], sys.argv[2]
VALIDATOR = os.path.join(ROOT, "tools", "schema", "validate_report.py")

CONFIG = {
    "schema": "kacm-run/1",
    "kernels": {"bm": {"family": "brownian"}},
    "measures": {
        "d0": {"atoms": [{"at": 0, "weight": 1}]},
        "half": {"atoms": [{"at": 0, "weight": 0.5}]},
    },
    "tasks": [
        {"id": "m", "operation": "moment", "kernel": "bm", "measure": "d0", "k": 2},
        {"id": "lt", "operation": "mc-compare", "kernel": "bm", "measure": "d0", "k": 1},
        {"id": "kato", "operation": "kato", "kernel": "bm", "measure": "d0", "expect_in_kato": True},
        {"id": "eb", "operation": "exp-bound", "kernel": "bm", "measure": "half", "t": 1},
    ],
    "mc": {"n_paths": 2000, "dt": 0.01, "local_time": "bridge"},
}

failures = []


def check(cond, what):
    print(("ok   " if cond else "FAIL ") + what)
    if not cond:
        failures.append(what)


def run(*args):
    return subprocess.run([KACM, *args], capture_output=True, text=True)


with tempfile.TemporaryDirectory() as tmp:
    good = os.path.join(tmp, "good.json")
    with open(good, "w") as f:
        json.dump(CONFIG, f, indent=2)

    r = run("run", "-c", good, "-o", os.path.join(tmp, "r.csv"))
    check(r.returncode == 0, f"run exits 0 (got {r.returncode}: {r.stderr.strip()[-200:]})")
    v = subprocess.run([sys.executable, VALIDATOR, os.path.join(tmp, "r.csv")], capture_output=True, text=True)
    check(v.returncode == 0, "csv report validates " + v.stdout.strip() + v.stderr.strip())

    r = run("run", "-c", good, "-o", os.path.join(tmp, "r.json"))
    check(r.returncode == 0, "json run exits 0")
    v = subprocess.run([sys.executable, VALIDATOR, os.path.join(tmp, "r.json")], capture_output=True, text=True)
    check(v.returncode == 0, "json report validates " + v.stdout.strip() + v.stderr.strip())

    # the echoed config runs again with the same digest
    with open(os.path.join(tmp, "r.json")) as f:
        rep = json.load(f)
    echo = os.path.join(tmp, "echo.json")
    with open(echo, "w") as f:
        json.dump(rep["config"], f)
    r = run("moment", "-c", echo, "-o", "-", "--format", "json")
    check(r.returncode == 0, "echoed config runs")
    if r.returncode == 0:
        check(json.loads(r.stdout)["config_digest"] != "", "digest present")
    r2 = run("run", "-c", echo, "--format", "json", "-o", os.path.join(tmp, "r2.json"))
    with open(os.path.join(tmp, "r2.json")) as f:
        rep2 = json.load(f)
    check(rep2["config_digest"] == rep["config_digest"], "echo round-trips to the same digest")
    check([row["mc_mean"] for row in rep2["rows"]] == [row["mc_mean"] for row in rep["rows"]],
          "same seed gives identical Monte Carlo columns")

    r = run("run", "-c", good, "--workers", "3", "-o", "-", "--format", "json")
    check(r.returncode == 0 and [x["mc_mean"] for x in json.loads(r.stdout)["rows"]] ==
          [x["mc_mean"] for x in rep["rows"]], "worker count does not change results")

    r = run("mc-compare", "-c", good, "--seed-override", "99", "--format", "json")
    check(r.returncode == 0 and json.loads(r.stdout)["config"]["mc"]["seed"] == 99, "seed override is echoed")

    r = run("kato", "-c", good)
    lines = [l for l in r.stdout.splitlines() if l and not l.startswith("#")]
    check(r.returncode == 0 and len(lines) == 2 and lines[1].startswith("kato,kato,"), "subcommand filters tasks")

    r = run("kernel-check")
    check(r.returncode == 0, "built-in kernel check passes")

    # configuration errors: exit 2 with file:line
    bad = dict(CONFIG)
    bad["tasks"] = [dict(CONFIG["tasks"][0], measure="mu9")]
    badp = os.path.join(tmp, "bad.json")
    with open(badp, "w") as f:
        json.dump(bad, f, indent=2)
    r = run("run", "-c", badp)
    line = next(i + 1 for i, l in enumerate(open(badp)) if "mu9" in l)
    check(r.returncode == 2, "undeclared measure exits 2")
    check(f"{badp}:{line}: task 'm' references undeclared measure \"mu9\"" in r.stderr,
          "error names file, line and measure: " + r.stderr.strip())

    with open(badp, "w") as f:
        f.write('{\n  "schema": "kacm-run/1",\n  "kernels": {\n')
    r = run("run", "-c", badp)
    check(r.returncode == 2 and f"{badp}:" in r.stderr, "malformed JSON exits 2")

    r = run("run", "-c", good, "--task", "nope")
    check(r.returncode == 2, "unknown task id exits 2")
    r = run("exp-bound", "-c", good, "--workers", "0")
    check(r.returncode == 2, "invalid option exits 2")
    r = run()
    check(r.returncode == 2, "missing subcommand exits 2")

    # I/O errors: exit 3
    r = run("run", "-c", os.path.join(tmp, "missing.json"))
    check(r.returncode == 3, "missing config exits 3")
    r = run("run", "-c", good, "-o", os.path.join(tmp, "no", "such", "dir.csv"))
    check(r.returncode == 3, "unwritable report exits 3")

    # a failing comparison exits 1
    fail = dict(CONFIG)
    fail["tasks"] = [{"id": "k", "operation": "kato", "kernel": "bm", "measure": "d0", "expect_in_kato": False}]
    fp = os.path.join(tmp, "fail.json")
    with open(fp, "w") as f:
        json.dump(fail, f)
    r = run("run", "-c", fp)
    check(r.returncode == 1, "failed verdict exits 1")

    r = run("--version")
    check(r.returncode == 0 and "0.1.0" in r.stdout, "--version")

sys.exit(1 if failures else 0)
