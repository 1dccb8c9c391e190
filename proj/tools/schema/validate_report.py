#!/usr/bin/env python3
"""Validate a kacm report (csv or json) against the published schemas."""
import csv
import json
import pathlib
import re
import sys

import jsonschema
from referencing import Registry, Resource

HERE = pathlib.Path(__file__).resolve().parent


def load(name):
    return json.loads((HERE / name).read_text())


def registry():
    run = load("run-config.schema.json")
    return Registry().with_resource(run["$id"], Resource.from_contents(run))


def check_json(text):
    doc = json.loads(text)
    jsonschema.Draft202012Validator(load("report.schema.json"), registry=registry()).validate(doc)


def number(cell, col):
    if cell in ("inf", "-inf", "nan"):
        return float(cell)
    value = float(cell)
    if "minimum" in col and not value >= col["minimum"]:
        raise ValueError(f"{col['name']}={cell} below {col['minimum']}")
    return value


def check_csv(text):
    spec = load("report-csv.schema.json")
    lines = text.splitlines()
    preamble = [l[2:].split(" ", 1) for l in lines if l.startswith("#")]
    keys = [p[0] for p in preamble]
    if keys != spec["preamble"]:
        raise ValueError(f"preamble keys {keys} != {spec['preamble']}")
    digest = preamble[2][1]
    if not re.fullmatch(r"[0-9a-f]{16}", digest):
        raise ValueError(f"bad digest {digest!r}")
    config = json.loads(preamble[3][1])
    jsonschema.Draft202012Validator(load("run-config.schema.json")).validate(config)

    rows = list(csv.reader(l for l in lines if not l.startswith("#")))
    names = [c["name"] for c in spec["columns"]]
    if rows[0] != names:
        raise ValueError(f"header {rows[0]} != {names}")
    for row in rows[1:]:
        if len(row) != len(names):
            raise ValueError(f"row has {len(row)} cells: {row}")
        for cell, col in zip(row, spec["columns"]):
            if cell == "":
                if col.get("required"):
                    raise ValueError(f"empty required cell {col['name']}")
                continue
            if col["type"] == "number":
                number(cell, col)
            if "enum" in col and cell not in col["enum"]:
                raise ValueError(f"{col['name']}={cell!r} not in {col['enum']}")
    if len(rows) - 1 != len(config["tasks"]):
        raise ValueError("row count differs from task count")


def main(argv):
    if len(argv) != 2:
        print("usage: validate_report.py REPORT", file=sys.stderr)
        return 2
    path = pathlib.Path(argv[1])
    text = path.read_text()
    try:
        if text.lstrip().startswith("{"):
            check_json(text)
        else:
            check_csv(text)
    except (ValueError, jsonschema.ValidationError) as e:
        print(f"{path}: invalid report: {e}", file=sys.stderr)
        return 1
    print(f"{path}: ok")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
