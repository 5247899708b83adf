"""Validate sample configs and CLI reports against the JSON schemas."""

import argparse
import json
import pathlib
import subprocess
import sys

import jsonschema
from referencing import Registry, Resource


def load_registry(schema_dir):
    schemas = {}
    resources = []
    for path in sorted(schema_dir.glob("*.schema.json")):
        doc = json.loads(path.read_text())
        jsonschema.Draft202012Validator.check_schema(doc)
        schemas[path.name] = doc
        resources.append((doc["$id"], Resource.from_contents(doc)))
    return schemas, Registry().with_resources(resources)


class Checker:
    def __init__(self, cli, schemas, registry, work):
        self.cli = cli
        self.schemas = schemas
        self.registry = registry
        self.work = work
        self.failures = []

    def validate(self, doc, schema_name, label):
        validator = jsonschema.Draft202012Validator(self.schemas[schema_name], registry=self.registry)
        errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
        for err in errors:
            self.failures.append(f"{label}: {'/'.join(map(str, err.path))}: {err.message}")
        print(f"{'ok  ' if not errors else 'FAIL'} {label} against {schema_name}")

    def run(self, args, label, expect=0):
        proc = subprocess.run([self.cli, *args], capture_output=True, text=True)
        if proc.returncode != expect:
            self.failures.append(f"{label}: exit {proc.returncode}, expected {expect}: {proc.stderr.strip()}")
            return None
        return proc

    def report(self, args, label, schema_name):
        out = self.work / (label.replace(" ", "_").replace(":", "_") + ".json")
        if self.run([*args, "--out", str(out)], label) is None:
            return None
        doc = json.loads(out.read_text())
        self.validate(doc, schema_name, label)
        return doc


def check_spectrum_summary(checker, doc, label):
    points = doc["points"]
    nonempty = [p for p in points if p["endpoint"] != "empty"]
    summary = doc["summary"]
    if summary["grid_points"] != len(points) or summary["nonempty_fibers"] != len(nonempty):
        checker.failures.append(f"{label}: summary counts disagree with the fiber list")
    if (summary["singular_support_extent"] is None) != (not nonempty):
        checker.failures.append(f"{label}: support extent disagrees with the fiber list")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cli", required=True)
    ap.add_argument("--schema-dir", required=True, type=pathlib.Path)
    ap.add_argument("--configs", required=True, type=pathlib.Path)
    ap.add_argument("--work", required=True, type=pathlib.Path)
    ns = ap.parse_args()
    ns.work.mkdir(parents=True, exist_ok=True)

    schemas, registry = load_registry(ns.schema_dir)
    checker = Checker(ns.cli, schemas, registry, ns.work)

    for path in sorted(ns.configs.glob("*.json")):
        config = json.loads(path.read_text())
        checker.validate(config, "experiment_config.schema.json", f"config {path.name}")
        kind = "classify_report.schema.json" if config.get("experiment") == "classify" else "spectrum_report.schema.json"
        doc = checker.report(["spectrum", "--config", str(path)], f"run {path.stem}", kind)
        if doc is not None and "points" in doc:
            check_spectrum_summary(checker, doc, path.stem)
            if doc["config"]["scale"]["exponents"] and "fiber_membership" not in doc["points"][0]:
                checker.failures.append(f"{path.stem}: scale exponents given but no fiber membership reported")

    checker.report(["valuation", "--net", "delta_pow:m=1", "--k", "-0.5,0.5", "--l", "1"], "valuation delta",
                   "valuation_report.schema.json")
    checker.report(["classify", "--net", "eps_power:p=1,q=0", "--lmax", "4"], "classify eps_power",
                   "classify_report.schema.json")
    doc = checker.report(["spectrum", "--net", "delta_pow:m=1", "--target", "c0", "--box", "-1,1", "--nx", "21"],
                         "spectrum flags", "spectrum_report.schema.json")
    if doc is not None:
        check_spectrum_summary(checker, doc, "spectrum flags")

    bad = ns.work / "bad_config.json"
    bad.write_text(json.dumps({"experiment": "delta_pow", "colour": "red"}))
    validator = jsonschema.Draft202012Validator(schemas["experiment_config.schema.json"], registry=registry)
    if validator.is_valid(json.loads(bad.read_text())):
        checker.failures.append("schema accepted a config with an unknown field")
    checker.run(["spectrum", "--config", str(bad)], "unknown field rejected", expect=2)
    checker.run(["example", "no_such_experiment"], "unknown experiment rejected", expect=2)
    checker.run(["spectrum", "--net", "delta_pow:m=9", "--target", "C0"], "out-of-range parameter rejected", expect=2)

    if checker.failures:
        print("\n".join(["failures:"] + checker.failures))
        return 1
    print("all reports conform")
    return 0


if __name__ == "__main__":
    sys.exit(main())
