"""Validate weldkit JSON reports against the schemas in schemas/.

    python3 python/validate_reports.py report1.json report2.json ...

Exits with the number of invalid reports.
"""

import glob
import json
import os
import sys

from jsonschema import Draft202012Validator
from referencing import Registry, Resource

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def validator():
    registry = Registry()
    for path in glob.glob(os.path.join(ROOT, "schemas", "*.json")):
        with open(path) as f:
            schema = json.load(f)
        registry = registry.with_resource(schema["$id"], Resource.from_contents(schema))
    with open(os.path.join(ROOT, "schemas", "report.schema.json")) as f:
        return Draft202012Validator(json.load(f), registry=registry)


def main(paths):
    v = validator()
    bad = 0
    for path in sorted(paths):
        try:
            with open(path) as f:
                report = json.load(f)
        except ValueError as e:
            bad += 1
            print(path, "INVALID JSON:", e)
            continue
        errors = list(v.iter_errors(report))
        if errors:
            bad += 1
            print(path, "INVALID")
            for e in errors[:3]:
                print("   ", "/".join(map(str, e.absolute_path)), e.message[:200])
        else:
            print(path, "ok")
    return bad


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
