"""Runs `qorsim plan` on every shipped route and validates the reports against
docs/report.schema.json."""

import json
import pathlib
import subprocess
import sys

import jsonschema


def main() -> int:
    cli, source = sys.argv[1], pathlib.Path(sys.argv[2])
    schema = json.loads((source / "docs" / "report.schema.json").read_text())
    validator = jsonschema.Draft202012Validator(schema)
    failures = 0
    for route in sorted((source / "data" / "routes").glob("*.json")):
        proc = subprocess.run(
            [cli, "plan", "--route", str(route), "--tech", "both", "--trials", "2000"],
            capture_output=True, text=True, check=False)
        if proc.returncode != 0:
            print(f"FAIL {route.name}: exit {proc.returncode}: {proc.stderr.strip()}")
            failures += 1
            continue
        reports = json.loads(proc.stdout)
        for report in reports:
            errors = sorted(validator.iter_errors(report), key=lambda e: list(e.path))
            for error in errors:
                path = "/".join(str(p) for p in error.path)
                print(f"FAIL {route.name} [{report['technology']}] /{path}: {error.message}")
            failures += len(errors)
        if not failures:
            print(f"ok   {route.name}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
