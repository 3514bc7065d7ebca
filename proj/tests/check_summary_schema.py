"""Runs the small presets and validates each summary.json against the schema."""
import json
import pathlib
import subprocess
import sys

import jsonschema

cli, presets, schema_path, out = sys.argv[1:5]
schema = json.loads(pathlib.Path(schema_path).read_text())
expected = {"zero_amplitude": 0, "large_dt": 3, "linear_energy": 0}
for name, code in expected.items():
    target = pathlib.Path(out) / name
    proc = subprocess.run([cli, "--quiet", "--output-dir", str(target), "run", f"{presets}/{name}.json"])
    if proc.returncode != code:
        sys.exit(f"{name}: exit code {proc.returncode}, expected {code}")
    summary = json.loads((target / "summary.json").read_text())
    jsonschema.validate(summary, schema)
    print(f"{name}: summary valid")
