"""Validates the shipped device files and freshly written CLI outputs against the JSON schemas."""
import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

cli, root = sys.argv[1], Path(sys.argv[2])
schemas = root / "schemas"


def check(document, schema):
    jsonschema.validate(json.loads(Path(document).read_text()), json.loads((schemas / schema).read_text()))
    print(f"ok {Path(document).name} against {schema}")


for device in sorted((root / "data").glob("*.json")):
    check(device, "device_spec.schema.json")

with tempfile.TemporaryDirectory() as out:
    device = str(root / "data" / "reference_device.json")
    run = lambda *args: subprocess.run([cli, *args, "--config", device, "--out", out], check=True, capture_output=True)
    run("simulate-gain", "--gain-db", "20")
    check(Path(out) / "drive.json", "drive.schema.json")
    run("synth", "--model", "reflection", "--noise", "0.01", "--seed", "3")
    run("fit-s11", "--trace", str(Path(out) / "reflection.s1p"))
    run("synth", "--model", "noise", "--added-noise", "0.59", "--seed", "4")
    run("fit-noise", "--trace", str(Path(out) / "noise.csv"), "--record", str(Path(out) / "calibration.json"),
        "--lambda", "0.95", "--chain-noise", "23", "--lambda-range", "0.92,0.98", "--chain-noise-range", "21,25")
    check(Path(out) / "calibration.json", "calibration_record.schema.json")
