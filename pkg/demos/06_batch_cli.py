"""Driving the batch CLI from Python: run every bundled scenario.

Equivalent shell usage:

    mepack run demos/scenarios/free_particle.json --out /tmp/mepack-demo
"""

import json
import sys
import tempfile
from pathlib import Path

from mepack.cli import main

print(__doc__)

scenario_dir = Path(__file__).parent / "scenarios"
with tempfile.TemporaryDirectory() as tmp:
    for scenario in sorted(scenario_dir.glob("*.json")):
        out = Path(tmp) / scenario.stem
        print(f"=== {scenario.name} -> {out}")
        code = main(["run", str(scenario), "--out", str(out)])
        if code != 0:
            sys.exit(code)
        report = (out / "report.txt").read_text().splitlines()
        for line in report[:6]:
            print(f"    {line}")
        print("    ...")
