#!/usr/bin/env python3
"""Run the whole comparison and write every artifact to a directory.

Equivalent to `ndpong run --out <dir>`. The score table is byte-identical
across runs with the same configuration.
"""
import sys
import tempfile
from pathlib import Path

from ndpong.harness import ExperimentConfig, run_experiment

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp(prefix="ndpong-"))
report = run_experiment(ExperimentConfig(out_dir=str(out)))
print(report.summary())
print("\nartifacts in", out)
for path in sorted(out.rglob("*")):
    if path.is_file():
        print(f"  {path.relative_to(out)}  ({path.stat().st_size} bytes)")
