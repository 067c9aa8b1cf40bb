"""
Repeated paired experiments and the subprocess objective
========================================================

run_experiment runs both methods over several seeds, writes one trace
CSV per (method, seed) and an aggregate CSV. The same machinery drives
an external program that reads coordinates on stdin and prints a value.
The CLI (``calibo run``) wraps exactly this.
"""

import shlex
import sys
import tempfile
from pathlib import Path

from calibo.harness import parse_config, read_csv, run_experiment

out = Path(tempfile.mkdtemp(prefix="calibo-demo-"))

config = parse_config(
    f"""
    benchmark = camel6
    acquisition = ei
    budget = 8
    initial_points = 5
    repetitions = 3
    out = {out / "camel"}
    """
)
result = run_experiment(config)
print("wrote", len(result.files), "files to", config.out)
header, rows = read_csv(out / "camel" / "aggregate.csv")
print(header[:5])
print("final mean best plain/cal:", rows[-1]["mean_best_plain"], rows[-1]["mean_best_cal"])

# an external objective over a mixed log / discrete space
script = out / "objective.py"
script.write_text(
    "import math, sys\n"
    "lr, width = map(float, sys.stdin.read().split())\n"
    "print((math.log10(lr) + 3) ** 2 + (width - 128) ** 2 / 1e4)\n"
)
ext = parse_config(
    f"""
    command = {shlex.quote(sys.executable)} {shlex.quote(str(script))}
    budget = 6
    initial_points = 3
    repetitions = 1
    calibrated = on
    out = {out / "external"}
    [dimensions]
    lr = 1e-6 1e-1 log
    width = 32 512 step=32
    """
)
trace = run_experiment(ext).traces[("calibrated", 0)]
for r in trace.records:
    print(f"iter {r.iteration}: lr={r.x[0]:.2e} width={r.x[1]:.0f} y={r.y:.3f}")
