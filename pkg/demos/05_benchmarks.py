"""
Benchmark functions
===================

The four registered objectives with their domains and known minima.
"""

import numpy as np

from calibo import BENCHMARKS

rng = np.random.default_rng(0)
for name, b in BENCHMARKS.items():
    X = b.space.from_unit(b.space.sample_unit(rng, 20_000))
    vals = np.array([b(x) for x in X])
    print(f"{name:<10} D={b.dim:<2} f*={b.minimum:+.4f}  best of 20k random={vals.min():+.4f}  median={np.median(vals):+.3f}")

# the two global minima of the six-hump camel are mirror images
camel = BENCHMARKS["camel6"]
for x in camel.minimizers:
    print("camel6 at", np.round(x, 4), "=", round(camel(np.array(x)), 6))
