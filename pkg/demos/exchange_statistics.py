"""
Two identical particles keep their statistics
=============================================

An antisymmetric two-particle state stays antisymmetric under the coupled
evolution because the Hamiltonian commutes with coordinate exchange.  This
script runs a small two-particle configuration and prints the exchange
defect at every node; it stays at rounding level even though the particles
interact through both the Coulomb kernel and the field they radiate.

The run takes about half a minute on one core: the wavefunction lives on a
six-dimensional grid, so this is the cheapest honest demonstration.
"""

import numpy as np

from msfield.config import parse_config
from msfield.runner import run_scenario

PI = np.pi

doc = {
    "physical": {"hbar": 1.0, "c": 10.0, "masses": [1.0, 1.0], "charges": [0.5, 0.5]},
    "grid": {"points": 8, "length": 2.0 * PI},
    "coulomb": {"mode": "spectral"},
    "initial": {
        "wavefunction": {
            "kind": "gaussian",
            "centers": [[2.0, PI, PI], [4.3, PI, PI]],
            "widths": [0.9, 0.9],
            "momentum_modes": [[0, 0, 1], [0, 0, -1]],
            "symmetry": "antisymmetric",
        },
        "field": {"kind": "zero"},
    },
    "evolution": {"horizon": 0.15, "nodes": 6},
    "picard": {"tol": 1.0e-8, "max_iterations": 40},
    "seed": 21,
}

result = run_scenario(parse_config(doc), out_dir="out-demo-exchange")
print(result.summary())
print()

record = result.record
print("time      exchange defect")
for t, s in zip(record.times, record.symmetry_residual):
    print(f"{t:.4f}    {s:.3e}")

# the packets repel through the Coulomb kernel and radiate, yet the defect
# never leaves rounding territory
print(f"\nworst defect: {np.nanmax(record.symmetry_residual):.3e}")
