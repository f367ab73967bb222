"""
Time slicing and the first-order splitting error
================================================

The default propagator exponentiates each slice exactly.  Splitting a slice
into a tunneling layer and a diagonal layer is cheaper but only first order,
and at 0.1 ns the diagonal phases per slice are already large.
"""

import numpy as np

from isingparity.fidelity import five_qubit_system
from isingparity.propagator import evolve_exact, evolve_trotter
from isingparity.synthesis import synthesize_two_active_vertical

xi = (0.6, 0.6, 0.4, 0.4)
params = five_qubit_system(xi)
segments = synthesize_two_active_vertical(xi).to_segments(0)
exact = evolve_exact(None, params, segments)

for dt in (0.1, 0.05, 0.01, 0.005, 0.001):
    split = evolve_trotter(None, params, segments, dt, split=True)
    sliced = evolve_trotter(None, params, segments, dt)
    print(f"dt={dt:<6} split err={np.linalg.norm(split - exact, 2):.2e}"
          f"  sliced err={np.linalg.norm(sliced - exact, 2):.2e}")

# Largest phase a single slice puts on the diagonal at dt = 0.1 ns.
print("2*pi*E*dt at E=2.8 GHz:", 2 * np.pi * 2.8 * 0.1)
