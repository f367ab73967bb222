"""
How robust is the gate to miscalibration?
=========================================

Three sweeps on the four-active gate: the tunneling drifting away from its
design value, the couplings changing under fixed or rescaled pulses, and the
bias parked on the idle qubits.
"""

import numpy as np

from isingparity import GateExperiment, sweep

base = GateExperiment()

# Tunneling: pulses are designed for 25 MHz and then simulated at the
# drifted value.
mhz = np.arange(23, 28)
table = sweep(base, "tunneling", mhz / 1000, workers=4)
print(table.to_csv())
fids = table.column("fid")
print(f"largest drop: {100 * (fids[2] - fids.min()) / fids[2]:.2f} %")

# Couplings: keep the old +-0.8 GHz pulses, or rescale them to +-2 xi.
for xi in (0.3, 0.35, 0.4, 0.45, 0.5):
    stale = GateExperiment(couplings=(xi,) * 4, pulses=(0.8, -0.8)).run()
    fresh = GateExperiment(couplings=(xi,) * 4, pulses="rescaled").run()
    print(f"xi={xi:.2f}  stale fid={stale.fid:.3f}  rescaled fid={fresh.fid:.4f}")

# Idle-qubit bias.
table = sweep(base, "control_bias", [1.0, 2.0, 3.0, 5.0, 10.0], workers=4)
print(table.to_csv())
