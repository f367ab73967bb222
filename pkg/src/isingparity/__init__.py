"""Pulse-level simulation and gate synthesis for qubit arrays with always-on Ising couplings."""
__version__ = "0.1.0"

from .hamiltonian import DimensionCapError, SystemParams, full_hamiltonian, reduced_hamiltonian
from .lattice import LatticeSpec, SiteRole, build_surface_layout, build_testbed_9q
from .pauli import PauliString, commutes, multiply
from .propagator import UnitarySegment, analytic_2x2, evolve_exact, evolve_trotter
from .synthesis import (InfeasibleScheduleError, PulseSchedule, SubspaceGateSpec, freeze_bias,
                        synthesize_four_active, synthesize_general,
                        synthesize_two_active_horizontal, synthesize_two_active_vertical)
from .fidelity import GateExperiment, fid, fid_unit, ideal_parity_unitary, sweep
from .surface import (SyndromeExtractor, build_three_step_schedule, build_two_step_schedule,
                      check_fig9_equivalence, extract_syndrome, validate_ordering)
