"""Shadow-Lagrangian time integration for the Gross-Pitaevskii equation.

The coupled system evolves the quantum state psi together with an auxiliary
field phi driven by a harmonic oscillator centered on psi; a dissipative
leapfrog advances phi explicitly and a Crank-Nicolson-type update advances
psi with a single linear solve per step. Crank-Nicolson and Besse
relaxation baselines, ground-state computation and a convergence-study
harness are included.
"""

__version__ = "0.1.0"
