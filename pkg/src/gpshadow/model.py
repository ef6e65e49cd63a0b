"""Problem definitions: density nonlinearities, trapping potentials, configs.

The density functional is split as V[rho] = 2*V0(x) + (density part), with
the spatial part V0 carried as a potential diagonal and the density part as
a :class:`Nonlinearity`. For the Gross-Pitaevskii (cubic) case the density
part is kappa*rho with constant derivative kappa.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable

import numpy as np

from gpshadow.grid import Grid, build_grid
from gpshadow.operators import SparseOperator, laplacian, potential_diagonal

SCHEMES = ("ds", "cn", "besse")
DISSIPATION_ORDERS = (0, 2, 3, 4, 5, 6)


@dataclass(frozen=True)
class Nonlinearity:
    """Density-dependent part of the interaction functional.

    ``evaluate(rho)`` is the density part of V[rho] (the full functional is
    2*V0 + evaluate(rho)); ``derivative(rho)`` is its derivative in rho.
    Both act elementwise on nonnegative density arrays.
    """

    evaluate: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]
    label: str = "custom"


def cubic_nonlinearity(kappa: float) -> Nonlinearity:
    return Nonlinearity(
        evaluate=lambda rho: kappa * rho,
        derivative=lambda rho: np.full_like(rho, kappa),
        label="cubic",
    )


# --- potentials -----------------------------------------------------------

def harmonic_potential(gamma1: float, gamma2: float | None = None, center=(0.0, 0.0)):
    """0.5 * (g1 (x-c1)^2 + g2 (y-c2)^2); in 1D only the first axis is used."""

    def v(*coords):
        if len(coords) == 1:
            return 0.5 * gamma1 * (coords[0] - center[0]) ** 2
        g2 = gamma2 if gamma2 is not None else gamma1
        return 0.5 * (gamma1 * (coords[0] - center[0]) ** 2 + g2 * (coords[1] - center[1]) ** 2)

    return v


def checkerboard_potential():
    """floor(5 + 2 sin(pi x/3) sin(pi y/3)): discontinuous checkerboard wells."""

    def v(x, y):
        return np.floor(5.0 + 2.0 * np.sin(np.pi / 3.0 * x) * np.sin(np.pi / 3.0 * y))

    return v


def potential_fn(spec: dict | None):
    """Resolve a potential spec dict into a vectorized callable.

    Supported kinds: ``none``, ``harmonic`` (gamma: [g1, g2]),
    ``checkerboard``, and ``sum`` (parts: [spec, ...]).
    """
    if spec is None or spec.get("kind") == "none":
        return lambda *coords: np.zeros_like(coords[0])
    kind = spec["kind"]
    if kind == "harmonic":
        gamma = spec.get("gamma", [1.0, 1.0])
        center = tuple(spec.get("center", (0.0, 0.0)))
        return harmonic_potential(float(gamma[0]), float(gamma[-1]), center=center)
    if kind == "constant":
        value = float(spec.get("value", 0.0))
        return lambda *coords: np.full_like(coords[0], value)
    if kind == "checkerboard":
        return checkerboard_potential()
    if kind == "sum":
        parts = [potential_fn(p) for p in spec["parts"]]
        return lambda *coords: sum(p(*coords) for p in parts)
    raise ValueError(f"unknown potential kind {kind!r}")


# --- the coupled right-hand side ------------------------------------------

def shadow_rhs_general(
    psi: np.ndarray,
    phi: np.ndarray,
    nonlinearity: Nonlinearity,
    potential_op: SparseOperator | None,
    laplacian_op: SparseOperator,
) -> np.ndarray:
    """Right-hand side of the quantum-state equation in the coupled system.

    Evaluates, with rho = |phi|^2 and the V[rho] = 2*V0 + f(rho) split,

        -0.5 lap(psi) + V0 psi + 0.5 f(rho) psi
        + 0.5 rho f'(rho) (3 psi - 2 phi),

    which for the cubic case f(rho) = kappa rho collapses to the
    Gross-Pitaevskii coupling -0.5 lap(psi) + V0 psi + kappa rho (2 psi - phi).
    """
    rho = np.abs(phi) ** 2
    out = -0.5 * (laplacian_op @ psi)
    if potential_op is not None:
        out = out + potential_op.diagonal().real * psi
    out = out + 0.5 * nonlinearity.evaluate(rho) * psi
    out = out + 0.5 * rho * nonlinearity.derivative(rho) * (3.0 * psi - 2.0 * phi)
    return out


def cubic_shadow_rhs(
    psi: np.ndarray,
    phi: np.ndarray,
    potential_op: SparseOperator | None,
    kappa: float,
    laplacian_op: SparseOperator,
) -> np.ndarray:
    """Collapsed cubic form of the coupled right-hand side (the fast path).

    -0.5 lap(psi) + V0 psi + kappa |phi|^2 (2 psi - phi); agrees with
    shadow_rhs_general(cubic) identically.
    """
    out = -0.5 * (laplacian_op @ psi) + kappa * np.abs(phi) ** 2 * (2.0 * psi - phi)
    if potential_op is not None:
        out = out + potential_op.diagonal().real * psi
    return out


def gpe_rhs(
    psi: np.ndarray,
    potential_op: SparseOperator | None,
    kappa: float,
    laplacian_op: SparseOperator,
) -> np.ndarray:
    """Right-hand side of i d(psi)/dt for the cubic Gross-Pitaevskii model."""
    out = -0.5 * (laplacian_op @ psi) + kappa * np.abs(psi) ** 2 * psi
    if potential_op is not None:
        out = out + potential_op.diagonal().real * psi
    return out


# --- problem configurations ------------------------------------------------

@dataclass(frozen=True)
class GroundStateSpec:
    """Parameters of the energy whose normalized minimizer seeds a run."""

    potential: dict | None
    kappa0: float
    omega: float = 0.0
    sigma: float = 0.01
    energy_tol: float = 1e-10
    max_iter: int = 200000
    seed_phase: bool | None = None  # None: phase factor iff omega != 0

    def to_dict(self) -> dict:
        return {
            "potential": self.potential,
            "kappa0": self.kappa0,
            "omega": self.omega,
            "sigma": self.sigma,
            "energy_tol": self.energy_tol,
            "max_iter": self.max_iter,
            "seed_phase": self.seed_phase,
        }

    @staticmethod
    def from_dict(d: dict) -> "GroundStateSpec":
        return GroundStateSpec(
            potential=d.get("potential"),
            kappa0=float(d["kappa0"]),
            omega=float(d.get("omega", 0.0)),
            sigma=float(d.get("sigma", 0.01)),
            energy_tol=float(d.get("energy_tol", 1e-10)),
            max_iter=int(d.get("max_iter", 200000)),
            seed_phase=d.get("seed_phase"),
        )


@dataclass(frozen=True)
class ProblemConfig:
    """One evolution experiment: domain, potential, interaction, scheme."""

    name: str
    bounds: tuple = ((-6.0, 6.0), (-6.0, 6.0))
    n: int = 121
    potential: dict | None = None
    kappa: float = 0.0
    T: float = 1.0
    tau: float = 2.0 ** -6
    scheme: str = "ds"
    k_order: int = 5
    ground_state: GroundStateSpec | None = None

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if self.T < self.tau:
            raise ValueError("final time T must be at least one step")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.scheme == "ds" and self.k_order not in DISSIPATION_ORDERS:
            raise ValueError(f"dissipation order must be one of {DISSIPATION_ORDERS}")

    def make_grid(self, resolution: int | None = None) -> Grid:
        return build_grid(self.bounds, resolution if resolution is not None else self.n)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "bounds": [list(b) for b in self.bounds],
            "n": self.n,
            "potential": self.potential,
            "kappa": self.kappa,
            "T": self.T,
            "tau": self.tau,
            "scheme": self.scheme,
            "k_order": self.k_order,
            "ground_state": self.ground_state.to_dict() if self.ground_state else None,
        }

    @staticmethod
    def from_dict(d: dict) -> "ProblemConfig":
        gs = d.get("ground_state")
        return ProblemConfig(
            name=d.get("name", "custom"),
            bounds=tuple(tuple(b) for b in d.get("bounds", [[-6.0, 6.0], [-6.0, 6.0]])),
            n=int(d.get("n", 121)),
            potential=d.get("potential"),
            kappa=float(d.get("kappa", 0.0)),
            T=float(d.get("T", 1.0)),
            tau=float(d.get("tau", 2.0 ** -6)),
            scheme=d.get("scheme", "ds"),
            k_order=int(d.get("k_order", 5)),
            ground_state=GroundStateSpec.from_dict(gs) if gs else None,
        )


def build_problem(name: str, **overrides) -> ProblemConfig:
    """The two stock experiments, or a custom config via keyword overrides.

    ``mp1``: anisotropic release of a rotating condensate (kappa=100,
    harmonic (2,1) trap, T=4) seeded by the vortex ground state of the
    isotropic rotating trap (Omega=0.8). ``mp2``: checkerboard potential
    (kappa=20, T=1) seeded by the checkerboard-plus-harmonic ground state
    with kappa0=10.
    """
    if name == "mp1":
        base = ProblemConfig(
            name="mp1",
            potential={"kind": "harmonic", "gamma": [2.0, 1.0]},
            kappa=100.0,
            T=4.0,
            ground_state=GroundStateSpec(
                potential={"kind": "harmonic", "gamma": [1.0, 1.0]},
                kappa0=100.0,
                omega=0.8,
            ),
        )
    elif name == "mp2":
        base = ProblemConfig(
            name="mp2",
            potential={"kind": "checkerboard"},
            kappa=20.0,
            T=1.0,
            ground_state=GroundStateSpec(
                potential={
                    "kind": "sum",
                    "parts": [{"kind": "checkerboard"}, {"kind": "harmonic", "gamma": [1.0, 1.0]}],
                },
                kappa0=10.0,
                omega=0.0,
            ),
        )
    elif name == "custom":
        base = ProblemConfig(name="custom")
    else:
        raise ValueError(f"unknown problem {name!r}")
    if overrides:
        merged = base.to_dict()
        for key, value in overrides.items():
            if key not in merged:
                raise ValueError(f"unknown config field {key!r}")
            merged[key] = value.to_dict() if isinstance(value, GroundStateSpec) else value
        return ProblemConfig.from_dict(merged)
    return base


def load_config(path) -> ProblemConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return ProblemConfig.from_dict(json.load(fh))


def save_config(path, config: ProblemConfig) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def assemble_evolution_operators(config: ProblemConfig, grid: Grid):
    """(laplacian, potential diagonal) for the evolution stage of a config."""
    lap = laplacian(grid)
    pot = potential_diagonal(grid, potential_fn(config.potential))
    return lap, pot
