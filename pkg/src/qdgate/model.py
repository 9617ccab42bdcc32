"""Three coupled quantum dots: parameters, geometry and Hamiltonians.

Each dot carries an electron spin, down (``d``) or up (``u``). A sigma+
pulse can only create a trion ``X`` on a spin-up dot, so the per-dot
Hilbert space is ``{d, u, X}`` and the full space has 27 states. The
driven sector is the ``uuu`` configuration; the other seven qubit
configurations are spectators that stay off resonance.
"""

from __future__ import annotations

import enum
import itertools
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .tensorlab import Basis, OperatorMatrix

SQRT2 = np.sqrt(2.0)
SQRT3 = np.sqrt(3.0)


class HierarchyWarning(UserWarning):
    """Parameters violate Omega << V_F << V_xx."""


class Configuration(enum.Enum):
    RING = "ring"
    LINE = "line"


class Transition(enum.Enum):
    HIGH = "high"
    LOW = "low"


@dataclass(frozen=True)
class PhysicalParams:
    """Material and drive constants in internal units.

    Energies are meV, lengths nm, velocities nm/ps, density g/cm^3 and the
    temperature K. Defaults are the InAs/GaAs values used for the gate;
    the deformation potentials are literature values for GaAs, because the
    gate model itself does not fix them.
    """

    omega_a: float = 1100.0
    V_F: float = 0.85
    V_xx: float = 5.0
    Omega: float = 0.1
    Gamma: float = 0.0016
    l_e: float = 2.16
    l_h: float = 1.44
    mu: float = 5.3
    c_s: float = 4.8
    D_e: float = -14600.0
    D_h: float = -4800.0
    T: float = 0.0

    def __post_init__(self):
        for name in ("omega_a", "V_F", "V_xx", "l_e", "l_h", "mu", "c_s"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.Omega < 0:
            raise ValueError(f"Omega must be non-negative, got {self.Omega}")
        if self.Gamma < 0:
            raise ValueError(f"Gamma must be non-negative, got {self.Gamma}")
        if self.T < 0:
            raise ValueError(f"T must be non-negative, got {self.T}")
        for name in self.__dataclass_fields__:
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        for msg in self.hierarchy_warnings():
            warnings.warn(msg, HierarchyWarning, stacklevel=3)

    def hierarchy_warnings(self) -> list[str]:
        out = []
        if self.Omega > self.V_F / 3:
            out.append(f"hierarchy warning: Omega = {self.Omega} meV is not << V_F = {self.V_F} meV")
        if self.V_F > self.V_xx / 3:
            out.append(f"hierarchy warning: V_F = {self.V_F} meV is not << V_xx = {self.V_xx} meV")
        return out

    def with_(self, **changes) -> "PhysicalParams":
        return replace(self, **changes)


def character_factor(configuration: Configuration, transition: Transition) -> float:
    """Collective enhancement of the Rabi coupling to the auxiliary state."""
    configuration, transition = Configuration(configuration), Transition(transition)
    if configuration is Configuration.RING:
        if transition is Transition.LOW:
            raise ValueError("transition not available for ring: only the high level is bright")
        return SQRT3
    if transition is Transition.LOW:
        return 1.0 - SQRT2 / 2
    return 1.0 + SQRT2 / 2


RING_RADIUS = SQRT3  # nm, centre to dot
LINE_SPACING = 3.0  # nm, neighbouring dots


def dot_positions(configuration: Configuration, d: float) -> np.ndarray:
    if configuration is Configuration.RING:
        return np.array([
            [-d / 2, -SQRT3 * d / 2, 0.0],
            [d, 0.0, 0.0],
            [-d / 2, SQRT3 * d / 2, 0.0],
        ])
    return np.array([[-d, 0.0, 0.0], [0.0, 0.0, 0.0], [d, 0.0, 0.0]])


def coupled_pairs(positions: np.ndarray, rtol: float = 1e-9) -> tuple[tuple[int, int], ...]:
    """Nearest-neighbour pairs; Foerster coupling to farther dots is dropped."""
    pairs = list(itertools.combinations(range(len(positions)), 2))
    dist = np.array([np.linalg.norm(positions[i] - positions[j]) for i, j in pairs])
    nearest = dist.min()
    return tuple(p for p, r in zip(pairs, dist) if r <= nearest * (1 + rtol))


@dataclass(frozen=True)
class GateSetup:
    configuration: Configuration
    transition: Transition
    alpha: float
    omega_l: float
    dot_positions: np.ndarray = field(repr=False)
    d: float
    pairs: tuple[tuple[int, int], ...]

    @classmethod
    def create(
        cls,
        configuration: Configuration | str = Configuration.RING,
        transition: Transition | str = Transition.HIGH,
        params: PhysicalParams | None = None,
        ring_d_meaning: str = "radius",
    ) -> "GateSetup":
        """Build a setup with the laser tuned to the auxiliary state.

        For the ring, ``ring_d_meaning`` chooses which length enters the
        spectral densities as ``d``: ``"radius"`` (centre to dot, sqrt(3) nm)
        or ``"spacing"`` (dot to dot, 3 nm). The dot coordinates are the same
        either way.
        """
        params = params or PhysicalParams()
        configuration = Configuration(configuration)
        transition = Transition(transition)
        alpha = character_factor(configuration, transition)
        if configuration is Configuration.RING:
            positions = dot_positions(configuration, RING_RADIUS)
            if ring_d_meaning == "radius":
                d = RING_RADIUS
            elif ring_d_meaning == "spacing":
                d = SQRT3 * RING_RADIUS
            else:
                raise ValueError(f"ring_d_meaning must be 'radius' or 'spacing', got {ring_d_meaning!r}")
            omega_l = params.omega_a + 2 * params.V_F
        else:
            positions = dot_positions(configuration, LINE_SPACING)
            d = LINE_SPACING
            sign = 1.0 if transition is Transition.HIGH else -1.0
            omega_l = params.omega_a + sign * SQRT2 * params.V_F
        positions.setflags(write=False)
        return cls(configuration, transition, alpha, omega_l, positions, d, coupled_pairs(positions))

    @property
    def name(self) -> str:
        if self.configuration is Configuration.RING:
            return "ring"
        return f"line-{self.transition.value}"


# --- full 27-state space --------------------------------------------------

DOT_STATES = ("d", "u", "X")
FULL_NAMES = tuple("".join(s) for s in itertools.product(DOT_STATES, repeat=3))
FULL_BASIS = Basis(FULL_NAMES)
QUBIT_NAMES = tuple("".join(s) for s in itertools.product("du", repeat=3))


def exciton_number(name: str) -> int:
    return name.count("X")


def spin_pattern(name: str) -> str:
    return name.replace("X", "u")


def drive_operator() -> np.ndarray:
    """``sum_i c_i^dag`` on the full space (creates X on spin-up dots only)."""
    m = np.zeros((27, 27))
    for col, name in enumerate(FULL_NAMES):
        for i, s in enumerate(name):
            if s == "u":
                m[FULL_BASIS.index(name[:i] + "X" + name[i + 1:]), col] = 1.0
    return m


def build_h0(params: PhysicalParams, setup: GateSetup) -> OperatorMatrix:
    """Exciton energy, Foerster hopping and biexciton shift on all 27 states."""
    h = np.zeros((27, 27), dtype=complex)
    for col, name in enumerate(FULL_NAMES):
        n = [s == "X" for s in name]
        h[col, col] = params.omega_a * sum(n) + params.V_xx * sum(n[i] and n[j] for i, j in setup.pairs)
        for i, j in setup.pairs:
            for src, dst in ((i, j), (j, i)):
                # c_dst^dag c_src moves the exciton between two spin-up dots
                if name[src] == "X" and name[dst] == "u":
                    new = list(name)
                    new[src], new[dst] = "u", "X"
                    h[FULL_BASIS.index("".join(new)), col] += params.V_F
    return OperatorMatrix(h, FULL_BASIS)


SITE_EXCITONS = ("Xuu", "uXu", "uuX")


def single_exciton_block(params: PhysicalParams, setup: GateSetup) -> np.ndarray:
    idx = [FULL_BASIS.index(s) for s in SITE_EXCITONS]
    return build_h0(params, setup).data[np.ix_(idx, idx)]


# --- analytic eigenstructure of the uuu sector ------------------------------

@dataclass(frozen=True)
class SectorBasis:
    """Closed-form eigenstates of the driven sector and its dressed basis.

    ``labels`` are ``Psi1`` (no exciton) followed by the three single-exciton
    eigenstates. ``bare_to_eigen`` has the eigenvectors as columns in the
    site basis ``c_1^dag, c_2^dag, c_3^dag``; ``eigen_to_dressed`` has
    ``Phi1..Phi4`` as columns in the ``labels`` basis.
    """

    labels: tuple[str, str, str, str]
    shifts: np.ndarray  # eigen-energy minus omega_a, in units of V_F
    bare_to_eigen: np.ndarray
    eigen_to_dressed: np.ndarray
    auxiliary: str
    dressed_labels: tuple[str, ...] = ("Phi1", "Phi2", "Phi3", "Phi4")

    def energies(self, params: PhysicalParams) -> np.ndarray:
        """Bare energies of the three single-exciton eigenstates (meV)."""
        return params.omega_a + params.V_F * self.shifts

    def vector(self, label: str) -> np.ndarray:
        return self.bare_to_eigen[:, self.labels.index(label) - 1]


def _dressed_map(labels, lower: str, upper_slot: str, aux: str) -> np.ndarray:
    """Columns Phi1..Phi4; Phi1 and ``upper_slot`` form the driven pair."""
    u = np.zeros((4, 4))
    i1, ia = labels.index("Psi1"), labels.index(aux)
    slots = {"Phi1": 0, "Phi2": 1, "Phi3": 2, "Phi4": 3}
    u[i1, 0], u[ia, 0] = 1 / SQRT2, -1 / SQRT2
    up = slots[upper_slot]
    u[i1, up], u[ia, up] = 1 / SQRT2, 1 / SQRT2
    for slot, lab in lower:
        u[labels.index(lab), slots[slot]] = 1.0
    return u


def analytic_eigenstates(setup: GateSetup) -> SectorBasis:
    if setup.configuration is Configuration.RING:
        labels = ("Psi1", "Psi2*", "Psi3*", "Psi4")
        vecs = np.column_stack([
            np.array([1, -2, 1]) / np.sqrt(6),
            -np.array([1, 0, -1]) / SQRT2,
            np.array([1, 1, 1]) / SQRT3,
        ]).astype(complex)
        shifts = np.array([-1.0, -1.0, 2.0])
        dressed = _dressed_map(labels, [("Phi2", "Psi2*"), ("Phi3", "Psi3*")], "Phi4", "Psi4")
        aux = "Psi4"
    else:
        labels = ("Psi1", "Psi2", "Psi3*", "Psi4")
        vecs = np.column_stack([
            np.array([1, -SQRT2, 1]) / 2,
            -np.array([1, 0, -1]) / SQRT2,
            np.array([1, SQRT2, 1]) / 2,
        ]).astype(complex)
        shifts = np.array([-SQRT2, 0.0, SQRT2])
        if setup.transition is Transition.LOW:
            aux = "Psi2"
            dressed = _dressed_map(labels, [("Phi3", "Psi3*"), ("Phi4", "Psi4")], "Phi2", aux)
        else:
            aux = "Psi4"
            dressed = _dressed_map(labels, [("Phi2", "Psi2"), ("Phi3", "Psi3*")], "Phi4", aux)
    return SectorBasis(labels, shifts, vecs, dressed.astype(complex), aux)


def dressed_basis(setup: GateSetup) -> np.ndarray:
    return analytic_eigenstates(setup).eigen_to_dressed


def bright_overlap(setup: GateSetup, label: str) -> complex:
    """``<label| sum_j c_j^dag |uuu>`` from the analytic eigenvector."""
    return complex(np.sum(analytic_eigenstates(setup).vector(label).conj()))


# --- 11-state simulation basis ------------------------------------------------

SPECTATORS = tuple(f"spec:{q}" for q in QUBIT_NAMES if q != "uuu")


def simulation_basis(setup: GateSetup) -> Basis:
    return Basis(SPECTATORS + analytic_eigenstates(setup).labels)


def qubit_label(qubits: str) -> str:
    """Simulation-basis label of a qubit configuration such as ``'udd'``."""
    return "Psi1" if qubits == "uuu" else f"spec:{qubits}"


def rotating_frame_hamiltonian(params: PhysicalParams, setup: GateSetup) -> OperatorMatrix:
    """Driven-sector Hamiltonian in the frame rotating at the laser frequency.

    Spectators and ``Psi1`` sit at zero, each exciton eigenstate at its
    detuning from the laser, and only the resonant pair ``Psi1 <-> Psi_s``
    is coupled, with strength ``alpha * Omega / 2``.
    """
    sector = analytic_eigenstates(setup)
    basis = simulation_basis(setup)
    h = np.zeros((len(basis), len(basis)), dtype=complex)
    for label, energy in zip(sector.labels[1:], sector.energies(params)):
        h[basis.index(label), basis.index(label)] = energy - setup.omega_l
    i1, ia = basis.index("Psi1"), basis.index(sector.auxiliary)
    h[ia, ia] = 0.0
    h[i1, ia] = h[ia, i1] = setup.alpha * params.Omega / 2
    return OperatorMatrix(h, basis)


def driven_sector_unitary(setup: GateSetup) -> np.ndarray:
    """Columns: Phi1..Phi4 embedded in the 11-state simulation basis."""
    n_spec = len(SPECTATORS)
    u = np.eye(n_spec + 4, dtype=complex)
    u[n_spec:, n_spec:] = dressed_basis(setup)
    return u


def dressed_hamiltonian(params: PhysicalParams, setup: GateSetup) -> np.ndarray:
    """4x4 driven-sector block of the rotating-frame Hamiltonian in the Phi basis."""
    n_spec = len(SPECTATORS)
    h = rotating_frame_hamiltonian(params, setup).data[n_spec:, n_spec:]
    u = dressed_basis(setup)
    return u.conj().T @ h @ u
