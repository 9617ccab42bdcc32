"""Master equation on the 11-state simulation basis and its integration.

    d rho / dt = -i/hbar [H, rho]
                 + Gamma/hbar sum_i D[sigma_i] rho
                 + sum_k J_k/hbar ((N_k + 1) D[L_k] rho + N_k D[L_k^dag] rho)

Every rate is an energy in meV divided by hbar exactly once, here.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .model import GateSetup, PhysicalParams, analytic_eigenstates, rotating_frame_hamiltonian, simulation_basis
from .phonon import PhononChannel, build_channels
from .tensorlab import (
    BasisError,
    IntegrationError,
    OperatorMatrix,
    Superoperator,
    dissipator,
    dissipator_superop,
    hamiltonian_superop,
    rk4_evolve,
)
from .units import HBAR


class NoiseMode(enum.Enum):
    NONE = "none"
    SPONTANEOUS = "spontaneous"
    FULL = "full"


def sigma_minus_operators(setup: GateSetup) -> list[OperatorMatrix]:
    """Per-dot exciton lowering ``|u><X|_i`` restricted to the simulation basis.

    An eigenstate ``Psi_k = sum_j U[j, k] c_j^dag |uuu>`` is sent to
    ``U[i, k] |Psi1>`` by the lowering operator of dot ``i``.
    """
    sector = analytic_eigenstates(setup)
    basis = simulation_basis(setup)
    i1 = basis.index("Psi1")
    out = []
    for i in range(3):
        m = np.zeros((len(basis), len(basis)), dtype=complex)
        for k, label in enumerate(sector.labels[1:]):
            m[i1, basis.index(label)] = sector.bare_to_eigen[i, k]
        out.append(OperatorMatrix(m, basis))
    return out


def spontaneous_superop(params: PhysicalParams, setup: GateSetup) -> Superoperator:
    basis = simulation_basis(setup)
    m = sum(dissipator_superop(s.data) for s in sigma_minus_operators(setup))
    return Superoperator((params.Gamma / HBAR) * m, basis)


@dataclass(frozen=True)
class LindbladModel:
    """Hamiltonian plus jump operators with their rates (1/ps)."""

    hamiltonian: OperatorMatrix
    jumps: tuple[tuple[float, OperatorMatrix], ...]
    channels: tuple[PhononChannel, ...] = ()

    def __post_init__(self):
        for _, op in self.jumps:
            if op.basis != self.hamiltonian.basis:
                raise BasisError(f"channel basis {op.basis.names} does not match {self.hamiltonian.basis.names}")

    @property
    def basis(self):
        return self.hamiltonian.basis

    def superoperator(self) -> Superoperator:
        m = hamiltonian_superop(self.hamiltonian.data, HBAR)
        for rate, op in self.jumps:
            if rate:
                m = m + rate * dissipator_superop(op.data)
        return Superoperator(m, self.basis)

    def __call__(self, rho: OperatorMatrix) -> OperatorMatrix:
        """Direct matrix form, independent of the vectorised superoperator."""
        h = self.hamiltonian
        out = (h @ rho - rho @ h) * (-1j / HBAR)
        for rate, op in self.jumps:
            if rate:
                out = out + dissipator(op, rho) * rate
        return out


def channel_jumps(ch: PhononChannel) -> list[tuple[float, OperatorMatrix]]:
    """Emission ``J (N + 1) D[L]`` and absorption ``J N D[L^dag]``, rates in 1/ps."""
    return [(ch.J * (ch.N + 1) / HBAR, ch.L), (ch.J * ch.N / HBAR, ch.L.dag())]


def lindblad_model(
    params: PhysicalParams,
    setup: GateSetup,
    mode: NoiseMode | str = NoiseMode.FULL,
    T: float | None = None,
) -> LindbladModel:
    mode = NoiseMode(mode)
    h = rotating_frame_hamiltonian(params, setup)
    jumps: list[tuple[float, OperatorMatrix]] = []
    channels: list[PhononChannel] = []
    if mode is not NoiseMode.NONE:
        jumps += [(params.Gamma / HBAR, s) for s in sigma_minus_operators(setup)]
    if mode is NoiseMode.FULL:
        channels = build_channels(params, setup, T)
        for ch in channels:
            jumps += channel_jumps(ch)
    return LindbladModel(h, tuple(jumps), tuple(channels))


def lindblad_rhs(
    params: PhysicalParams,
    setup: GateSetup,
    mode: NoiseMode | str = NoiseMode.FULL,
    T: float | None = None,
) -> Superoperator:
    """Vectorised right-hand side of the master equation (units 1/ps)."""
    return lindblad_model(params, setup, mode, T).superoperator()


@dataclass
class EvolutionResult:
    times: np.ndarray
    states: list
    monitors: dict = field(default_factory=dict)
    error: str | None = None
    first_bad_step: int | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def validate_density(rho: OperatorMatrix, tol: float = 1e-10) -> None:
    if abs(rho.trace() - 1) > tol:
        raise ValueError(f"density matrix trace {rho.trace():.12g} != 1")
    if not rho.is_hermitian(1e-10):
        raise ValueError("density matrix is not Hermitian")
    lam = np.linalg.eigvalsh(rho.data)
    if lam[0] < -tol:
        raise ValueError(f"density matrix has negative eigenvalue {lam[0]:.3e}")


def evolve(
    params: PhysicalParams,
    setup: GateSetup,
    mode: NoiseMode | str,
    rho0: OperatorMatrix,
    t_max: float,
    dt: float,
    *,
    T: float | None = None,
    sample_every: int = 1,
    positivity_every: int = 50,
    positivity_tol: float = 1e-6,
) -> EvolutionResult:
    """Integrate the master equation from ``rho0`` over ``[0, t_max]`` ps.

    Monitors recorded per sample: ``trace_deviation``, ``min_eigenvalue``,
    ``purity``, ``hermiticity`` (anti-Hermitian residue before
    re-symmetrisation) and ``step_error``. A monitor violation returns the
    partial trajectory with ``error`` set instead of raising.
    """
    validate_density(rho0)
    rhs = lindblad_rhs(params, setup, mode, T)
    if rho0.basis != rhs.basis:
        raise BasisError(f"initial state basis {rho0.basis.names} does not match {rhs.basis.names}")

    def positivity(step, t, mat):
        if step % positivity_every == 0:
            lam = np.linalg.eigvalsh(mat)[0]
            if lam < -positivity_tol:
                raise IntegrationError(f"negative eigenvalue {lam:.3e}", step)

    error, bad = None, None
    try:
        traj = rk4_evolve(rhs, rho0, (0.0, t_max), dt, sample_every=sample_every, monitor=positivity)
    except IntegrationError as exc:
        traj, error, bad = exc.partial, str(exc), exc.step

    stack = np.array([s.data for s in traj.states])
    monitors = {
        "trace_deviation": np.abs(np.trace(stack, axis1=1, axis2=2) - 1),
        "min_eigenvalue": np.linalg.eigvalsh(stack)[:, 0],
        "purity": np.real(np.einsum("kij,kji->k", stack, stack)),
        "hermiticity": traj.hermiticity_residuals,
        "step_error": traj.error_estimates,
    }
    return EvolutionResult(traj.times, traj.states, monitors, error, bad)
