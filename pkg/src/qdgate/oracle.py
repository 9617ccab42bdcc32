"""Brute-force check of the effective gate model in the full 27-state space.

The full Hamiltonian keeps every spin sector, every single-exciton state
and all multi-exciton states; the drive is taken in the rotating-wave
approximation so the problem is time independent and is propagated
exactly through its eigen-decomposition. Nothing here reuses the
11-state model except for the comparison itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import curve_fit

from .gate import analytic_fidelity, gate_time
from .model import (
    FULL_BASIS,
    FULL_NAMES,
    QUBIT_NAMES,
    SITE_EXCITONS,
    Configuration,
    GateSetup,
    PhysicalParams,
    analytic_eigenstates,
    build_h0,
    drive_operator,
    exciton_number,
    spin_pattern,
)
from .tensorlab import OperatorMatrix, hermitian_eigen
from .units import HBAR

NUMBER = np.diag([float(exciton_number(n)) for n in FULL_NAMES])


def full_h_rwa(params: PhysicalParams, setup: GateSetup) -> OperatorMatrix:
    """Full Hamiltonian in the frame rotating at the laser frequency.

    States with ``n`` excitons are shifted by ``-n omega_l`` and the drive
    ``Omega cos(omega_l t) sum_i (c_i^dag + c_i)`` keeps its co-rotating half.
    """
    d = drive_operator()
    h = build_h0(params, setup).data - setup.omega_l * NUMBER + (params.Omega / 2) * (d + d.T)
    return OperatorMatrix(h, FULL_BASIS)


def product_state() -> np.ndarray:
    """``[(|u> + |d>) / sqrt 2]^3`` in the full basis."""
    psi = np.zeros(27, dtype=complex)
    for q in QUBIT_NAMES:
        psi[FULL_BASIS.index(q)] = 1 / (2 * np.sqrt(2))
    return psi


def target_full() -> np.ndarray:
    psi = product_state()
    psi[FULL_BASIS.index("uuu")] *= -1
    return psi


def auxiliary_full(setup: GateSetup) -> np.ndarray:
    sector = analytic_eigenstates(setup)
    v = np.zeros(27, dtype=complex)
    for site, amp in zip(SITE_EXCITONS, sector.vector(sector.auxiliary)):
        v[FULL_BASIS.index(site)] = amp
    return v


def propagate(h: np.ndarray, psi0: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Exact ``exp(-i H t / hbar) psi0`` for each time; rows are states."""
    eig = hermitian_eigen(h)
    c0 = eig.vectors.conj().T @ psi0
    phases = np.exp(-1j * np.outer(times, eig.values) / HBAR)
    return (phases * c0) @ eig.vectors.T


def verify_alpha_from_overlap(setup: GateSetup) -> float:
    """Character factor as the drive matrix element ``<Psi_s| sum_j c_j^dag |uuu>``."""
    uuu = np.zeros(27)
    uuu[FULL_BASIS.index("uuu")] = 1.0
    return float(abs(auxiliary_full(setup).conj() @ drive_operator() @ uuu))


def _fit_rabi(times: np.ndarray, pop: np.ndarray) -> float:
    """Angular frequency of ``a + b cos(w t + phi)`` fitted to ``pop``."""
    dt = times[1] - times[0]
    n = 16 * len(pop)
    spec = np.abs(np.fft.rfft(pop - pop.mean(), n))
    w0 = 2 * np.pi * np.fft.rfftfreq(n, dt)[np.argmax(spec)]

    def model(t, a, b, w, phi):
        return a + b * np.cos(w * t + phi)

    popt, _ = curve_fit(model, times, pop, p0=[pop.mean(), 0.5 * np.ptp(pop), w0, 0.0])
    return float(abs(popt[2]))


@dataclass
class OracleReport:
    configuration: str
    fidelity_deviation: float
    leakage: float
    rabi_frequency: float  # 1/ps
    alpha_fit: float
    alpha_expected: float
    norm_error: float
    sector_drift: float
    biexciton_population: float
    dark_population: float | None

    @property
    def alpha_error(self) -> float:
        return abs(self.alpha_fit / self.alpha_expected - 1)

    def lines(self) -> list[str]:
        out = [
            f"[{self.configuration}] fidelity deviation vs effective model: {self.fidelity_deviation:.4g}",
            f"[{self.configuration}] max leakage out of qubit states + auxiliary: {self.leakage:.4g}",
            f"[{self.configuration}] Rabi frequency {self.rabi_frequency:.6g} /ps -> alpha = {self.alpha_fit:.6f}"
            f" (expected {self.alpha_expected:.6f}, rel. error {self.alpha_error:.2e})",
            f"[{self.configuration}] norm error {self.norm_error:.2e}, spin-sector drift {self.sector_drift:.2e},"
            f" max multi-exciton population {self.biexciton_population:.2e}",
        ]
        if self.dark_population is not None:
            out.append(f"[{self.configuration}] max population of dark pair Psi2*, Psi3*: {self.dark_population:.2e}")
        return out


def verify_effective_model(
    params: PhysicalParams,
    setup: GateSetup,
    t_max: float | None = None,
    n_samples: int = 4001,
) -> OracleReport:
    """Compare noiseless full-space dynamics with the effective 11-state model.

    ``t_max`` defaults to two gate times.
    """
    t_g = gate_time(params, setup)
    t_max = 2 * t_g if t_max is None else t_max
    times = np.linspace(0.0, t_max, n_samples)
    h = full_h_rwa(params, setup).data
    states = propagate(h, product_state(), times)
    probs = np.abs(states) ** 2

    f_full = np.abs(states @ target_full().conj()) ** 2
    f_eff = analytic_fidelity(times, params, setup)

    qubit_idx = [FULL_BASIS.index(q) for q in QUBIT_NAMES]
    aux = np.abs(states @ auxiliary_full(setup).conj()) ** 2
    leakage = 1 - probs[:, qubit_idx].sum(axis=1) - aux

    # uuu-sector Rabi oscillation; the sector holds 1/8 of the norm
    pop_uuu = 8 * probs[:, FULL_BASIS.index("uuu")]
    w = _fit_rabi(times, pop_uuu)

    sectors = sorted(set(spin_pattern(n) for n in FULL_NAMES))
    sector_pop = np.stack([probs[:, [i for i, n in enumerate(FULL_NAMES) if spin_pattern(n) == s]].sum(axis=1)
                           for s in sectors], axis=1)
    multi = [i for i, n in enumerate(FULL_NAMES) if exciton_number(n) >= 2]

    dark = None
    if setup.configuration is Configuration.RING:
        sector = analytic_eigenstates(setup)
        site_idx = [FULL_BASIS.index(s) for s in SITE_EXCITONS]
        dark_amp = states[:, site_idx] @ sector.bare_to_eigen[:, :2].conj()
        dark = float(np.max(np.sum(np.abs(dark_amp) ** 2, axis=1)))

    return OracleReport(
        configuration=setup.name,
        fidelity_deviation=float(np.max(np.abs(f_full - f_eff))),
        leakage=float(np.max(leakage)),
        rabi_frequency=w,
        alpha_fit=w * HBAR / params.Omega,
        alpha_expected=setup.alpha,
        norm_error=float(np.max(np.abs(probs.sum(axis=1) - 1))),
        sector_drift=float(np.max(np.abs(sector_pop - sector_pop[0]))),
        biexciton_population=float(np.max(probs[:, multi].sum(axis=1))),
        dark_population=dark,
    )


def lab_frame_check(params: PhysicalParams, setup: GateSetup, t_max: float = 0.5) -> float:
    """Largest state difference between the full cosine drive and the RWA.

    The full drive is integrated in the rotating frame, where it adds the
    counter-rotating term ``(Omega / 2)(D e^{2 i omega_l t} + h.c.)``; the
    step size is set by the optical frequency, so keep ``t_max`` at a
    picosecond or less.
    """
    if t_max > 1.0:
        raise ValueError("lab-frame check is limited to t_max <= 1 ps")
    h_rwa = full_h_rwa(params, setup).data
    d = drive_operator()
    w2 = 2 * setup.omega_l / HBAR
    half = params.Omega / 2

    def rhs(t, psi):
        phase = np.exp(1j * w2 * t)
        h = h_rwa + half * (phase * d + np.conj(phase) * d.T)
        return (-1j / HBAR) * (h @ psi)

    psi0 = product_state()
    times = np.linspace(0.0, t_max, 201)
    sol = solve_ivp(rhs, (0.0, t_max), psi0, method="DOP853", t_eval=times, rtol=1e-10, atol=1e-12)
    exact = propagate(h_rwa, psi0, times)
    return float(np.max(np.abs(sol.y.T - exact)))
