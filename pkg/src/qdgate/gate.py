"""One-step CPHASE protocol: states, pulse timing, fidelity and presets.

Input state is the uniform superposition of all eight spin configurations;
the ideal output differs only by a sign on ``uuu``. A square pulse of
constant ``Omega`` drives ``uuu`` through a full Rabi cycle on the
auxiliary exciton, which returns it with a minus sign after the gate time.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.signal import find_peaks

from .dynamics import EvolutionResult, NoiseMode, evolve
from .model import QUBIT_NAMES, Configuration, GateSetup, PhysicalParams, Transition, qubit_label, simulation_basis
from .tensorlab import OperatorMatrix
from .units import HBAR

AMPLITUDE = 1 / (2 * np.sqrt(2))


def initial_vector(setup: GateSetup) -> np.ndarray:
    basis = simulation_basis(setup)
    v = np.zeros(len(basis), dtype=complex)
    for q in QUBIT_NAMES:
        v[basis.index(qubit_label(q))] = AMPLITUDE
    return v


def initial_state(setup: GateSetup | None = None) -> OperatorMatrix:
    setup = setup or GateSetup.create()
    return OperatorMatrix.projector(initial_vector(setup), simulation_basis(setup))


def target_state(setup: GateSetup | None = None) -> np.ndarray:
    setup = setup or GateSetup.create()
    v = initial_vector(setup)
    v[simulation_basis(setup).index("Psi1")] *= -1
    return v


def fidelity(rho: OperatorMatrix | np.ndarray, target: np.ndarray, imag_tol: float = 1e-10) -> float:
    """``<target| rho |target>``; a non-negligible imaginary part is an error."""
    data = rho.data if isinstance(rho, OperatorMatrix) else rho
    value = target.conj() @ data @ target
    if abs(value.imag) > imag_tol:
        raise ValueError(f"fidelity has imaginary part {value.imag:.3e}")
    return float(value.real)


def gate_time(params: PhysicalParams, setup: GateSetup) -> float:
    """Pulse length (ps) at which ``uuu`` completes a full Rabi cycle."""
    if params.Omega == 0:
        raise ValueError("gate time is undefined for Omega = 0")
    return 2 * np.pi * HBAR / (setup.alpha * params.Omega)


def analytic_fidelity(t, params: PhysicalParams, setup: GateSetup):
    """Noiseless fidelity ``((7 - cos theta) / 8)^2``, ``theta = alpha Omega t / (2 hbar)``."""
    theta = setup.alpha * params.Omega * np.asarray(t, dtype=float) / (2 * HBAR)
    return ((7 - np.cos(theta)) / 8) ** 2


@dataclass(frozen=True)
class GateScenario:
    setup: GateSetup
    params: PhysicalParams
    mode: NoiseMode
    T: float = 0.0
    t_max: float | None = None
    dt: float | None = None
    panel: str = ""
    curve: str = ""
    sample_every: int = 1

    def __post_init__(self):
        object.__setattr__(self, "mode", NoiseMode(self.mode))
        if self.T < 0:
            raise ValueError("T must be non-negative")
        if self.t_max is not None and not self.t_max > 0:
            raise ValueError("t_max must be positive")
        if self.dt is not None and not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.sample_every < 1:
            raise ValueError("sample_every must be at least 1")

    @property
    def gate_time(self) -> float:
        return gate_time(self.params, self.setup)

    @property
    def resolved_t_max(self) -> float:
        return self.t_max if self.t_max is not None else 2.5 * self.gate_time

    @property
    def resolved_dt(self) -> float:
        return self.dt if self.dt is not None else self.gate_time / 2000

    @property
    def name(self) -> str:
        return f"{self.panel}_{self.curve}" if self.panel else f"{self.setup.name}_{self.curve or self.mode.value}"

    def with_(self, **changes) -> "GateScenario":
        return replace(self, **changes)


@dataclass
class FidelityTrajectory:
    times: np.ndarray
    fidelity: np.ndarray
    trace: np.ndarray
    purity: np.ndarray
    min_eigenvalue: np.ndarray
    hermiticity: np.ndarray
    scenario: GateScenario | None = None
    evolution: EvolutionResult | None = field(default=None, repr=False)
    error: str | None = None


def run_scenario(s: GateScenario, *, keep_states: bool = False) -> FidelityTrajectory:
    rho0 = initial_state(s.setup)
    target = target_state(s.setup)
    res = evolve(s.params, s.setup, s.mode, rho0, s.resolved_t_max, s.resolved_dt, T=s.T,
                 sample_every=s.sample_every)
    stack = np.array([st.data for st in res.states])
    values = np.einsum("i,kij,j->k", target.conj(), stack, target)
    if np.max(np.abs(values.imag)) > 1e-10:
        raise ValueError(f"fidelity has imaginary part {np.max(np.abs(values.imag)):.3e}")
    return FidelityTrajectory(
        times=res.times,
        fidelity=values.real,
        trace=np.real(np.trace(stack, axis1=1, axis2=2)),
        purity=res.monitors["purity"],
        min_eigenvalue=res.monitors["min_eigenvalue"],
        hermiticity=res.monitors["hermiticity"],
        scenario=s,
        evolution=res if keep_states else None,
        error=res.error,
    )


PANELS = {
    "a": (Configuration.RING, Transition.HIGH, (0.0, 10.0, 20.0)),
    "b": (Configuration.LINE, Transition.HIGH, (0.0, 10.0, 20.0)),
    "c": (Configuration.LINE, Transition.LOW, (0.0, 5.0, 10.0)),
}


def fig2_presets(params: PhysicalParams | None = None, ring_d_meaning: str = "radius") -> list[GateScenario]:
    """Fifteen scenarios: three panels, each noiseless, spontaneous-only and full noise at three temperatures."""
    params = params or PhysicalParams()
    out = []
    for panel, (conf, trans, temps) in PANELS.items():
        setup = GateSetup.create(conf, trans, params, ring_d_meaning=ring_d_meaning)
        out.append(GateScenario(setup, params, NoiseMode.NONE, 0.0, panel=panel, curve="noiseless"))
        out.append(GateScenario(setup, params, NoiseMode.SPONTANEOUS, 0.0, panel=panel, curve="spontaneous"))
        for T in temps:
            out.append(GateScenario(setup, params, NoiseMode.FULL, T, panel=panel, curve=f"full_T{T:g}K"))
    return out


# --- trajectory analysis ------------------------------------------------------

def window_max(times: np.ndarray, values: np.ndarray, lo: float, hi: float) -> float:
    mask = (times >= lo) & (times <= hi)
    return float(np.max(values[mask]))


def first_maximum_time(times: np.ndarray, values: np.ndarray) -> float:
    """Time of the first interior local maximum, refined by a parabola through three samples."""
    peaks, _ = find_peaks(values)
    if not len(peaks):
        raise ValueError("no interior maximum")
    k = peaks[0]
    y0, y1, y2 = values[k - 1: k + 2]
    denom = y0 - 2 * y1 + y2
    shift = 0.5 * (y0 - y2) / denom if denom != 0 else 0.0
    return float(times[k] + shift * (times[k + 1] - times[k]))


def turning_points(values: np.ndarray, prominence: float = 0.05) -> int:
    """Interior maxima plus minima whose prominence is at least ``prominence``."""
    highs, _ = find_peaks(values, prominence=prominence)
    lows, _ = find_peaks(-values, prominence=prominence)
    return len(highs) + len(lows)
