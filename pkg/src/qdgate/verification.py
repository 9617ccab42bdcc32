"""Self-checks behind ``qdgate verify``.

Each check returns a :class:`Check` with a pass flag and a one-line
detail. Expensive preset runs are shared through :class:`PresetRuns`.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .dynamics import LindbladModel, NoiseMode, channel_jumps
from .gate import (
    FidelityTrajectory,
    GateScenario,
    analytic_fidelity,
    fig2_presets,
    first_maximum_time,
    gate_time,
    run_scenario,
    turning_points,
    window_max,
)
from .model import Configuration, GateSetup, PhysicalParams, Transition
from .oracle import verify_effective_model
from .phonon import FormFactorConvention, FormFactorParams, PhononChannel, form_factor, spectral_density, thermal_occupation
from .tensorlab import Basis, OperatorMatrix, Superoperator, rk4_evolve
from .units import HBAR, K_B

CASES = (
    (Configuration.RING, Transition.HIGH),
    (Configuration.LINE, Transition.LOW),
    (Configuration.LINE, Transition.HIGH),
)

# thresholds
ANALYTIC_TOL = 1e-6
RUNTIME_LIMIT = 5.0  # s
GATE_TIME_RTOL = 1e-3
ORACLE_FIDELITY_TOL = 0.02
ORACLE_LEAKAGE_TOL = 0.01
ORACLE_ALPHA_RTOL = 0.02
TRACE_TOL = 1e-6
EIGEN_TOL = 1e-6
HERMITICITY_TOL = 1e-9
SPONTANEOUS_LIMIT_TOL = 0.02
MIN_TURNING_POINTS = 2
GIBBS_RTOL = 1e-4
ORDER_RANGE = (3.7, 4.3)
DT_HALVING_TOL = 1e-7

HORIZON = 4.0  # preset runs span this many gate times


@dataclass
class Check:
    name: str
    passed: bool
    detail: str
    info: list[str] = field(default_factory=list)

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def _setups(params, ring_d_meaning="radius"):
    return [GateSetup.create(c, t, params, ring_d_meaning=ring_d_meaning) for c, t in CASES]


class PresetRuns:
    """The fifteen preset scenarios run over ``HORIZON`` gate times, computed once."""

    def __init__(self, params: PhysicalParams | None = None, ring_d_meaning: str = "radius"):
        self.params = params or PhysicalParams()
        self.ring_d_meaning = ring_d_meaning
        self.scenarios = [s.with_(t_max=HORIZON * s.gate_time) for s in fig2_presets(self.params, ring_d_meaning)]
        self._runs: dict[str, FidelityTrajectory] | None = None
        self._fine: dict[str, FidelityTrajectory] | None = None

    @property
    def runs(self) -> dict[str, FidelityTrajectory]:
        if self._runs is None:
            self._runs = {s.name: run_scenario(s) for s in self.scenarios}
        return self._runs

    @property
    def halved(self) -> dict[str, FidelityTrajectory]:
        """Same runs at half the step, sampled on the original grid."""
        if self._fine is None:
            self._fine = {s.name: run_scenario(s.with_(dt=s.resolved_dt / 2, sample_every=2)) for s in self.scenarios}
        return self._fine

    def panel(self, panel: str) -> list[GateScenario]:
        return [s for s in self.scenarios if s.panel == panel]


# --- individual checks ----------------------------------------------------

def check_analytic_equivalence(params: PhysicalParams) -> Check:
    worst, slowest, info = 0.0, 0.0, []
    for setup in _setups(params):
        t_g = gate_time(params, setup)
        start = time.perf_counter()
        tr = run_scenario(GateScenario(setup, params, NoiseMode.NONE, t_max=2 * t_g))
        elapsed = time.perf_counter() - start
        dev = float(np.max(np.abs(tr.fidelity - analytic_fidelity(tr.times, params, setup))))
        worst, slowest = max(worst, dev), max(slowest, elapsed)
        info.append(f"{setup.name}: max |F - F_analytic| = {dev:.2e}, runtime {elapsed:.2f} s")
    ok = worst <= ANALYTIC_TOL and slowest < RUNTIME_LIMIT
    return Check("noiseless analytic equivalence", ok,
                 f"max deviation {worst:.2e} (<= {ANALYTIC_TOL:g}), slowest case {slowest:.2f} s (< {RUNTIME_LIMIT:g} s)",
                 info)


def check_gate_time(params: PhysicalParams) -> Check:
    worst, info = 0.0, []
    for setup in _setups(params):
        t_g = gate_time(params, setup)
        tr = run_scenario(GateScenario(setup, params, NoiseMode.NONE, t_max=1.5 * t_g))
        t_peak = first_maximum_time(tr.times, tr.fidelity)
        rel = abs(t_peak / t_g - 1)
        worst = max(worst, rel)
        info.append(f"{setup.name}: first maximum at {t_peak:.4f} ps, t_g = {t_g:.4f} ps, rel. error {rel:.2e}")
    return Check("gate time", worst <= GATE_TIME_RTOL, f"worst rel. error {worst:.2e} (<= {GATE_TIME_RTOL:g})", info)


def check_full_space_oracle(params: PhysicalParams) -> Check:
    """Fidelity and leakage bounds at the ring defaults; the Rabi fit for every case."""
    reports = [verify_effective_model(params, s) for s in _setups(params)]
    ring = reports[0]
    alpha_ok = all(r.alpha_error <= ORACLE_ALPHA_RTOL for r in reports)
    ok = ring.fidelity_deviation <= ORACLE_FIDELITY_TOL and ring.leakage <= ORACLE_LEAKAGE_TOL and alpha_ok
    info = [line for r in reports for line in r.lines()]
    detail = (f"ring fidelity deviation {ring.fidelity_deviation:.4f} (<= {ORACLE_FIDELITY_TOL:g}), "
              f"ring leakage {ring.leakage:.4f} (<= {ORACLE_LEAKAGE_TOL:g}), "
              f"worst alpha error {max(r.alpha_error for r in reports):.2e} (<= {ORACLE_ALPHA_RTOL:g})")
    return Check("full-space oracle", ok, detail, info)


def check_conservation(presets: PresetRuns) -> Check:
    trace = max(float(np.max(np.abs(r.trace - 1))) for r in presets.runs.values())
    eig = min(float(np.min(r.min_eigenvalue)) for r in presets.runs.values())
    herm = max(float(np.max(r.hermiticity)) for r in presets.runs.values())
    errors = [f"{k}: {r.error}" for k, r in presets.runs.items() if r.error]
    ok = trace <= TRACE_TOL and eig >= -EIGEN_TOL and herm <= HERMITICITY_TOL and not errors
    return Check("conservation", ok,
                 f"max |tr - 1| {trace:.1e}, min eigenvalue {eig:.1e}, max Hermiticity residual {herm:.1e}",
                 errors)


def check_spontaneous_limit(presets: PresetRuns) -> Check:
    runs = presets.runs
    dev = float(np.max(np.abs(runs["c_full_T0K"].fidelity - runs["c_spontaneous"].fidelity)))
    return Check("line/low at T=0 follows spontaneous-only", dev <= SPONTANEOUS_LIMIT_TOL,
                 f"max deviation {dev:.2e} (<= {SPONTANEOUS_LIMIT_TOL:g})")


def _first_peak(tr: FidelityTrajectory) -> float:
    t_g = tr.scenario.gate_time
    return window_max(tr.times, tr.fidelity, 0.0, 2 * t_g)


def check_temperature_ordering(presets: PresetRuns) -> Check:
    ok, info = True, []
    for panel in ("a", "b", "c"):
        full = sorted((s for s in presets.panel(panel) if s.mode is NoiseMode.FULL), key=lambda s: s.T)
        peaks = [_first_peak(presets.runs[s.name]) for s in full]
        ok &= all(a > b for a, b in zip(peaks, peaks[1:]))
        info.append(f"panel {panel}: " + ", ".join(f"T={s.T:g} K -> {p:.6f}" for s, p in zip(full, peaks)))
    return Check("peak fidelity decreases with temperature", ok, "; ".join(info))


def check_second_peak(presets: PresetRuns) -> Check:
    ok, info = True, []
    for panel in ("a", "b"):
        for s in presets.panel(panel):
            if s.mode is not NoiseMode.FULL:
                continue
            tr = presets.runs[s.name]
            t_g = s.gate_time
            first = window_max(tr.times, tr.fidelity, 0.0, 2 * t_g)
            second = window_max(tr.times, tr.fidelity, 2 * t_g, 4 * t_g)
            ok &= second < first
            info.append(f"{s.name}: first {first:.6f}, second {second:.6f}")
    return Check("no second peak above the first under full noise", ok, f"{len(info)} runs", info)


def check_spontaneous_oscillations(presets: PresetRuns) -> Check:
    ok, info = True, []
    for s in presets.scenarios:
        if s.mode is not NoiseMode.SPONTANEOUS:
            continue
        tr = presets.runs[s.name]
        mask = tr.times <= 2.5 * s.gate_time + 1e-9
        n = turning_points(tr.fidelity[mask])
        ok &= n >= MIN_TURNING_POINTS
        info.append(f"{s.name}: {n} turning points")
    return Check("spontaneous-only curves oscillate", ok,
                 f"turning points over 2.5 t_g (>= {MIN_TURNING_POINTS}): " + ", ".join(info))


def detailed_balance_ratio(omega: float, T: float, J: float = 0.05) -> tuple[float, float]:
    """Steady excited/ground ratio of a two-level phonon channel and its Gibbs value."""
    basis = Basis(("g", "e"))
    h = OperatorMatrix(np.diag([0.0, omega]).astype(complex), basis)
    ch = PhononChannel("two-level", "synthetic", 1.0, omega, J, thermal_occupation(omega, T),
                       OperatorMatrix.ketbra(basis, "g", "e"))
    model = LindbladModel(h, tuple(channel_jumps(ch)))
    relax = J * (2 * ch.N + 1) / HBAR
    t_end = 30.0 / relax
    rho0 = OperatorMatrix.ketbra(basis, "e", "e")
    traj = rk4_evolve(model.superoperator(), rho0, (0.0, t_end), t_end / 3000, sample_every=3000,
                      error_estimate=False)
    p = np.real(np.diag(traj.states[-1].data))
    return float(p[1] / p[0]), float(np.exp(-omega / (K_B * T)))


def check_detailed_balance() -> Check:
    worst, info = 0.0, []
    for omega, T in ((0.5, 10.0), (1.0, 5.0), (2.0, 20.0)):
        sim, gibbs = detailed_balance_ratio(omega, T)
        rel = abs(sim / gibbs - 1)
        worst = max(worst, rel)
        info.append(f"omega={omega:g} meV, T={T:g} K: ratio {sim:.8f}, Gibbs {gibbs:.8f}")
    return Check("detailed balance", worst <= GIBBS_RTOL, f"worst rel. error {worst:.2e} (<= {GIBBS_RTOL:g})", info)


def decay_convergence_order(gamma: float = 0.2, steps: tuple[int, int] = (10, 20)) -> float:
    """Observed RK4 order on ``d p/dt = -gamma/hbar p`` for a decaying two-level system."""
    basis = Basis(("g", "e"))
    l = np.array([[0, 1], [0, 0]], dtype=complex)
    m = (gamma / HBAR) * (np.kron(l, l.conj()) - 0.5 * np.kron(l.conj().T @ l, np.eye(2))
                          - 0.5 * np.kron(np.eye(2), (l.conj().T @ l).T))
    sup = Superoperator(m, basis)
    rho0 = OperatorMatrix.ketbra(basis, "e", "e")
    t_end = 2.0 * HBAR / gamma

    def err(n):
        traj = rk4_evolve(sup, rho0, (0.0, t_end), t_end / n, error_estimate=False)
        pop = np.array([s.data[1, 1].real for s in traj.states])
        return np.max(np.abs(pop - np.exp(-gamma * traj.times / HBAR)))

    return float(np.log2(err(steps[0]) / err(steps[1])))


def check_numerics(presets: PresetRuns) -> Check:
    order = decay_convergence_order()
    worst = 0.0
    for name, coarse in presets.runs.items():
        fine = presets.halved[name]
        worst = max(worst, float(np.max(np.abs(coarse.fidelity - fine.fidelity))))
    lo, hi = ORDER_RANGE
    ok = lo <= order <= hi and worst < DT_HALVING_TOL
    return Check("numerics", ok,
                 f"RK4 order {order:.3f} (in [{lo}, {hi}]), max fidelity change on halving dt {worst:.1e} "
                 f"(< {DT_HALVING_TOL:g})")


def check_spectral_values(params: PhysicalParams) -> Check:
    ring = GateSetup.create("ring", "high", params)
    omega = np.pi * HBAR * params.c_s / (np.sqrt(3) * ring.d)
    g = form_factor(omega, FormFactorParams.from_params(params, Configuration.RING))
    branch = spectral_density(ring, 1, omega, params)
    rel_branch = abs(branch / (8 * np.pi * g) - 1)

    same = FormFactorParams(params.mu, params.c_s, params.D_e, params.D_e, params.l_e, params.l_e)
    grid = np.linspace(0.01, 10.0, 200)
    vanish = float(np.max(np.abs(form_factor(grid, same))))

    p_ring = FormFactorParams.from_params(params, Configuration.RING)
    p_line = FormFactorParams(**{**p_ring.__dict__, "convention": FormFactorConvention.LINE})
    ratio = form_factor(grid, p_ring) / form_factor(grid, p_line)
    rel_ratio = float(np.max(np.abs(ratio * 4 * np.pi - 1)))

    ok = rel_branch <= 1e-12 and vanish == 0.0 and rel_ratio <= 1e-12
    return Check("spectral-density spot values", ok,
                 f"ring branch 1 vs 8 pi G at sqrt3 |q| d = pi: rel. {rel_branch:.1e}; "
                 f"G for identical carriers: {vanish:g}; ring/line ratio vs 1/(4 pi): rel. {rel_ratio:.1e}")


def run_all(params: PhysicalParams | None = None, ring_d_meaning: str = "radius") -> list[Check]:
    params = params or PhysicalParams()
    presets = PresetRuns(params, ring_d_meaning)
    return [
        check_analytic_equivalence(params),
        check_gate_time(params),
        check_full_space_oracle(params),
        check_conservation(presets),
        check_spontaneous_limit(presets),
        check_temperature_ordering(presets),
        check_second_peak(presets),
        check_spontaneous_oscillations(presets),
        check_detailed_balance(),
        check_numerics(presets),
        check_spectral_values(params),
    ]
