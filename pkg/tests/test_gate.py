import numpy as np
import pytest

from qdgate.dynamics import NoiseMode
from qdgate.gate import (
    GateScenario,
    analytic_fidelity,
    fidelity,
    fig2_presets,
    first_maximum_time,
    gate_time,
    initial_state,
    run_scenario,
    target_state,
    turning_points,
    window_max,
)
from qdgate.model import Configuration, GateSetup, PhysicalParams, Transition
from qdgate.tensorlab import purity

P = PhysicalParams()
RING = GateSetup.create("ring")
LINE_LOW = GateSetup.create("line", "low")
LINE_HIGH = GateSetup.create("line", "high")
SETUPS = [RING, LINE_LOW, LINE_HIGH]


class TestStates:
    def test_initial_state_is_pure(self):
        rho = initial_state()
        assert rho.trace() == pytest.approx(1)
        assert purity(rho) == pytest.approx(1)

    def test_initial_populations(self):
        rho = initial_state(RING)
        for lab in rho.basis.names[:8]:
            assert rho.element(lab, lab).real == pytest.approx(1 / 8)
        for lab in ("Psi2*", "Psi3*", "Psi4"):
            assert rho.element(lab, lab) == 0

    def test_target(self):
        psi_f = target_state(RING)
        assert np.vdot(psi_f, psi_f).real == pytest.approx(1)
        psi_i = np.sqrt(np.diag(initial_state(RING).data).real)
        assert np.vdot(psi_f, psi_i).real == pytest.approx(0.75)
        assert fidelity(initial_state(RING), psi_f) == pytest.approx(0.5625)
        assert psi_f[initial_state(RING).basis.index("Psi1")].real < 0

    def test_fidelity_rejects_complex_expectation(self):
        rho = initial_state(RING).data.copy()
        rho[0, 1] += 1e-6j  # no longer Hermitian
        with pytest.raises(ValueError, match="imaginary"):
            fidelity(rho, target_state(RING))


class TestGateTime:
    def test_values(self):
        assert gate_time(P, RING) == pytest.approx(2 * np.pi * 0.6582119569 / (np.sqrt(3) * 0.1))
        assert gate_time(P, RING) == pytest.approx(23.877, abs=1e-3)
        assert gate_time(P, LINE_LOW) == pytest.approx(141.20, abs=0.01)
        assert gate_time(P, LINE_HIGH) == pytest.approx(24.226, abs=1e-3)

    def test_zero_drive(self):
        with pytest.raises(ValueError):
            gate_time(P.with_(Omega=0.0), RING)


class TestAnalyticFidelity:
    @pytest.mark.parametrize("setup", SETUPS, ids=lambda s: s.name)
    def test_landmarks(self, setup):
        t_g = gate_time(P, setup)
        assert analytic_fidelity(0.0, P, setup) == pytest.approx(0.5625)
        assert analytic_fidelity(t_g, P, setup) == pytest.approx(1.0)
        assert analytic_fidelity(t_g / 2, P, setup) == pytest.approx(0.765625)


class TestRunScenario:
    @pytest.mark.parametrize("setup", SETUPS, ids=lambda s: s.name)
    def test_noiseless_matches_oracle(self, setup):
        s = GateScenario(setup, P, NoiseMode.NONE, t_max=2 * gate_time(P, setup))
        tr = run_scenario(s)
        assert np.max(np.abs(tr.fidelity - analytic_fidelity(tr.times, P, setup))) <= 1e-6

    def test_line_low_zero_temperature_is_spontaneous_limited(self):
        t_max = 2 * gate_time(P, LINE_LOW)
        full = run_scenario(GateScenario(LINE_LOW, P, NoiseMode.FULL, 0.0, t_max=t_max))
        spont = run_scenario(GateScenario(LINE_LOW, P, NoiseMode.SPONTANEOUS, t_max=t_max))
        assert np.max(np.abs(full.fidelity - spont.fidelity)) <= 0.02

    def test_ring_damping_grows_with_temperature(self):
        t_g = gate_time(P, RING)
        f = []
        for T in (0.0, 10.0, 20.0):
            tr = run_scenario(GateScenario(RING, P, NoiseMode.FULL, T, t_max=1.2 * t_g))
            f.append(np.interp(t_g, tr.times, tr.fidelity))
        assert f[0] > f[1] or np.isclose(f[0], f[1], atol=1e-3)
        peaks = [window_max(*_traj(RING, T)) for T in (0.0, 10.0, 20.0)]
        assert peaks[0] > peaks[1] > peaks[2]

    def test_fidelity_bounds(self):
        for s in fig2_presets()[:5]:
            tr = run_scenario(s)
            assert np.all(tr.fidelity >= 0) and np.all(tr.fidelity <= 1 + 1e-9)

    def test_default_grid(self):
        s = GateScenario(RING, P, NoiseMode.NONE)
        assert s.resolved_t_max == pytest.approx(2.5 * gate_time(P, RING))
        assert s.resolved_dt == pytest.approx(gate_time(P, RING) / 2000)

    def test_invalid_scenario(self):
        with pytest.raises(ValueError):
            GateScenario(RING, P, NoiseMode.NONE, t_max=-1.0)


def _traj(setup, T):
    t_g = gate_time(P, setup)
    tr = run_scenario(GateScenario(setup, P, NoiseMode.FULL, T, t_max=2 * t_g))
    return tr.times, tr.fidelity, 0.0, 2 * t_g


class TestPresets:
    def test_count(self):
        assert len(fig2_presets()) == 15

    def test_panels(self):
        presets = fig2_presets()
        a = [s for s in presets if s.panel == "a"]
        c = [s for s in presets if s.panel == "c"]
        assert {s.setup.configuration for s in a} == {Configuration.RING}
        assert {s.setup.transition for s in a} == {Transition.HIGH}
        assert sorted(s.T for s in c if s.mode is NoiseMode.FULL) == [0, 5, 10]
        assert all(s.params.Omega == 0.1 for s in presets)

    def test_names_unique(self):
        names = [s.name for s in fig2_presets()]
        assert len(set(names)) == 15


class TestAnalysis:
    def test_first_maximum_refined(self):
        t = np.linspace(0, 10, 101)
        y = -((t - 3.33) ** 2)
        assert first_maximum_time(t, y) == pytest.approx(3.33, abs=1e-9)

    def test_turning_points_of_analytic_curve(self):
        t_g = gate_time(P, RING)
        t = np.linspace(0, 2.5 * t_g, 5001)
        assert turning_points(analytic_fidelity(t, P, RING)) == 2
        assert turning_points(np.full_like(t, 0.7)) == 0
