import warnings

import numpy as np
import pytest

from qdgate.model import (
    FULL_BASIS,
    SITE_EXCITONS,
    SPECTATORS,
    Configuration,
    GateSetup,
    HierarchyWarning,
    PhysicalParams,
    Transition,
    analytic_eigenstates,
    bright_overlap,
    build_h0,
    character_factor,
    dressed_basis,
    dressed_hamiltonian,
    rotating_frame_hamiltonian,
    simulation_basis,
    single_exciton_block,
)
from qdgate.tensorlab import hermitian_eigen

P = PhysicalParams()
CASES = [("ring", "high"), ("line", "low"), ("line", "high")]


@pytest.fixture(params=CASES, ids=lambda c: "-".join(c))
def setup(request):
    return GateSetup.create(*request.param, params=P)


class TestParams:
    def test_defaults(self):
        assert (P.omega_a, P.V_F, P.V_xx, P.Omega, P.Gamma) == (1100.0, 0.85, 5.0, 0.1, 0.0016)
        assert (P.l_e, P.l_h, P.mu, P.c_s) == (2.16, 1.44, 5.3, 4.8)

    @pytest.mark.parametrize("field", ["V_F", "l_e", "mu", "c_s"])
    def test_nonpositive_rejected(self, field):
        with pytest.raises(ValueError, match=field):
            P.with_(**{field: 0.0})

    def test_negative_temperature_rejected(self):
        with pytest.raises(ValueError):
            P.with_(T=-1.0)

    def test_hierarchy_warning(self):
        with pytest.warns(HierarchyWarning, match="Omega"):
            P.with_(Omega=P.V_F)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            PhysicalParams()


class TestCharacterFactor:
    def test_values(self):
        assert character_factor(Configuration.RING, Transition.HIGH) == pytest.approx(1.7320508, abs=1e-7)
        assert character_factor(Configuration.LINE, Transition.LOW) == pytest.approx(0.2928932, abs=1e-7)
        assert character_factor(Configuration.LINE, Transition.HIGH) == pytest.approx(1.7071068, abs=1e-7)

    def test_ring_low_rejected(self):
        with pytest.raises(ValueError, match="transition not available for ring"):
            character_factor("ring", "low")
        with pytest.raises(ValueError, match="transition not available for ring"):
            GateSetup.create("ring", "low")


class TestSetup:
    def test_laser_frequencies(self):
        assert GateSetup.create("ring").omega_l == pytest.approx(1100 + 1.7)
        assert GateSetup.create("line", "low").omega_l == pytest.approx(1100 - np.sqrt(2) * 0.85)
        assert GateSetup.create("line", "high").omega_l == pytest.approx(1100 + np.sqrt(2) * 0.85)

    def test_coupled_pairs_follow_geometry(self):
        assert set(GateSetup.create("ring").pairs) == {(0, 1), (1, 2), (0, 2)}
        assert set(GateSetup.create("line").pairs) == {(0, 1), (1, 2)}

    def test_geometry(self):
        ring = GateSetup.create("ring")
        assert ring.d == pytest.approx(np.sqrt(3))
        np.testing.assert_allclose(np.linalg.norm(ring.dot_positions, axis=1), np.sqrt(3))
        spacing = np.linalg.norm(ring.dot_positions[0] - ring.dot_positions[1])
        assert spacing == pytest.approx(3.0)
        assert GateSetup.create("ring", ring_d_meaning="spacing").d == pytest.approx(3.0)
        line = GateSetup.create("line")
        np.testing.assert_allclose(line.dot_positions[:, 0], [-3, 0, 3])


class TestH0:
    def test_empty_state_is_zero(self, setup):
        h = build_h0(P, setup)
        assert h.element("uuu", "uuu") == 0
        assert h.is_hermitian()

    def test_triple_exciton_ring(self):
        h = build_h0(P, GateSetup.create("ring"))
        assert h.element("XXX", "XXX") == pytest.approx(3 * 1100 + 3 * 5)

    def test_triple_exciton_line(self):
        h = build_h0(P, GateSetup.create("line"))
        assert h.element("XXX", "XXX") == pytest.approx(3 * 1100 + 2 * 5)

    def test_no_hopping_onto_spin_down(self, setup):
        h = build_h0(P, setup)
        assert h.element("dXu", "dXu") == pytest.approx(P.omega_a)
        assert h.element("Xdu", "dXu") == 0
        assert h.element("udX", "dXu") == 0

    def test_spin_pattern_conserved(self, setup):
        from qdgate.model import spin_pattern
        h = build_h0(P, setup).data
        for i, a in enumerate(FULL_BASIS.names):
            for j, b in enumerate(FULL_BASIS.names):
                if h[i, j] != 0:
                    assert spin_pattern(a) == spin_pattern(b)

    def test_ring_level_diagram(self):
        e = hermitian_eigen(single_exciton_block(P, GateSetup.create("ring")))
        np.testing.assert_allclose(e.values, [1100 - 0.85, 1100 - 0.85, 1100 + 1.7], atol=1e-10)

    def test_line_level_diagram(self):
        e = hermitian_eigen(single_exciton_block(P, GateSetup.create("line")))
        s = np.sqrt(2) * 0.85
        np.testing.assert_allclose(e.values, [1100 - s, 1100, 1100 + s], atol=1e-10)


class TestAnalyticEigenstates:
    def test_ring_psi4(self):
        sec = analytic_eigenstates(GateSetup.create("ring"))
        np.testing.assert_allclose(sec.vector("Psi4"), np.ones(3) / np.sqrt(3))

    def test_line_psi2(self):
        sec = analytic_eigenstates(GateSetup.create("line", "low"))
        np.testing.assert_allclose(sec.vector("Psi2"), [0.5, -np.sqrt(2) / 2, 0.5])

    def test_orthonormal(self, setup):
        sec = analytic_eigenstates(setup)
        np.testing.assert_allclose(sec.bare_to_eigen.conj().T @ sec.bare_to_eigen, np.eye(3), atol=1e-12)

    def test_agrees_with_h0(self, setup):
        sec = analytic_eigenstates(setup)
        block = single_exciton_block(P, setup)
        for k, energy in enumerate(sec.energies(P)):
            v = sec.bare_to_eigen[:, k]
            assert np.linalg.norm(block @ v - energy * v) < 1e-10
        # numerical eigenvalues reproduce the analytic level diagram
        np.testing.assert_allclose(hermitian_eigen(block).values, np.sort(sec.energies(P)), atol=1e-10)

    def test_ring_antisymmetric_states_are_dark(self):
        setup = GateSetup.create("ring")
        assert bright_overlap(setup, "Psi2*") == pytest.approx(0, abs=1e-15)
        assert bright_overlap(setup, "Psi3*") == pytest.approx(0, abs=1e-15)

    def test_alpha_from_drive_matrix_element(self, setup):
        aux = analytic_eigenstates(setup).auxiliary
        assert abs(bright_overlap(setup, aux)) == pytest.approx(setup.alpha, abs=1e-12)


class TestDressed:
    def test_ring_phi_vectors(self):
        u = dressed_basis(GateSetup.create("ring"))  # rows: Psi1, Psi2*, Psi3*, Psi4
        r = 1 / np.sqrt(2)
        np.testing.assert_allclose(u[:, 0], [r, 0, 0, -r])
        np.testing.assert_allclose(u[:, 1], [0, 1, 0, 0])
        np.testing.assert_allclose(u[:, 2], [0, 0, 1, 0])
        np.testing.assert_allclose(u[:, 3], [r, 0, 0, r])

    def test_unitary(self, setup):
        u = dressed_basis(setup)
        np.testing.assert_allclose(u.conj().T @ u, np.eye(4), atol=1e-12)

    def test_ring_pair_energies_from_two_level_block(self):
        setup = GateSetup.create("ring")
        h = rotating_frame_hamiltonian(P, setup)
        basis = h.basis
        idx = [basis.index("Psi1"), basis.index("Psi4")]
        e = hermitian_eigen(h.data[np.ix_(idx, idx)])
        np.testing.assert_allclose(e.values, [-np.sqrt(3) * 0.05, np.sqrt(3) * 0.05], atol=1e-14)

    def test_dressed_hamiltonian_is_diagonal(self, setup):
        hd = dressed_hamiltonian(P, setup)
        assert np.max(np.abs(hd - np.diag(np.diag(hd)))) < 1e-14


class TestRotatingFrame:
    def test_ring_coupling(self):
        h = rotating_frame_hamiltonian(P, GateSetup.create("ring"))
        assert h.element("Psi1", "Psi4") == pytest.approx(0.0866, abs=1e-4)
        assert h.element("Psi1", "Psi4") == pytest.approx(np.sqrt(3) * 0.1 / 2, abs=1e-15)

    def test_line_low_coupling(self):
        h = rotating_frame_hamiltonian(P, GateSetup.create("line", "low"))
        assert h.element("Psi1", "Psi2") == pytest.approx(0.01464, abs=1e-5)

    def test_spectators_at_zero(self, setup):
        h = rotating_frame_hamiltonian(P, setup)
        for s in SPECTATORS:
            i = h.basis.index(s)
            assert np.all(h.data[i] == 0) and np.all(h.data[:, i] == 0)

    @pytest.mark.parametrize("case,expected", [
        (("ring", "high"), {"Psi2*": -3, "Psi3*": -3, "Psi4": 0}),
        (("line", "low"), {"Psi2": 0, "Psi3*": np.sqrt(2), "Psi4": 2 * np.sqrt(2)}),
        (("line", "high"), {"Psi2": -2 * np.sqrt(2), "Psi3*": -np.sqrt(2), "Psi4": 0}),
    ])
    def test_detunings(self, case, expected):
        h = rotating_frame_hamiltonian(P, GateSetup.create(*case))
        for lab, units in expected.items():
            assert h.element(lab, lab).real == pytest.approx(units * 0.85, abs=1e-10)

    def test_basis_layout(self, setup):
        b = simulation_basis(setup)
        assert len(b) == 11
        assert b.names[:7] == SPECTATORS
        assert "spec:uuu" not in b.names

    @pytest.mark.parametrize("case,gaps", [
        (("ring", "high"), {("Phi4", "Phi2"): "3VF+", ("Phi1", "Phi2"): "3VF-", ("Phi4", "Phi1"): "aO"}),
        (("line", "low"), {("Phi3", "Phi1"): "r2VF+", ("Phi3", "Phi2"): "r2VF-", ("Phi4", "Phi3"): "r2VF",
                           ("Phi4", "Phi1"): "2r2VF+", ("Phi4", "Phi2"): "2r2VF-", ("Phi2", "Phi1"): "aO"}),
        (("line", "high"), {("Phi4", "Phi3"): "r2VF+", ("Phi3", "Phi2"): "r2VF", ("Phi1", "Phi3"): "r2VF-",
                            ("Phi4", "Phi2"): "2r2VF+", ("Phi1", "Phi2"): "2r2VF-", ("Phi4", "Phi1"): "aO"}),
    ])
    def test_dressed_gaps_match_tabulated_frequencies(self, case, gaps):
        setup = GateSetup.create(*case)
        e = np.real(np.diag(dressed_hamiltonian(P, setup)))
        half = setup.alpha * P.Omega / 2
        vf = P.V_F
        value = {"3VF+": 3 * vf + half, "3VF-": 3 * vf - half, "aO": 2 * half,
                 "r2VF+": np.sqrt(2) * vf + half, "r2VF-": np.sqrt(2) * vf - half, "r2VF": np.sqrt(2) * vf,
                 "2r2VF+": 2 * np.sqrt(2) * vf + half, "2r2VF-": 2 * np.sqrt(2) * vf - half}
        for (hi, lo), key in gaps.items():
            assert e[int(hi[-1]) - 1] - e[int(lo[-1]) - 1] == pytest.approx(value[key], abs=1e-10)


def test_site_exciton_labels():
    assert SITE_EXCITONS == ("Xuu", "uXu", "uuX")
