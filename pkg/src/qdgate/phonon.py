"""Acoustic-phonon bath: form factor, spectral densities and Lindblad channels.

Only longitudinal acoustic phonons with deformation-potential coupling are
modelled. The spectral densities are the closed forms for Gaussian electron
and hole wave functions on the three dots; the dot geometry enters through
interference factors in ``|q| d``. All returned spectral densities carry
energy units (meV) and become rates after division by hbar.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .model import (
    Configuration,
    GateSetup,
    PhysicalParams,
    Transition,
    driven_sector_unitary,
    simulation_basis,
)
from .tensorlab import OperatorMatrix
from .units import G_PER_CM3_TO_INTERNAL, HBAR, K_B


class SpectralClampWarning(UserWarning):
    """A truncated small-|q|d expansion went negative and was clamped at zero."""


class FormFactorConvention(enum.Enum):
    RING = 8 * np.pi**2
    LINE = 2 * np.pi


def thermal_occupation(omega: float, T: float) -> float:
    """Bose-Einstein occupation of a phonon of energy ``omega`` (meV) at ``T`` (K)."""
    if not omega > 0:
        raise ValueError(f"phonon energy must be positive, got {omega}")
    if T < 0:
        raise ValueError(f"temperature must be non-negative, got {T}")
    if T == 0:
        return 0.0
    return float(1.0 / np.expm1(omega / (K_B * T)))


@dataclass(frozen=True)
class FormFactorParams:
    mu: float
    c_s: float
    D_e: float
    D_h: float
    l_e: float
    l_h: float
    convention: FormFactorConvention = FormFactorConvention.RING

    def __post_init__(self):
        for name in ("mu", "c_s", "l_e", "l_h"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def from_params(cls, params: PhysicalParams, configuration: Configuration) -> "FormFactorParams":
        conv = FormFactorConvention.RING if configuration is Configuration.RING else FormFactorConvention.LINE
        return cls(params.mu, params.c_s, params.D_e, params.D_h, params.l_e, params.l_h, conv)


def wavenumber(omega, c_s: float):
    """``|q|`` in 1/nm for a phonon of energy ``omega`` in meV."""
    return np.asarray(omega, dtype=float) / (HBAR * c_s)


def form_factor(omega, p: FormFactorParams):
    """Common factor of all spectral densities, in meV.

    ``G(w) = w^3 / (K mu c_s^5) [D_e exp(-(w l_e / 2 c_s)^2) - D_h exp(-(w l_h / 2 c_s)^2)]^2``
    with ``w = omega / hbar`` the angular frequency and ``K`` fixed by the
    table convention (``8 pi^2`` ring, ``2 pi`` line).
    """
    w = np.asarray(omega, dtype=float) / HBAR
    if np.any(w < 0):
        raise ValueError("omega must be non-negative")
    mu = p.mu * G_PER_CM3_TO_INTERNAL
    bracket = p.D_e * np.exp(-(w * p.l_e / (2 * p.c_s)) ** 2) - p.D_h * np.exp(-(w * p.l_h / (2 * p.c_s)) ** 2)
    out = w**3 * bracket**2 / (p.convention.value * mu * p.c_s**5)
    return out if out.ndim else float(out)


def _one_minus_sinc(y):
    y = np.asarray(y, dtype=float)
    small = np.abs(y) < 1e-3
    ys = np.where(small, 1.0, y)
    return np.where(small, y**2 / 6 - y**4 / 120, 1.0 - np.sin(ys) / ys)


def _interference(branch: str, x):
    if branch == "ring-1":
        return 8 * np.pi * _one_minus_sinc(np.sqrt(3.0) * x)
    if branch == "ring-2":
        return 3 * np.pi * x**2 * (4 - 0.6 * x**2)
    if branch == "ring-3":
        return 3 * np.pi * (12 - 4 * x**2 + 0.6 * x**4)
    if branch == "line-1":
        return 2 * np.sin(x)
    if branch == "line-2":
        return 4 * np.sin(x / 2) ** 2
    if branch == "line-3":
        return 4 * np.cos(x / 2) ** 2
    raise KeyError(f"unknown spectral-density branch {branch!r}")


BRANCHES = {
    Configuration.RING: ("ring-1", "ring-2", "ring-3"),
    Configuration.LINE: ("line-1", "line-2", "line-3"),
}


def _branch_id(setup: GateSetup, branch) -> str:
    if isinstance(branch, (int, np.integer)):
        branch = f"{setup.configuration.value}-{int(branch)}"
    if branch not in BRANCHES[setup.configuration]:
        raise KeyError(f"unknown spectral-density branch {branch!r} for {setup.configuration.value}")
    return branch


def spectral_density(setup: GateSetup, branch, omega, params: PhysicalParams | None = None):
    """Tabulated ``J(omega)`` (meV) for one branch of the setup's configuration.

    ``branch`` is ``1``, ``2``, ``3`` or an id such as ``"ring-2"``.
    Negative values of a truncated expansion are clamped to zero with a
    :class:`SpectralClampWarning`.
    """
    params = params or PhysicalParams()
    branch = _branch_id(setup, branch)
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise ValueError("omega must be positive")
    x = wavenumber(omega, params.c_s) * setup.d
    j = _interference(branch, x) * form_factor(omega, FormFactorParams.from_params(params, setup.configuration))
    if np.any(j < 0):
        warnings.warn(
            f"{branch}: J < 0 at |q|d = {np.max(x):.3g}, outside the expansion's range; clamped to 0",
            SpectralClampWarning,
            stacklevel=2,
        )
        j = np.maximum(j, 0.0)
    return j if j.ndim else float(j)


class ChannelSpec(NamedTuple):
    """One jump ``prefactor |target><source|`` between dressed states.

    Its energy is ``n_vf * V_F + n_half * alpha * Omega / 2``.
    """

    branch: str
    prefactor: float
    target: str
    source: str
    n_vf: float
    n_half: float


_R2 = np.sqrt(2.0)
_R3 = np.sqrt(3.0)

# Frequencies are the dressed-energy gaps of each operator. For the line
# columns the printed table lists the same three first-branch frequencies
# but pairs two of them with the wrong operator; the gaps below are the
# consistent assignment.
CHANNEL_TABLES: dict[tuple[Configuration, Transition], tuple[ChannelSpec, ...]] = {
    (Configuration.RING, Transition.HIGH): (
        ChannelSpec("ring-1", 1 / (2 * _R3), "Phi2", "Phi4", 3, +1),
        ChannelSpec("ring-1", 1 / (2 * _R3), "Phi2", "Phi1", 3, -1),
        ChannelSpec("ring-2", 1 / 6, "Phi3", "Phi4", 3, +1),
        ChannelSpec("ring-2", 1 / 6, "Phi3", "Phi1", 3, -1),
        ChannelSpec("ring-3", 1 / 6, "Phi1", "Phi4", 0, 2),
    ),
    (Configuration.LINE, Transition.LOW): (
        ChannelSpec("line-1", 1 / 4, "Phi1", "Phi3", _R2, +1),
        ChannelSpec("line-1", 1 / 4, "Phi2", "Phi3", _R2, -1),
        ChannelSpec("line-1", 1 / (2 * _R2), "Phi3", "Phi4", _R2, 0),
        ChannelSpec("line-2", 1 / (4 * _R2), "Phi1", "Phi4", 2 * _R2, +1),
        ChannelSpec("line-2", 1 / (4 * _R2), "Phi2", "Phi4", 2 * _R2, -1),
        ChannelSpec("line-3", 1 / 8, "Phi1", "Phi2", 0, 2),
    ),
    (Configuration.LINE, Transition.HIGH): (
        ChannelSpec("line-1", 1 / (2 * _R2), "Phi2", "Phi3", _R2, 0),
        ChannelSpec("line-1", 1 / 4, "Phi3", "Phi4", _R2, +1),
        ChannelSpec("line-1", 1 / 4, "Phi3", "Phi1", _R2, -1),
        ChannelSpec("line-2", 1 / (4 * _R2), "Phi2", "Phi4", 2 * _R2, +1),
        ChannelSpec("line-2", 1 / (4 * _R2), "Phi2", "Phi1", 2 * _R2, -1),
        ChannelSpec("line-3", 1 / 8, "Phi1", "Phi4", 0, 2),
    ),
}


@dataclass(frozen=True)
class PhononChannel:
    label: str
    branch: str
    prefactor: float
    omega: float
    J: float
    N: float
    L: OperatorMatrix

    @property
    def emission_rate(self) -> float:
        """Downward rate ``J (N + 1) |prefactor|^2 / hbar`` in 1/ps."""
        return self.J * (self.N + 1) * self.prefactor**2 / HBAR

    @property
    def absorption_rate(self) -> float:
        return self.J * self.N * self.prefactor**2 / HBAR


def channel_specs(setup: GateSetup) -> tuple[ChannelSpec, ...]:
    return CHANNEL_TABLES[(setup.configuration, setup.transition)]


def dressed_jump(setup: GateSetup, target: str, source: str, coeff: float = 1.0) -> OperatorMatrix:
    """``coeff |target><source|`` for dressed states, in the simulation basis."""
    u = driven_sector_unitary(setup)
    n_spec = u.shape[0] - 4
    t = u[:, n_spec + int(target[-1]) - 1]
    s = u[:, n_spec + int(source[-1]) - 1]
    return OperatorMatrix(coeff * np.outer(t, s.conj()), simulation_basis(setup))


def build_channels(params: PhysicalParams, setup: GateSetup, T: float | None = None) -> list[PhononChannel]:
    """All phonon Lindblad channels for the setup at temperature ``T`` (K).

    ``T`` defaults to ``params.T``.
    """
    T = params.T if T is None else T
    half = setup.alpha * params.Omega / 2
    out = []
    for spec in channel_specs(setup):
        omega = spec.n_vf * params.V_F + spec.n_half * half
        out.append(PhononChannel(
            label=f"{spec.branch}:{spec.target}<-{spec.source}",
            branch=spec.branch,
            prefactor=spec.prefactor,
            omega=omega,
            J=spectral_density(setup, spec.branch, omega, params),
            N=thermal_occupation(omega, T),
            L=dressed_jump(setup, spec.target, spec.source, spec.prefactor),
        ))
    return out
