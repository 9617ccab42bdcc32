"""Small dense complex linear algebra and a fixed-step RK4 integrator.

Everything here works on matrices of a few dozen rows at most, so the
objects are thin wrappers around ``numpy`` arrays that carry an explicit,
labelled basis. Mixing operators written in different bases is the most
common source of silent errors in this kind of code, hence the checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np

HERMITIAN_RTOL = 1e-12


class BasisError(ValueError):
    """Raised when operators written in different bases are combined."""


class NotHermitianError(ValueError):
    pass


class IntegrationError(RuntimeError):
    """Integration aborted; ``partial`` holds the trajectory up to the failure."""

    def __init__(self, message: str, step: int, partial: "Trajectory | None" = None):
        super().__init__(f"{message} (step {step})")
        self.step = step
        self.partial = partial


class BasisLabel(NamedTuple):
    name: str
    index: int


@dataclass(frozen=True)
class Basis:
    """Ordered, uniquely named basis states."""

    names: tuple[str, ...]

    def __post_init__(self):
        names = tuple(self.names)
        object.__setattr__(self, "names", names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate basis labels in {names}")
        if not names:
            raise ValueError("basis must not be empty")

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self):
        return iter(self.labels)

    @property
    def labels(self) -> tuple[BasisLabel, ...]:
        return tuple(BasisLabel(n, i) for i, n in enumerate(self.names))

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"{name!r} not in basis {self.names}") from None

    def ket(self, name: str) -> np.ndarray:
        v = np.zeros(len(self), dtype=complex)
        v[self.index(name)] = 1.0
        return v


@dataclass(frozen=True)
class OperatorMatrix:
    """A dense complex operator with a labelled basis."""

    data: np.ndarray
    basis: Basis

    def __post_init__(self):
        data = np.array(self.data, dtype=complex)
        if isinstance(self.basis, Basis):
            basis = self.basis
        else:
            basis = Basis(tuple(self.basis))
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise ValueError(f"operator must be square, got shape {data.shape}")
        if data.shape[0] != len(basis):
            raise BasisError(f"dimension {data.shape[0]} does not match basis of length {len(basis)}")
        if not np.all(np.isfinite(data)):
            raise ValueError("operator has non-finite entries")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "basis", basis)

    @classmethod
    def zeros(cls, basis: Basis) -> "OperatorMatrix":
        return cls(np.zeros((len(basis), len(basis))), basis)

    @classmethod
    def projector(cls, vec: np.ndarray, basis: Basis) -> "OperatorMatrix":
        vec = np.asarray(vec, dtype=complex)
        return cls(np.outer(vec, vec.conj()), basis)

    @classmethod
    def ketbra(cls, basis: Basis, a: str, b: str, coeff: complex = 1.0) -> "OperatorMatrix":
        m = np.zeros((len(basis), len(basis)), dtype=complex)
        m[basis.index(a), basis.index(b)] = coeff
        return cls(m, basis)

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def _check(self, other: "OperatorMatrix") -> None:
        if self.basis != other.basis:
            raise BasisError(f"basis mismatch: {self.basis.names} vs {other.basis.names}")

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check(other)
        return OperatorMatrix(self.data + other.data, self.basis)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check(other)
        return OperatorMatrix(self.data - other.data, self.basis)

    def __neg__(self) -> "OperatorMatrix":
        return OperatorMatrix(-self.data, self.basis)

    def __mul__(self, scalar: complex) -> "OperatorMatrix":
        return OperatorMatrix(self.data * scalar, self.basis)

    __rmul__ = __mul__

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        self._check(other)
        return OperatorMatrix(self.data @ other.data, self.basis)

    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self.data.conj().T, self.basis)

    def trace(self) -> complex:
        return complex(np.trace(self.data))

    def element(self, a: str, b: str) -> complex:
        return complex(self.data[self.basis.index(a), self.basis.index(b)])

    def hermiticity_residual(self) -> float:
        return float(np.max(np.abs(self.data - self.data.conj().T)))

    def is_hermitian(self, rtol: float = HERMITIAN_RTOL) -> bool:
        scale = max(float(np.max(np.abs(self.data))), 1e-300)
        return self.hermiticity_residual() <= rtol * scale

    def transform(self, unitary: np.ndarray, basis: Basis) -> "OperatorMatrix":
        """Return ``U^dag A U`` expressed in ``basis``.

        Columns of ``unitary`` are the new basis vectors written in the old basis.
        """
        u = np.asarray(unitary, dtype=complex)
        return OperatorMatrix(u.conj().T @ self.data @ u, basis)


@dataclass(frozen=True)
class EigenDecomposition:
    values: np.ndarray
    vectors: np.ndarray

    def residual(self, a: np.ndarray) -> float:
        return float(np.max(np.linalg.norm(a @ self.vectors - self.vectors * self.values, axis=0)))

    def orthonormality_error(self) -> float:
        v = self.vectors
        return float(np.linalg.norm(v.conj().T @ v - np.eye(v.shape[1])))


def _as_array(a) -> np.ndarray:
    return a.data if isinstance(a, OperatorMatrix) else np.asarray(a, dtype=complex)


def jacobi_eigh(a: np.ndarray, tol: float = 1e-15, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi on the real symmetric embedding ``[[Re, -Im], [Im, Re]]``.

    Each eigenvalue of the n x n Hermitian input appears twice in the 2n x 2n
    embedding; one complex vector is recovered per pair by Gram-Schmidt.
    """
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    m = np.block([[a.real, -a.imag], [a.imag, a.real]])
    size = 2 * n
    v = np.eye(size)
    scale = max(np.linalg.norm(m), 1e-300)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(m, -1) ** 2))
        if off <= tol * scale:
            break
        for p in range(size - 1):
            for q in range(p + 1, size):
                apq = m[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (m[q, q] - m[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                mp, mq = m[:, p].copy(), m[:, q].copy()
                m[:, p] = c * mp - s * mq
                m[:, q] = s * mp + c * mq
                mp, mq = m[p, :].copy(), m[q, :].copy()
                m[p, :] = c * mp - s * mq
                m[q, :] = s * mp + c * mq
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        raise RuntimeError("Jacobi iteration did not converge")

    w = np.diag(m)
    order = np.argsort(w, kind="stable")
    cvecs = v[:n, :] + 1j * v[n:, :]
    values, vectors = [], []
    for k in order:
        x = cvecs[:, k].copy()
        for y in vectors:
            x -= y * (y.conj() @ x)
        nrm = np.linalg.norm(x)
        # the partner of an already accepted vector is i times it and vanishes here
        if nrm < 1e-6:
            continue
        vectors.append(x / nrm)
        values.append(w[k])
        if len(vectors) == n:
            break
    return np.array(values), np.column_stack(vectors)


def hermitian_eigen(a, method: str = "lapack") -> EigenDecomposition:
    """Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.

    ``method="lapack"`` uses ``numpy.linalg.eigh``; ``method="jacobi"`` uses
    :func:`jacobi_eigh`. Both return orthonormal eigenvector columns.
    """
    arr = _as_array(a)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"matrix must be square, got shape {arr.shape}")
    scale = max(float(np.max(np.abs(arr))), 1e-300) if arr.size else 1.0
    resid = float(np.max(np.abs(arr - arr.conj().T))) if arr.size else 0.0
    if resid > HERMITIAN_RTOL * scale:
        raise NotHermitianError(f"matrix is not Hermitian: max|A - A^dag| = {resid:.3e}")
    arr = 0.5 * (arr + arr.conj().T)
    if method == "lapack":
        values, vectors = np.linalg.eigh(arr)
    elif method == "jacobi":
        values, vectors = jacobi_eigh(arr)
    else:
        raise ValueError(f"unknown eigen method {method!r}")
    return EigenDecomposition(np.asarray(values, dtype=float), np.asarray(vectors, dtype=complex))


def commutator(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    return a @ b - b @ a


def dissipator(l: OperatorMatrix, rho: OperatorMatrix) -> OperatorMatrix:
    """``D[L]rho = L rho L^dag - (L^dag L rho + rho L^dag L) / 2``."""
    if l.dim != rho.dim:
        raise BasisError(f"dimension mismatch: {l.dim} vs {rho.dim}")
    l._check(rho)
    L, r = l.data, rho.data
    ldl = L.conj().T @ L
    return OperatorMatrix(L @ r @ L.conj().T - 0.5 * (ldl @ r + r @ ldl), rho.basis)


# Superoperators act on row-major flattened matrices: vec(A X B) = kron(A, B^T) vec(X).

def left_right(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix of ``X -> A X B`` acting on row-major ``vec(X)``."""
    return np.kron(a, b.T)


def hamiltonian_superop(h: np.ndarray, hbar: float = 1.0) -> np.ndarray:
    eye = np.eye(h.shape[0])
    return (-1j / hbar) * (left_right(h, eye) - left_right(eye, h))


def dissipator_superop(l: np.ndarray) -> np.ndarray:
    eye = np.eye(l.shape[0])
    ldl = l.conj().T @ l
    return left_right(l, l.conj().T) - 0.5 * (left_right(ldl, eye) + left_right(eye, ldl))


@dataclass(frozen=True)
class Superoperator:
    """Linear map on operators over a fixed basis, stored as a dense matrix."""

    matrix: np.ndarray
    basis: Basis

    def __call__(self, rho: OperatorMatrix) -> OperatorMatrix:
        if rho.basis != self.basis:
            raise BasisError(f"basis mismatch: {rho.basis.names} vs {self.basis.names}")
        n = len(self.basis)
        return OperatorMatrix((self.matrix @ rho.data.reshape(-1)).reshape(n, n), self.basis)

    def __add__(self, other: "Superoperator") -> "Superoperator":
        if self.basis != other.basis:
            raise BasisError(f"basis mismatch: {self.basis.names} vs {other.basis.names}")
        return Superoperator(self.matrix + other.matrix, self.basis)

    def __mul__(self, scalar: float) -> "Superoperator":
        return Superoperator(self.matrix * scalar, self.basis)

    __rmul__ = __mul__


@dataclass
class Trajectory:
    times: np.ndarray
    states: list
    error_estimates: np.ndarray
    hermiticity_residuals: np.ndarray
    monitors: dict = field(default_factory=dict)


def _rk4_propagator(m: np.ndarray, h: float) -> np.ndarray:
    # For a linear autonomous right-hand side the four RK4 stages collapse to
    # the degree-4 Taylor polynomial of exp(h M).
    hm = h * m
    eye = np.eye(m.shape[0], dtype=complex)
    p = eye.copy()
    term = eye
    for k in range(1, 5):
        term = term @ hm / k
        p = p + term
    return p


def rk4_step(rhs: Callable[[np.ndarray], np.ndarray], y: np.ndarray, h: float) -> np.ndarray:
    k1 = rhs(y)
    k2 = rhs(y + 0.5 * h * k1)
    k3 = rhs(y + 0.5 * h * k2)
    k4 = rhs(y + h * k3)
    return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def rk4_evolve(
    rhs,
    rho0: OperatorMatrix,
    t_span: tuple[float, float],
    dt: float,
    *,
    sample_every: int = 1,
    error_estimate: bool = True,
    trace_tol: float = 1e-6,
    monitor: Callable[[int, float, np.ndarray], None] | None = None,
) -> Trajectory:
    """Integrate ``d rho/dt = rhs(rho)`` with classic fixed-step RK4.

    ``rhs`` is either a :class:`Superoperator` (fast path) or any callable
    mapping an ``OperatorMatrix`` to an ``OperatorMatrix``. The solution is
    advanced with the full step; a second pass with two half steps gives the
    step-doubling estimate of the full step's local error,
    ``16/15 |y_half - y_full|``. After every step
    rho is re-symmetrised. Trace drift beyond ``trace_tol`` or a NaN aborts
    with :class:`IntegrationError`; ``monitor(step, t, rho)`` may raise the
    same error to abort, and receives the partial trajectory on it.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    t0, t1 = t_span
    if t1 < t0:
        raise ValueError("t_span must be increasing")
    n_steps = int(round((t1 - t0) / dt))
    if not np.isclose(n_steps * dt, t1 - t0, rtol=1e-9, atol=1e-12):
        n_steps = int(np.ceil((t1 - t0) / dt))
    n = rho0.dim
    basis = rho0.basis

    if isinstance(rhs, Superoperator):
        if rhs.basis != basis:
            raise BasisError(f"basis mismatch: {rhs.basis.names} vs {basis.names}")
        p_full = _rk4_propagator(rhs.matrix, dt)
        p_half = _rk4_propagator(rhs.matrix, dt / 2)
        p_two_half = p_half @ p_half

        def full(y):
            return p_full @ y

        def doubled(y):
            return p_two_half @ y
    else:
        def f(y):
            return rhs(OperatorMatrix(y.reshape(n, n), basis)).data.reshape(-1)

        def full(y):
            return rk4_step(f, y, dt)

        def doubled(y):
            return rk4_step(f, rk4_step(f, y, dt / 2), dt / 2)

    y = rho0.data.reshape(-1).copy()
    times = [t0]
    states = [rho0]
    errors = [0.0]
    herm = [rho0.hermiticity_residual()]

    def partial():
        return Trajectory(np.array(times), states, np.array(errors), np.array(herm))

    step_err = 0.0
    for step in range(1, n_steps + 1):
        y_new = full(y)
        if error_estimate:
            step_err = float(np.max(np.abs(doubled(y) - y_new))) * 16.0 / 15.0
        mat = y_new.reshape(n, n)
        if not np.all(np.isfinite(mat)):
            raise IntegrationError("non-finite density matrix", step, partial())
        resid = float(np.max(np.abs(mat - mat.conj().T)))
        mat = 0.5 * (mat + mat.conj().T)
        tr = np.trace(mat)
        if abs(tr - 1.0) > trace_tol:
            raise IntegrationError(f"trace drift |tr - 1| = {abs(tr - 1.0):.3e}", step, partial())
        y = mat.reshape(-1)
        t = t0 + step * dt
        if monitor is not None:
            try:
                monitor(step, t, mat)
            except IntegrationError as exc:
                exc.partial = partial()
                raise
        if step % sample_every == 0 or step == n_steps:
            times.append(t)
            states.append(OperatorMatrix(mat, basis))
            errors.append(step_err)
            herm.append(resid)
    return partial()


def purity(rho: OperatorMatrix) -> float:
    return float(np.real(np.trace(rho.data @ rho.data)))


def kron_all(mats: Iterable[np.ndarray]) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (a + a.conj().T)


def random_density(n: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = rank or n
    g = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


__all__: Sequence[str] = [
    "Basis",
    "BasisError",
    "BasisLabel",
    "EigenDecomposition",
    "IntegrationError",
    "NotHermitianError",
    "OperatorMatrix",
    "Superoperator",
    "Trajectory",
    "commutator",
    "dissipator",
    "dissipator_superop",
    "hamiltonian_superop",
    "hermitian_eigen",
    "jacobi_eigh",
    "purity",
    "rk4_evolve",
    "rk4_step",
]
