"""Dense complex linear algebra substrate.

States, operators, tensor products, partial traces, Schmidt decomposition,
and von Neumann entropy.  All containers are immutable after construction
and validated against the shared tolerance record; every operation is a
pure function, so instances are safe to share between threads.

Dimensions are desk scale (a few thousand at most), so everything is dense
complex128.  No sparse or tensor-network representations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, InvalidStateError
from .tolerances import DEFAULT_TOLS, Tolerances

__all__ = [
    "StateVector",
    "BipartitePureState",
    "SchmidtForm",
    "DensityOperator",
    "UnitaryOperator",
    "tensor",
    "schmidt",
    "partial_trace_env",
    "partial_trace_sys",
    "von_neumann_entropy",
    "apply_local",
    "haar_unitary",
    "random_state_vector",
    "random_bipartite_state",
    "random_density_operator",
]


def _as_complex(arr) -> np.ndarray:
    out = np.asarray(arr, dtype=np.complex128)
    if not np.all(np.isfinite(out)):
        raise InvalidStateError("amplitudes must be finite (no NaN/Inf)")
    return out


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized complex amplitude vector."""

    amps: np.ndarray
    tols: Tolerances = field(default=DEFAULT_TOLS, repr=False)

    def __post_init__(self):
        amps = _as_complex(self.amps)
        if amps.ndim != 1 or amps.size == 0:
            raise InvalidStateError("state vector must be a nonempty 1-d array")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > self.tols.construction:
            raise InvalidStateError(f"state vector norm {norm} is not 1")
        object.__setattr__(self, "amps", _freeze(amps))

    @property
    def dim(self) -> int:
        return self.amps.shape[0]

    def overlap(self, other: StateVector) -> complex:
        """Inner product <self|other>."""
        if other.dim != self.dim:
            raise DimensionMismatchError("overlap needs equal dimensions")
        return complex(np.vdot(self.amps, other.amps))

    @staticmethod
    def basis(dim: int, index: int, tols: Tolerances = DEFAULT_TOLS) -> StateVector:
        amps = np.zeros(dim, dtype=np.complex128)
        amps[index] = 1.0
        return StateVector(amps, tols)


@dataclass(frozen=True, eq=False)
class BipartitePureState:
    """Pure state of system x environment as a dim_sys x dim_env matrix.

    Entry (j, k) is the amplitude on |j>_S |k>_E.  Frobenius norm 1.
    """

    amps: np.ndarray
    tols: Tolerances = field(default=DEFAULT_TOLS, repr=False)

    def __post_init__(self):
        amps = _as_complex(self.amps)
        if amps.ndim != 2 or amps.size == 0:
            raise InvalidStateError("bipartite amplitudes must be a 2-d matrix")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > self.tols.construction:
            raise InvalidStateError(f"bipartite state norm {norm} is not 1")
        object.__setattr__(self, "amps", _freeze(amps))

    @property
    def dim_sys(self) -> int:
        return self.amps.shape[0]

    @property
    def dim_env(self) -> int:
        return self.amps.shape[1]

    def distance(self, other: BipartitePureState) -> float:
        """Euclidean norm of the amplitude difference (global phase counts)."""
        if other.amps.shape != self.amps.shape:
            raise DimensionMismatchError("states live on different spaces")
        return float(np.linalg.norm(self.amps - other.amps))

    @staticmethod
    def product(a: StateVector, b: StateVector,
                tols: Tolerances = DEFAULT_TOLS) -> BipartitePureState:
        """Product state |a>_S |b>_E."""
        return BipartitePureState(np.outer(a.amps, b.amps), tols)


@dataclass(frozen=True, eq=False)
class SchmidtForm:
    """Schmidt data of a bipartite pure state.

    coeffs are nonnegative, sorted descending, with squares summing to 1;
    branch k carries complex weight coeffs[k] * exp(i*phases[k]).  sys_vecs
    and env_vecs hold the orthonormal branch vectors as columns.
    `degenerate` is set when two retained coefficients are closer than the
    decomposition tolerance; the branch basis is then not unique, so
    consumers must compare reconstructions, not bases.
    """

    coeffs: np.ndarray
    phases: np.ndarray
    sys_vecs: np.ndarray
    env_vecs: np.ndarray
    degenerate: bool
    tols: Tolerances = field(default=DEFAULT_TOLS, repr=False)

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=np.float64)
        phases = np.asarray(self.phases, dtype=np.float64)
        sys_vecs = _as_complex(self.sys_vecs)
        env_vecs = _as_complex(self.env_vecs)
        tol = self.tols
        rank = coeffs.shape[0]
        if np.any(coeffs < 0) or np.any(np.diff(coeffs) > tol.decomposition):
            raise InvalidStateError("Schmidt coefficients must be nonnegative, descending")
        if abs(np.sum(coeffs**2) - 1.0) > tol.decomposition:
            raise InvalidStateError("squared Schmidt coefficients must sum to 1")
        for vecs in (sys_vecs, env_vecs):
            gram = vecs.conj().T @ vecs
            if np.max(np.abs(gram - np.eye(rank))) > tol.decomposition:
                raise InvalidStateError("Schmidt branch vectors must be orthonormal")
        object.__setattr__(self, "coeffs", _freeze(coeffs))
        object.__setattr__(self, "phases", _freeze(phases))
        object.__setattr__(self, "sys_vecs", _freeze(sys_vecs))
        object.__setattr__(self, "env_vecs", _freeze(env_vecs))

    @property
    def rank(self) -> int:
        return self.coeffs.shape[0]

    @property
    def sys_basis(self) -> list[StateVector]:
        return [StateVector(self.sys_vecs[:, k], self.tols) for k in range(self.rank)]

    @property
    def env_basis(self) -> list[StateVector]:
        return [StateVector(self.env_vecs[:, k], self.tols) for k in range(self.rank)]

    def branch_amplitudes(self) -> np.ndarray:
        """Complex weight of each branch: coeffs * exp(i*phases)."""
        return self.coeffs * np.exp(1j * self.phases)

    def reconstruct(self) -> BipartitePureState:
        """Sum over branches of coeff_k e^{i phase_k} |s_k>|e_k>."""
        amps = (self.sys_vecs * self.branch_amplitudes()) @ self.env_vecs.T
        return BipartitePureState(amps, self.tols)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, positive semidefinite, unit-trace matrix."""

    matrix: np.ndarray
    tols: Tolerances = field(default=DEFAULT_TOLS, repr=False)

    def __post_init__(self):
        m = _as_complex(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidStateError("density operator must be square")
        tol = self.tols
        if np.max(np.abs(m - m.conj().T)) > tol.construction:
            raise InvalidStateError("density operator must be Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > tol.decomposition:
            raise InvalidStateError(f"density operator trace {tr} is not 1")
        lo = float(np.linalg.eigvalsh(m)[0])
        if lo < -tol.decomposition:
            raise InvalidStateError(f"density operator has eigenvalue {lo} < 0")
        object.__setattr__(self, "matrix", _freeze(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        """Real eigenvalues, ascending."""
        return np.linalg.eigvalsh(self.matrix)

    def distance(self, other: DensityOperator) -> float:
        """Frobenius distance."""
        if other.dim != self.dim:
            raise DimensionMismatchError("operators live on different spaces")
        return float(np.linalg.norm(self.matrix - other.matrix))


@dataclass(frozen=True, eq=False)
class UnitaryOperator:
    """Matrix with U^dagger U = 1 within the decomposition tolerance."""

    matrix: np.ndarray
    tols: Tolerances = field(default=DEFAULT_TOLS, repr=False)

    def __post_init__(self):
        m = _as_complex(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidStateError("unitary must be square")
        dev = np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])))
        if dev > self.tols.decomposition:
            raise InvalidStateError(f"operator fails unitarity by {dev}")
        object.__setattr__(self, "matrix", _freeze(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @staticmethod
    def identity(dim: int, tols: Tolerances = DEFAULT_TOLS) -> UnitaryOperator:
        return UnitaryOperator(np.eye(dim, dtype=np.complex128), tols)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Composite |a> x |b>; index (j, k) flattens to j*b.dim + k."""
    return StateVector(np.kron(a.amps, b.amps), a.tols)


def schmidt(state: BipartitePureState, tol: float | None = None) -> SchmidtForm:
    """Schmidt decomposition via SVD of the amplitude matrix.

    Branch coefficients are the singular values above `tol` (defaults to the
    decomposition tolerance).  Phases are pulled out of the branch vectors so
    that every retained coefficient is real nonnegative and both bases follow
    a largest-component-real-positive convention.
    """
    tols = state.tols
    if tol is None:
        tol = tols.decomposition
    u, s, vh = np.linalg.svd(state.amps, full_matrices=False)
    rank = max(int(np.sum(s > tol)), 1)
    coeffs = s[:rank].astype(np.float64)
    sys_vecs = u[:, :rank].copy()
    env_vecs = vh[:rank, :].T.copy()  # amps = sum_k s_k sys[:,k] env[:,k]^T

    phases = np.zeros(rank)
    for k in range(rank):
        j = int(np.argmax(np.abs(sys_vecs[:, k])))
        ph = np.angle(sys_vecs[j, k])
        sys_vecs[:, k] *= np.exp(-1j * ph)
        env_vecs[:, k] *= np.exp(1j * ph)
        j = int(np.argmax(np.abs(env_vecs[:, k])))
        ph = np.angle(env_vecs[j, k])
        env_vecs[:, k] *= np.exp(-1j * ph)
        phases[k] = ph

    degenerate = bool(rank > 1 and np.any(-np.diff(coeffs) < tol))
    return SchmidtForm(coeffs, phases, sys_vecs, env_vecs, degenerate, tols)


def partial_trace_env(state: BipartitePureState) -> DensityOperator:
    """Reduced operator of the system: Tr_E |Psi><Psi| = A A^dagger."""
    return DensityOperator(state.amps @ state.amps.conj().T, state.tols)


def partial_trace_sys(state: BipartitePureState) -> DensityOperator:
    """Reduced operator of the environment: Tr_S |Psi><Psi| = A^T A^*."""
    return DensityOperator(state.amps.T @ state.amps.conj(), state.tols)


def von_neumann_entropy(rho: DensityOperator) -> float:
    """-sum lambda ln lambda in nats, eigenvalues below 1e-14 dropped.

    Slightly negative eigenvalues within the positivity tolerance are
    clamped to zero (more negative ones are rejected by the constructor).
    """
    lam = rho.eigenvalues()
    lam = np.clip(lam, 0.0, None)
    lam = lam[lam >= 1e-14]
    return float(-np.sum(lam * np.log(lam)))


def apply_local(state: BipartitePureState, u: UnitaryOperator, side: str) -> BipartitePureState:
    """Apply a unitary to one side; "S" multiplies rows, "E" columns."""
    if side == "S":
        if u.dim != state.dim_sys:
            raise DimensionMismatchError(
                f"system unitary dim {u.dim} != {state.dim_sys}")
        amps = u.matrix @ state.amps
    elif side == "E":
        if u.dim != state.dim_env:
            raise DimensionMismatchError(
                f"environment unitary dim {u.dim} != {state.dim_env}")
        amps = state.amps @ u.matrix.T
    else:
        raise ValueError(f"side must be 'S' or 'E', got {side!r}")
    return BipartitePureState(amps, state.tols)


# ---------------------------------------------------------------------------
# seeded random instances
# ---------------------------------------------------------------------------

def haar_unitary(dim: int, rng: np.random.Generator,
                 tols: Tolerances = DEFAULT_TOLS) -> UnitaryOperator:
    """Haar-distributed unitary from QR of a complex Gaussian matrix."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    # fix the R diagonal phases so the distribution is exactly Haar
    d = np.diagonal(r)
    q = q * (d / np.abs(d))
    return UnitaryOperator(q, tols)


def random_state_vector(dim: int, rng: np.random.Generator,
                        tols: Tolerances = DEFAULT_TOLS) -> StateVector:
    z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return StateVector(z / np.linalg.norm(z), tols)


def random_bipartite_state(dim_sys: int, dim_env: int, rng: np.random.Generator,
                           tols: Tolerances = DEFAULT_TOLS) -> BipartitePureState:
    z = rng.standard_normal((dim_sys, dim_env)) + 1j * rng.standard_normal((dim_sys, dim_env))
    return BipartitePureState(z / np.linalg.norm(z), tols)


def random_density_operator(dim: int, rng: np.random.Generator,
                            tols: Tolerances = DEFAULT_TOLS) -> DensityOperator:
    """Mixed state obtained by tracing half of a random pure dilation."""
    state = random_bipartite_state(dim, dim, rng, tols)
    return partial_trace_env(state)
