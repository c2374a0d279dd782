"""Dense complex linear algebra used by every other module.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. All functions
are pure; inputs are never modified.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
from numpy.typing import ArrayLike

from .errors import InsufficientComplement, NotHermitian, NotUnitary, RankDeficient

__all__ = [
    "ToleranceConfig",
    "DEFAULT_TOL",
    "as_matrix",
    "max_abs",
    "dagger",
    "fix_phases",
    "hermitian_eig",
    "unitary_eig",
    "expm_i",
    "polar_orthonormalize",
    "orthonormal_extension",
]

# components below this modulus are skipped by the phase convention
_PHASE_CUTOFF = 1e-8


@dataclass(frozen=True)
class ToleranceConfig:
    hermiticity_tol: float = 1e-10
    unitarity_tol: float = 1e-10
    rank_tol: float = 1e-10

    def __post_init__(self):
        for name in ("hermiticity_tol", "unitarity_tol", "rank_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


DEFAULT_TOL = ToleranceConfig()


def as_matrix(a: ArrayLike, *, square: bool = False, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D complex array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim == 1:
        m = m[:, None]
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    if square and m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    return m


def max_abs(a: ArrayLike) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its first non-negligible component is real positive."""
    out = np.array(vectors, dtype=complex, copy=True)
    for j in range(out.shape[1]):
        col = out[:, j]
        idx = np.flatnonzero(np.abs(col) > _PHASE_CUTOFF)
        if idx.size:
            z = col[idx[0]]
            out[:, j] = col * (abs(z) / z)
    return out


def _check_hermitian(M: np.ndarray, tol: float) -> None:
    err = max_abs(M - M.conj().T)
    if err > tol:
        raise NotHermitian(f"||M - M^dag||_max = {err:.3e} exceeds {tol:.1e}")


def _check_unitary(U: np.ndarray, tol: float) -> None:
    err = max_abs(U.conj().T @ U - np.eye(U.shape[1]))
    if err > tol:
        raise NotUnitary(f"||U^dag U - I||_max = {err:.3e} exceeds {tol:.1e}")


def hermitian_eig(M: ArrayLike, tol: ToleranceConfig = DEFAULT_TOL):
    """Eigen-decomposition of a Hermitian matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and the
    eigenvectors as orthonormal columns. Within a degenerate eigenspace the
    basis is arbitrary.
    """
    M = as_matrix(M, square=True)
    _check_hermitian(M, tol.hermiticity_tol)
    w, v = np.linalg.eigh(0.5 * (M + M.conj().T))
    return w, fix_phases(v)


def unitary_eig(U: ArrayLike, tol: ToleranceConfig = DEFAULT_TOL):
    """Eigen-decomposition of a unitary matrix via complex Schur form.

    A unitary matrix is normal, so its Schur form is diagonal up to roundoff
    and the Schur vectors are an orthonormal eigenbasis. Eigenvalues are
    returned normalised to unit modulus, sorted by phase in [0, 2pi).
    """
    U = as_matrix(U, square=True)
    _check_unitary(U, tol.unitarity_tol)
    T, Z = la.schur(U, output="complex")
    mu = np.diag(T).copy()
    mu /= np.abs(mu)
    order = np.argsort(np.mod(np.angle(mu), 2 * np.pi), kind="stable")
    return mu[order], fix_phases(Z[:, order])


def expm_i(H: ArrayLike, s: float, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Return exp(-i s H) for Hermitian H, computed from its eigenbasis."""
    H = as_matrix(H, square=True)
    _check_hermitian(H, tol.hermiticity_tol)
    w, v = np.linalg.eigh(0.5 * (H + H.conj().T))
    return (v * np.exp(-1j * s * w)) @ v.conj().T


def polar_orthonormalize(M: ArrayLike, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Nearest matrix with orthonormal columns (polar factor of M)."""
    M = as_matrix(M)
    u, s, vh = np.linalg.svd(M, full_matrices=False)
    if s[-1] <= tol.rank_tol:
        raise RankDeficient(f"smallest singular value {s[-1]:.3e} <= {tol.rank_tol:.1e}")
    return u @ vh


def orthonormal_extension(
    V: ArrayLike,
    pool: ArrayLike,
    count: int | None = None,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> np.ndarray:
    """Orthonormal vectors from ``pool`` lying in the complement of span(V).

    Classical Gram-Schmidt (applied twice) over the pool columns in index
    order. Candidates whose residual norm drops below ``tol.rank_tol`` are
    skipped. Returns a ``d x count`` array; with ``count=None`` every
    independent direction found is returned.

    >>> orthonormal_extension([[1], [0]], np.eye(2)).real
    array([[0.],
           [1.]])
    """
    V = as_matrix(V, name="V")
    pool = as_matrix(pool, name="pool")
    if pool.shape[0] != V.shape[0]:
        raise ValueError(f"pool has {pool.shape[0]} rows, frame has {V.shape[0]}")
    basis = [V[:, j] for j in range(V.shape[1])]
    found = []
    for j in range(pool.shape[1]):
        if count is not None and len(found) == count:
            break
        x = pool[:, j].copy()
        for _ in range(2):
            for b in basis:
                x = x - b * np.vdot(b, x)
        nrm = np.linalg.norm(x)
        if nrm < tol.rank_tol:
            continue
        x = x / nrm
        basis.append(x)
        found.append(x)
    if count is not None and len(found) < count:
        raise InsufficientComplement(
            f"requested {count} complement directions, pool provides {len(found)}"
        )
    if not found:
        return np.zeros((V.shape[0], 0), dtype=complex)
    return fix_phases(np.column_stack(found))
