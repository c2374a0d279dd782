"""Frames, projectors and sampled curves on the Grassmann manifold.

A frame is a ``d x n`` array with orthonormal columns; the subspace it spans
is represented by the rank-``n`` orthogonal projector ``V V^dag``. Curves
are sampled on a time grid and stored as stacked ``(N+1, d, d)`` arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike

from .bounds import isoholonomic_bound, phases_of_gate, state_bound
from .errors import InvalidFrame, MeshTooCoarse, NotClosed, NotHermitian
from .numkernel import DEFAULT_TOL, ToleranceConfig, as_matrix, dagger, max_abs, unitary_eig

__all__ = [
    "check_frame",
    "check_projector",
    "projector_from_frame",
    "horizontality_residual",
    "parallel_transport_residual",
    "projective_pt_residual",
    "SampledCurve",
    "HolonomyResult",
    "discrete_horizontal_lift",
    "holonomy",
    "curve_length",
    "curve_length_with_error",
    "skewness",
    "generated_curve",
    "random_closed_loop",
    "LoopCheck",
    "check_loop",
    "eigenbasis_lift",
    "component_lengths",
    "state_bound_or_zero",
]

CLOSURE_HARD_LIMIT = 1e-3


def check_frame(V: ArrayLike, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    V = as_matrix(V, name="frame")
    d, n = V.shape
    if not 1 <= n < d:
        raise InvalidFrame(f"frame shape {V.shape} needs 1 <= n < d")
    err = max_abs(V.conj().T @ V - np.eye(n))
    if err > tol.unitarity_tol:
        raise InvalidFrame(f"columns not orthonormal: ||V^dag V - I||_max = {err:.3e}")
    return V


def check_projector(P: ArrayLike, rank: int | None = None, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    P = as_matrix(P, square=True, name="projector")
    if max_abs(P - P.conj().T) > tol.hermiticity_tol:
        raise ValueError("projector is not Hermitian")
    if max_abs(P @ P - P) > 1e-9:
        raise ValueError("projector is not idempotent")
    if rank is not None and abs(np.trace(P).real - rank) > 1e-9:
        raise ValueError(f"projector trace {np.trace(P).real:.6g} != rank {rank}")
    return P


def projector_from_frame(V: ArrayLike, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    V = check_frame(V, tol)
    return V @ V.conj().T


def horizontality_residual(V: ArrayLike, Vdot: ArrayLike) -> float:
    """||V^dag Vdot||_max; zero exactly when the tangent Vdot is horizontal."""
    V, Vdot = as_matrix(V), as_matrix(Vdot)
    if V.shape != Vdot.shape:
        raise ValueError(f"shape mismatch {V.shape} vs {Vdot.shape}")
    return max_abs(V.conj().T @ Vdot)


def _sandwich(H, V, tol):
    H = as_matrix(H, square=True, name="H")
    V = as_matrix(V, name="V")
    if H.shape[0] != V.shape[0]:
        raise ValueError(f"H is {H.shape}, frame is {V.shape}")
    if max_abs(H - H.conj().T) > tol.hermiticity_tol:
        raise NotHermitian("Hamiltonian is not Hermitian")
    return V.conj().T @ H @ V


def parallel_transport_residual(H: ArrayLike, V: ArrayLike, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """max_kl |<v_k|H|v_l>|."""
    return max_abs(_sandwich(H, V, tol))


def projective_pt_residual(H: ArrayLike, V: ArrayLike, tol: ToleranceConfig = DEFAULT_TOL):
    """Deviation of V^dag H V from a multiple of the identity.

    Returns ``(residual, epsilon)`` where ``epsilon`` is the mean diagonal
    energy Re tr(V^dag H V) / n.
    """
    M = _sandwich(H, V, tol)
    n = M.shape[0]
    eps = float(np.trace(M).real / n)
    return max_abs(M - eps * np.eye(n)), eps


@dataclass(frozen=True, eq=False)
class SampledCurve:
    """Projector samples ``projectors[k]`` at ``times[k]``."""

    times: np.ndarray
    projectors: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        P = np.asarray(self.projectors, dtype=complex)
        if P.ndim != 3 or P.shape[1] != P.shape[2]:
            raise ValueError(f"projectors must have shape (N+1, d, d), got {P.shape}")
        if t.shape != (P.shape[0],):
            raise ValueError("times and projectors differ in length")
        if t.size >= 2 and np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        ranks = np.einsum("kii->k", P).real
        if ranks.size and np.ptp(ranks) > 1e-6:
            raise ValueError("projectors do not share a common rank")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "projectors", P)

    @property
    def dim(self) -> int:
        return self.projectors.shape[1]

    @property
    def rank(self) -> int:
        return int(round(np.trace(self.projectors[0]).real))

    @property
    def steps(self) -> int:
        return len(self.times) - 1

    @property
    def closure_residual(self) -> float:
        return max_abs(self.projectors[-1] - self.projectors[0])

    def subsample(self, stride: int) -> "SampledCurve":
        idx = np.arange(0, len(self.times), stride)
        if idx[-1] != len(self.times) - 1:
            idx = np.append(idx, len(self.times) - 1)
        return SampledCurve(self.times[idx], self.projectors[idx])


@dataclass(frozen=True, eq=False)
class HolonomyResult:
    gate_matrix: np.ndarray
    closure_residual: float
    lift_frames: np.ndarray | None = None


def discrete_horizontal_lift(curve: SampledCurve, V0: ArrayLike, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Horizontal lift of a sampled curve by project-then-orthonormalize.

    Each frame is moved to the next fiber as ``polar(P_{k+1} V_k)``, the
    closest frame spanning the next subspace. Returns an ``(N+1, d, n)``
    array of frames.
    """
    V = check_frame(V0, tol)
    P = curve.projectors
    if V.shape[0] != curve.dim:
        raise ValueError(f"frame dimension {V.shape[0]} != curve dimension {curve.dim}")
    if max_abs(P[0] @ V - V) > 1e-8:
        raise InvalidFrame("initial frame does not span the initial subspace")
    jumps = np.linalg.norm(np.diff(P, axis=0), axis=(1, 2))
    if jumps.size and jumps.max() >= 0.5:
        raise MeshTooCoarse(f"projector jump {jumps.max():.3f} >= 0.5; refine the time grid")
    frames = np.empty((len(P),) + V.shape, dtype=complex)
    frames[0] = V
    for k in range(1, len(P)):
        u, s, vh = np.linalg.svd(P[k] @ frames[k - 1], full_matrices=False)
        if s[-1] <= tol.rank_tol:
            raise MeshTooCoarse("projected frame lost rank")
        frames[k] = u @ vh
    return frames


def holonomy(
    curve: SampledCurve,
    V0: ArrayLike,
    keep_frames: bool = False,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> HolonomyResult:
    """Holonomy of a closed sampled curve, as the matrix V_0^dag V_N in the frame V0."""
    closure = curve.closure_residual
    if closure > CLOSURE_HARD_LIMIT:
        raise NotClosed(f"closure residual {closure:.3e} exceeds {CLOSURE_HARD_LIMIT:g}")
    frames = discrete_horizontal_lift(curve, V0, tol)
    gate = frames[0].conj().T @ frames[-1]
    return HolonomyResult(gate, closure, frames if keep_frames else None)


def _chord_length(P: np.ndarray) -> float:
    dP = np.diff(P, axis=0)
    return float(np.sum(np.linalg.norm(dP, axis=(1, 2)))) / np.sqrt(2)


def curve_length(curve: SampledCurve) -> float:
    """Length of the curve in the Hilbert-Schmidt metric on projectors.

    Composite midpoint rule for the integral of sqrt(tr(Pdot^2)/2), with
    Pdot at each interval midpoint taken from the central difference
    (P_{k+1} - P_k) / h. Second order in the mesh width.
    """
    if len(curve.times) < 2:
        raise ValueError("need at least two samples")
    return _chord_length(curve.projectors)


def curve_length_with_error(curve: SampledCurve) -> tuple[float, float]:
    """Length plus a step-doubling estimate of its discretisation error."""
    fine = curve_length(curve)
    if curve.steps < 2:
        return fine, np.inf
    coarse = curve_length(curve.subsample(2))
    return fine, abs(fine - coarse)


def skewness(H: ArrayLike, P: ArrayLike, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """-tr([H, P]^2) / 2, the squared speed of range(P) under H."""
    H = as_matrix(H, square=True, name="H")
    P = as_matrix(P, square=True, name="P")
    if H.shape != P.shape:
        raise ValueError(f"shape mismatch {H.shape} vs {P.shape}")
    if max_abs(H - H.conj().T) > tol.hermiticity_tol:
        raise NotHermitian("Hamiltonian is not Hermitian")
    C = H @ P - P @ H
    # C is anti-Hermitian, so -tr(C^2) = ||C||_F^2
    return 0.5 * float(np.linalg.norm(C) ** 2)


def generated_curve(
    schedule: Callable[[float], np.ndarray],
    V0: ArrayLike,
    tau: float,
    steps: int,
    vectorized: bool = False,
) -> SampledCurve:
    """Sample t -> U_t P_0 U_t^dag for the propagator of a Hamiltonian schedule."""
    from .evolution import integrate_propagator

    V = check_frame(V0)
    U = integrate_propagator(schedule, tau, steps, vectorized=vectorized)
    F = U @ V
    return SampledCurve(np.linspace(0.0, tau, steps + 1), F @ dagger(F))


def _random_hermitian(rng, d):
    G = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    K = 0.5 * (G + G.conj().T)
    return K / np.linalg.norm(K, 2)


def random_closed_loop(
    dim: int,
    rank: int,
    generator_count: int = 3,
    seed: int = 0,
    steps: int = 2000,
    tau: float = 1.0,
) -> SampledCurve:
    """Closed curve t -> U_t P U_t^dag with U_t a product of seeded exponentials.

    ``U_t = prod_j exp(-i s_j(t) K_j)`` with random Hermitian ``K_j`` scaled
    to unit spectral norm and profiles ``s_j`` vanishing at both ends, so
    that ``U_0 = U_tau = I``. ``P`` projects onto the first ``rank`` basis
    vectors. With one generator the profile is a symmetric bump and the
    path retraces itself.
    """
    if not 1 <= rank < dim:
        raise ValueError(f"need 1 <= rank < dim, got rank={rank}, dim={dim}")
    if generator_count < 1:
        raise ValueError("generator_count must be >= 1")
    rng = np.random.default_rng(seed)
    t = np.linspace(0.0, tau, steps + 1)
    x = t / tau
    bump = np.sin(np.pi * x) ** 2
    U = np.broadcast_to(np.eye(dim, dtype=complex), (len(t), dim, dim)).copy()
    for j in range(generator_count):
        K = _random_hermitian(rng, dim)
        if generator_count == 1:
            s = rng.uniform(1.0, 3.0) * bump
        else:
            amp = rng.uniform(0.5, 2.5)
            m = rng.integers(0, 3)
            phase = rng.uniform(0, 2 * np.pi)
            s = amp * bump * np.cos(2 * np.pi * m * x + phase)
        w, v = np.linalg.eigh(K)
        E = np.einsum("ij,tj,kj->tik", v, np.exp(-1j * s[:, None] * w[None, :]), v.conj())
        U = E @ U
    V = U[:, :, :rank]
    return SampledCurve(t, V @ dagger(V))


@dataclass(frozen=True)
class LoopCheck:
    """Outcome of testing the isoholonomic inequality on one closed loop."""

    length: float
    mesh_error: float
    bound: float
    closure_residual: float
    tolerance: float

    @property
    def margin(self) -> float:
        return self.length - self.bound

    @property
    def violated(self) -> bool:
        return bool(self.margin + self.tolerance < 0)


def check_loop(curve: SampledCurve, V0: ArrayLike | None = None) -> LoopCheck:
    """Compare the length of a closed loop with the bound of its holonomy.

    The allowed slack is five times the step-doubling length error plus a
    term proportional to the closure residual of the sampled loop.
    """
    if V0 is None:
        V0 = np.eye(curve.dim, curve.rank, dtype=complex)
    hol = holonomy(curve, V0)
    length, err = curve_length_with_error(curve)
    bound = isoholonomic_bound(phases_of_gate(_nearest_unitary(hol.gate_matrix), _LOOSE))
    tol = 5 * err + 10 * hol.closure_residual
    return LoopCheck(float(length), float(err), float(bound), float(hol.closure_residual), float(tol))


# discrete holonomies of nearly-closed loops are unitary only to ~closure residual
_LOOSE = ToleranceConfig(unitarity_tol=1e-6)


def _nearest_unitary(G):
    u, _, vh = np.linalg.svd(G)
    return u @ vh


def eigenbasis_lift(curve: SampledCurve, V0: ArrayLike | None = None):
    """Horizontal lift started at an eigenbasis of the holonomy.

    Returns ``(frames, phases)``; column ``k`` of the frames traces a closed
    pure-state loop with geometric phase ``phases[k]``.
    """
    if V0 is None:
        V0 = np.eye(curve.dim, curve.rank, dtype=complex)
    hol = holonomy(curve, V0, keep_frames=True)
    mu, W = unitary_eig(_nearest_unitary(hol.gate_matrix), _LOOSE)
    phases = np.mod(np.angle(mu), 2 * np.pi)
    # the lift is equivariant: lift(V0 W) = lift(V0) W
    return hol.lift_frames @ W, phases


def component_lengths(frames: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Fubini-Study lengths of the pure-state curves traced by each frame column."""
    out = []
    for k in range(frames.shape[2]):
        v = frames[:, :, k : k + 1]
        out.append(curve_length(SampledCurve(times, v @ dagger(v))))
    return np.array(out)


def state_bound_or_zero(theta: float) -> float:
    theta = float(theta)
    if theta >= 2 * np.pi - 1e-12:
        theta = 0.0
    return state_bound(theta)

