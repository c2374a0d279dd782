"""Tight parallel-transporting Hamiltonians for prescribed gates.

A *phase channel* acts on the plane spanned by an eigenvector ``v`` of the
target gate and an ancilla direction ``w``. In a rotated basis
``eps0, eps1`` of that plane it drives ``|v><v|`` once around a cone on the
Bloch sphere in time ``tau`` while keeping ``<v_t|H_t|v_t> = 0``, so that
``v`` returns as ``exp(i theta) v``. A plan puts one channel on every
eigenvector with nonzero phase; the channels act on mutually orthogonal
planes and therefore commute.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike

from .bounds import PhaseSpectrum, gate_eigensystem
from .errors import InsufficientComplement, NotOrthogonal
from .geometry import check_frame
from .numkernel import DEFAULT_TOL, ToleranceConfig, as_matrix, dagger, max_abs, orthonormal_extension

__all__ = [
    "PhaseChannel",
    "TightPlan",
    "build_channel",
    "channel_hamiltonian_at",
    "channel_propagator",
    "plan_gate",
    "plan_hamiltonian_at",
    "plan_propagator",
    "gate_library",
    "bloch_trajectory",
    "GATE_NAMES",
]

TWO_PI = 2 * np.pi


@dataclass(frozen=True, eq=False)
class PhaseChannel:
    v: np.ndarray
    w: np.ndarray
    theta: float
    tau: float
    eps0: np.ndarray
    eps1: np.ndarray
    pauli: np.ndarray  # (3, d, d)
    r: np.ndarray
    a: np.ndarray
    omega: np.ndarray
    A: np.ndarray
    H: np.ndarray
    laps: int = 1

    @property
    def dim(self) -> int:
        return len(self.v)

    @property
    def support(self) -> np.ndarray:
        """Orthogonal projector onto span{eps0, eps1}."""
        E = np.column_stack([self.eps0, self.eps1])
        return E @ E.conj().T


def _as_vector(x, name):
    x = np.asarray(x, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} has non-finite entries")
    nrm = np.linalg.norm(x)
    if abs(nrm - 1) > 1e-10:
        raise ValueError(f"{name} is not a unit vector (norm {nrm:.12g})")
    return x / nrm


def build_channel(v: ArrayLike, w: ArrayLike, theta: float, tau: float = 1.0, laps: int = 1) -> PhaseChannel:
    """Phase channel imprinting ``exp(i theta)`` on ``v`` using the ancilla ``w``.

    ``laps`` > 1 multiplies the rotation vector ``a`` by ``laps`` and
    re-solves the overlap so the state circles ``laps`` times during
    ``tau`` and still returns with phase ``theta``. Only ``laps=1`` is
    tight; larger values give closed but longer loops, useful as a
    non-tight reference.
    """
    v = _as_vector(v, "v")
    w = _as_vector(w, "w")
    if v.shape != w.shape:
        raise ValueError("v and w differ in dimension")
    if abs(np.vdot(v, w)) > 1e-10:
        raise NotOrthogonal(f"|<v|w>| = {abs(np.vdot(v, w)):.3e}")
    if not 0 <= theta < TWO_PI:
        raise ValueError(f"theta={theta} outside [0, 2pi)")
    if not tau > 0:
        raise ValueError("tau must be positive")
    if int(laps) != laps or laps < 1:
        raise ValueError("laps must be a positive integer")
    laps = int(laps)

    q = theta / (TWO_PI * laps)  # |<eps1|v>|^2
    eps0 = np.sqrt(1 - q) * v - np.sqrt(q) * w
    eps1 = np.sqrt(q) * v + np.sqrt(1 - q) * w
    e01 = np.outer(eps0, eps1.conj())
    e10 = e01.conj().T
    sigma = np.array(
        [
            e01 + e10,
            1j * (e01 - e10),
            np.outer(eps1, eps1.conj()) - np.outer(eps0, eps0.conj()),
        ]
    )
    r = np.array([np.vdot(v, s @ v).real for s in sigma])
    a = np.array([0.0, 0.0, laps * np.pi / tau])
    omega = a - (a @ r) * r
    A = np.einsum("k,kij->ij", a, sigma)
    H = np.einsum("k,kij->ij", omega, sigma)
    return PhaseChannel(v, w, float(theta), float(tau), eps0, eps1, sigma, r, a, omega, A, H, laps)


def _rotation(c: PhaseChannel, axis: np.ndarray, t):
    """exp(-i t (axis . sigma)) for scalar or array t, via (n.sigma)^2 = P_E."""
    t = np.asarray(t, dtype=float)
    norm = np.linalg.norm(axis)
    P = c.support
    rest = np.eye(c.dim) - P
    if norm == 0:
        return np.broadcast_to(np.eye(c.dim, dtype=complex), t.shape + (c.dim, c.dim)).copy()
    gen = np.einsum("k,kij->ij", axis / norm, c.pauli)
    ang = (norm * t)[..., None, None]
    return rest + np.cos(ang) * P - 1j * np.sin(ang) * gen


def channel_hamiltonian_at(c: PhaseChannel, t) -> np.ndarray:
    """H_t = exp(-itA) H exp(itA); ``t`` may be an array of times."""
    R = _rotation(c, c.a, t)
    return R @ c.H @ dagger(R)


def channel_propagator(c: PhaseChannel, t) -> np.ndarray:
    """U_t = exp(-itA) exp(-it(H - A)), identity off the channel plane."""
    return _rotation(c, c.a, t) @ _rotation(c, c.omega - c.a, t)


@dataclass(frozen=True, eq=False)
class TightPlan:
    gate: np.ndarray
    embedding_frame: np.ndarray
    eigenvectors: np.ndarray  # n x n, gate coordinates
    computational_frame: np.ndarray  # d x n, embedded eigenvectors
    phases: PhaseSpectrum
    ancillas: np.ndarray  # d x m
    channels: tuple = field(default_factory=tuple)
    tau: float = 1.0

    @property
    def dim(self) -> int:
        return self.computational_frame.shape[0]

    @property
    def n(self) -> int:
        return self.computational_frame.shape[1]


def plan_gate(
    gate: ArrayLike,
    embedding_frame: ArrayLike | None = None,
    ancilla_pool: ArrayLike | None = None,
    tau: float = 1.0,
    ambient_dim: int | None = None,
    laps: int = 1,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> TightPlan:
    """Assemble one phase channel per eigenvector of ``gate`` with nonzero phase.

    ``embedding_frame`` places the gate's coordinates in the ambient space
    (default: the first ``n`` basis vectors of C^d, d = ``ambient_dim`` or
    ``2n``). Ancillas are taken from ``ancilla_pool`` (default: the standard
    basis) by Gram-Schmidt against the computational space, in column order.
    """
    gate = as_matrix(gate, square=True, name="gate")
    n = gate.shape[0]
    if embedding_frame is None:
        d = ambient_dim if ambient_dim is not None else 2 * n
        if d <= n:
            raise InsufficientComplement(f"ambient dimension {d} leaves no room beside n={n}")
        embedding_frame = np.eye(d, n, dtype=complex)
    E = check_frame(embedding_frame, tol)
    if E.shape[1] != n:
        raise ValueError(f"embedding frame has {E.shape[1]} columns, gate acts on {n}")
    d = E.shape[0]
    if not tau > 0:
        raise ValueError("tau must be positive")

    spectrum, W = gate_eigensystem(gate, tol)
    V = E @ W
    active = [k for k, th in enumerate(spectrum.phases) if th > 0]
    pool = np.eye(d, dtype=complex) if ancilla_pool is None else as_matrix(ancilla_pool, name="ancilla_pool")
    ancillas = orthonormal_extension(V, pool, count=len(active), tol=tol)
    channels = tuple(
        build_channel(V[:, k], ancillas[:, j], spectrum.phases[k], tau, laps)
        for j, k in enumerate(active)
    )
    return TightPlan(gate, E, W, V, spectrum, ancillas, channels, float(tau))


def plan_hamiltonian_at(p: TightPlan, t) -> np.ndarray:
    """Sum of the channel Hamiltonians at time(s) ``t``."""
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape + (p.dim, p.dim), dtype=complex)
    for c in p.channels:
        out = out + channel_hamiltonian_at(c, t)
    return out


def plan_propagator(p: TightPlan, t) -> np.ndarray:
    """Product of the (commuting) channel propagators at time(s) ``t``."""
    t = np.asarray(t, dtype=float)
    out = np.broadcast_to(np.eye(p.dim, dtype=complex), t.shape + (p.dim, p.dim)).copy()
    for c in p.channels:
        out = channel_propagator(c, t) @ out
    return out


_S2 = 1 / np.sqrt(2)
_GATES = {
    "t_gate": np.diag([1, np.exp(1j * np.pi / 4)]),
    "t_prime": np.diag([np.exp(-1j * np.pi / 8), np.exp(1j * np.pi / 8)]),
    "hadamard": np.array([[_S2, _S2], [_S2, -_S2]]),
    "cnot": np.eye(4)[[0, 1, 3, 2]],
}
GATE_NAMES = tuple(_GATES)


def gate_library(name: str) -> np.ndarray:
    try:
        return np.array(_GATES[name], dtype=complex)
    except KeyError:
        raise KeyError(f"unknown gate {name!r}; known: {', '.join(GATE_NAMES)}") from None


def bloch_trajectory(c: PhaseChannel, steps: int):
    """Bloch vector of the transported state and Rabi vector of H_t over one period.

    Components are taken in the channel's own Pauli basis. Returns
    ``(t, r, omega)`` with ``steps + 1`` uniformly spaced samples on
    [0, tau].
    """
    if steps < 2:
        raise ValueError("steps must be >= 2")
    t = np.linspace(0.0, c.tau, steps + 1)
    R = _rotation(c, c.a, t)
    rho_t = R @ np.outer(c.v, c.v.conj()) @ dagger(R)
    H_t = R @ c.H @ dagger(R)
    r = np.einsum("kij,tji->tk", c.pauli, rho_t).real
    omega = 0.5 * np.einsum("kij,tji->tk", c.pauli, H_t).real
    return t, r, omega
