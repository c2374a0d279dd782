"""Eigenphase spectra and isoholonomic lower bounds on loop length."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np
from numpy.typing import ArrayLike

from .numkernel import DEFAULT_TOL, ToleranceConfig, unitary_eig

__all__ = [
    "PhaseSpectrum",
    "gate_eigensystem",
    "phases_of_gate",
    "isoholonomic_bound",
    "state_bound",
    "projective_isoholonomic_bound",
    "qsl_time",
]

TWO_PI = 2 * np.pi


def _wrap(theta, wrap_tol):
    theta = np.mod(np.asarray(theta, dtype=float), TWO_PI)
    # the eigenvalue 1 may show up on either side of the branch cut
    return np.where((theta < wrap_tol) | (TWO_PI - theta <= wrap_tol), 0.0, theta)


@dataclass(frozen=True)
class PhaseSpectrum:
    """Eigenvalue phases of a gate, each in [0, 2pi).

    Any real angles are accepted and reduced mod 2pi; angles within
    ``wrap_tol`` of 0 (on either side) are stored as exactly 0.
    """

    phases: tuple
    wrap_tol: float = 1e-9

    def __post_init__(self):
        wrapped = _wrap(np.atleast_1d(np.asarray(self.phases, dtype=float)), self.wrap_tol)
        if not np.all(np.isfinite(wrapped)):
            raise ValueError("phases must be finite")
        object.__setattr__(self, "phases", tuple(float(x) for x in wrapped))

    def __len__(self):
        return len(self.phases)

    def as_array(self) -> np.ndarray:
        return np.array(self.phases, dtype=float)

    @property
    def nonzero(self) -> int:
        return sum(1 for x in self.phases if x > 0)


SpectrumLike = Union[PhaseSpectrum, Iterable[float]]


def _as_spectrum(s: SpectrumLike) -> PhaseSpectrum:
    return s if isinstance(s, PhaseSpectrum) else PhaseSpectrum(tuple(s))


def gate_eigensystem(G: ArrayLike, tol: ToleranceConfig = DEFAULT_TOL):
    """Phases and matching orthonormal eigenvectors of a unitary gate.

    Returns ``(spectrum, vectors)`` with phases ascending; column ``k`` of
    ``vectors`` belongs to ``spectrum.phases[k]``.
    """
    mu, Z = unitary_eig(G, tol)
    spectrum = PhaseSpectrum(tuple(np.angle(mu)))
    order = np.argsort(spectrum.as_array(), kind="stable")
    return PhaseSpectrum(tuple(np.array(spectrum.phases)[order])), Z[:, order]


def phases_of_gate(G: ArrayLike, tol: ToleranceConfig = DEFAULT_TOL) -> PhaseSpectrum:
    return gate_eigensystem(G, tol)[0]


def _bound_sum(theta: np.ndarray) -> float:
    return float(np.sum(theta * (TWO_PI - theta)))


def isoholonomic_bound(s: SpectrumLike) -> float:
    """sqrt(sum_j theta_j (2pi - theta_j)) over the eigenphases."""
    return float(np.sqrt(max(_bound_sum(_as_spectrum(s).as_array()), 0.0)))


def state_bound(theta: float) -> float:
    """Minimal Fubini-Study length of a closed pure-state loop with geometric phase theta."""
    if not 0 <= theta < TWO_PI:
        raise ValueError(f"theta={theta} outside [0, 2pi)")
    return float(np.sqrt(theta * (TWO_PI - theta)))


def projective_isoholonomic_bound(s: SpectrumLike) -> tuple[float, int]:
    """Smallest bound over all global-phase representatives of the gate.

    Candidate representatives shift every phase by -theta_k for
    k = 0..n with theta_0 = 0. Returns ``(bound, k)``; ties go to the
    smallest k.
    """
    spec = _as_spectrum(s)
    theta = spec.as_array()
    shifts = np.concatenate([[0.0], theta])
    best, best_k = 0.0, 0
    for k, shift in enumerate(shifts):
        phi = _wrap(theta - shift, spec.wrap_tol)
        total = _bound_sum(phi)
        # roundoff must not reorder equal candidates
        if k == 0 or total < best - 1e-12 * max(1.0, best):
            best, best_k = total, k
    return float(np.sqrt(max(best, 0.0))), best_k


def qsl_time(G: ArrayLike, mean_sqrt_skewness: float, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Minimum execution time L(G) / <<sqrt(I)>> of a holonomic implementation of G."""
    if not mean_sqrt_skewness > 0:
        raise ValueError("mean sqrt-skewness must be positive")
    return isoholonomic_bound(phases_of_gate(G, tol)) / mean_sqrt_skewness
