"""Propagator integration, trajectory sampling and tightness reports."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike

from .bounds import isoholonomic_bound, phases_of_gate
from .errors import NotClosed
from .geometry import CLOSURE_HARD_LIMIT, SampledCurve, curve_length, discrete_horizontal_lift
from .numkernel import DEFAULT_TOL, ToleranceConfig, as_matrix, dagger, max_abs
from .synthesis import TightPlan, plan_hamiltonian_at, plan_propagator

__all__ = [
    "integrate_propagator",
    "Trajectory",
    "simulate_plan",
    "TightnessReport",
    "verify_tightness",
    "Tolerances",
    "CLOSED_FORM_TOLERANCES",
    "NUMERIC_TOLERANCES",
]

log = logging.getLogger(__name__)


def _batched_expm_i(H: np.ndarray, s: float) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (H + dagger(H)))
    return (v * np.exp(-1j * s * w)[..., None, :]) @ dagger(v)


def integrate_propagator(
    schedule: Callable,
    tau: float,
    steps: int,
    vectorized: bool = False,
) -> np.ndarray:
    """Midpoint-exponential propagator on a uniform grid.

    ``U_{k+1} = exp(-i h H(t_k + h/2)) U_k`` with ``h = tau / steps``; every
    factor is an exact exponential, so each ``U_k`` is unitary to roundoff.
    Returns the ``steps + 1`` propagators starting from the identity. With
    ``vectorized=True`` the schedule is called once with the array of
    midpoint times and must return a stack of matrices.
    """
    if steps < 2:
        raise ValueError("steps must be >= 2")
    if not tau > 0:
        raise ValueError("tau must be positive")
    h = tau / steps
    mids = (np.arange(steps) + 0.5) * h
    if vectorized:
        Hs = np.asarray(schedule(mids), dtype=complex)
    else:
        Hs = np.stack([as_matrix(schedule(t), square=True, name="H(t)") for t in mids])
    if Hs.shape[0] != steps or Hs.ndim != 3:
        raise ValueError(f"schedule returned shape {Hs.shape}")
    if max_abs(Hs - dagger(Hs)) > DEFAULT_TOL.hermiticity_tol:
        raise ValueError("schedule produced a non-Hermitian Hamiltonian")
    steps_U = _batched_expm_i(Hs, h)
    d = Hs.shape[1]
    U = np.empty((steps + 1, d, d), dtype=complex)
    U[0] = np.eye(d)
    for k in range(steps):
        U[k + 1] = steps_U[k] @ U[k]
    return U


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    propagators: np.ndarray
    frames: np.ndarray
    projectors: np.ndarray
    hamiltonians: np.ndarray
    skewness_samples: np.ndarray
    pt_residuals: np.ndarray
    length_accumulated: float
    unitarity_drift: float
    tau: float
    mode: str
    embedding_frame: np.ndarray

    @property
    def curve(self) -> SampledCurve:
        return SampledCurve(self.times, self.projectors)


def _sqrt_skewness_quadrature(times, skew):
    return float(np.trapezoid(np.sqrt(np.maximum(skew, 0.0)), times))


def simulate_plan(p: TightPlan, steps: int = 10_000, mode: str = "closed_form") -> Trajectory:
    """Sample the transport generated by a plan on a uniform grid over [0, tau].

    ``mode="closed_form"`` uses the exact channel propagators,
    ``mode="numeric"`` the midpoint-exponential integrator.
    """
    if steps < 2:
        raise ValueError("steps must be >= 2")
    t = np.linspace(0.0, p.tau, steps + 1)
    if mode == "closed_form":
        U = plan_propagator(p, t)
    elif mode == "numeric":
        U = integrate_propagator(lambda s: plan_hamiltonian_at(p, s), p.tau, steps, vectorized=True)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    H = plan_hamiltonian_at(p, t)
    F = U @ p.computational_frame
    P = F @ dagger(F)
    C = H @ P - P @ H
    skew = 0.5 * np.sum(np.abs(C) ** 2, axis=(1, 2))
    pt = np.max(np.abs(dagger(F) @ H @ F), axis=(1, 2))
    drift = max_abs(dagger(U) @ U - np.eye(p.dim))
    return Trajectory(
        times=t,
        propagators=U,
        frames=F,
        projectors=P,
        hamiltonians=H,
        skewness_samples=skew,
        pt_residuals=pt,
        length_accumulated=_sqrt_skewness_quadrature(t, skew),
        unitarity_drift=drift,
        tau=p.tau,
        mode=mode,
        embedding_frame=p.embedding_frame,
    )


@dataclass(frozen=True)
class Tolerances:
    length_gap: float
    holonomy_error: float
    pt_residual: float
    qsl_slack: float
    holonomy_routes: float = 1e-8
    length_routes: float = 1e-6


CLOSED_FORM_TOLERANCES = Tolerances(1e-9, 1e-9, 1e-10, 1e-9)
NUMERIC_TOLERANCES = Tolerances(1e-6, 1e-6, 1e-6, 1e-6)


@dataclass(frozen=True, eq=False)
class TightnessReport:
    target_gate: np.ndarray
    realized_holonomy: np.ndarray
    holonomy_error: float
    bound: float
    realized_length: float
    length_gap: float
    qsl_bound_time: float
    tau: float
    qsl_slack: float
    max_pt_residual: float
    closure_residual: float
    lift_holonomy: np.ndarray
    holonomy_route_gap: float
    length_projector_route: float
    length_route_gap: float
    unitarity_drift: float

    def failures(self, tol: Tolerances) -> list[str]:
        """Names of the quantities outside tolerance; empty when the plan is tight.

        The speed-limit check is skipped for gates with bound 0, where no
        motion is needed and the limit is vacuous.
        """
        checks = [
            ("length_gap", abs(self.length_gap), tol.length_gap),
            ("holonomy_error", self.holonomy_error, tol.holonomy_error),
            ("max_pt_residual", self.max_pt_residual, tol.pt_residual),
            ("qsl_slack", abs(self.qsl_slack) if self.bound > 0 else 0.0, tol.qsl_slack),
            ("holonomy_route_gap", self.holonomy_route_gap, tol.holonomy_routes),
            ("length_route_gap", self.length_route_gap, tol.length_routes),
        ]
        return [name for name, value, limit in checks if not value <= limit]

    def as_dict(self) -> dict:
        out = {}
        for key, value in asdict(self).items():
            out[key] = value if np.isscalar(value) else np.asarray(value)
        return out


def _to_gate_coordinates(frames_end, frames_start, E):
    # operator V_N V_0^dag restricted to the computational space, in embedding coordinates
    return dagger(E) @ frames_end @ dagger(frames_start) @ E


def _lift_holonomy(curve, V0, tol):
    """Discrete-lift holonomy with one step of Richardson extrapolation.

    The lift converges at second order, so combining the full and the
    every-other-sample lifts cancels the leading error term.
    """
    fine = discrete_horizontal_lift(curve, V0, tol)
    G_fine = dagger(V0) @ fine[-1]
    if curve.steps % 2 or curve.steps < 4:
        return G_fine
    coarse = discrete_horizontal_lift(curve.subsample(2), V0, tol)
    G_coarse = dagger(V0) @ coarse[-1]
    u, _, vh = np.linalg.svd((4 * G_fine - G_coarse) / 3)
    return u @ vh


def verify_tightness(
    traj: Trajectory,
    target: ArrayLike,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> TightnessReport:
    """Measure how closely a simulated transport saturates the isoholonomic bound.

    The holonomy is obtained twice, from the endpoint of the propagated
    frame and from the discrete horizontal lift of the projector samples.
    The length is obtained from the skewness (reported) and from projector
    differences (cross-check).
    """
    target = as_matrix(target, square=True, name="target")
    curve = traj.curve
    closure = curve.closure_residual
    if closure > CLOSURE_HARD_LIMIT:
        raise NotClosed(f"closure residual {closure:.3e} exceeds {CLOSURE_HARD_LIMIT:g}")
    E = traj.embedding_frame
    V0, VN = traj.frames[0], traj.frames[-1]
    realized = _to_gate_coordinates(VN, V0, E)
    G_lift = _lift_holonomy(curve, V0, tol)
    lifted = _to_gate_coordinates(V0 @ G_lift, V0, E)

    bound = isoholonomic_bound(phases_of_gate(target, tol))
    length = traj.length_accumulated
    length_p = curve_length(curve)
    if abs(length - length_p) > 1e-6:
        log.warning("length routes disagree: skewness %.12g vs projector %.12g", length, length_p)
    else:
        log.debug("length routes: skewness %.12g vs projector %.12g", length, length_p)

    if bound == 0.0:
        qsl = 0.0
    else:
        mean_speed = length / traj.tau
        qsl = bound / mean_speed if mean_speed > 0 else np.inf
    return TightnessReport(
        target_gate=target,
        realized_holonomy=realized,
        holonomy_error=max_abs(realized - target),
        bound=bound,
        realized_length=length,
        length_gap=length - bound,
        qsl_bound_time=qsl,
        tau=traj.tau,
        qsl_slack=traj.tau - qsl,
        max_pt_residual=float(np.max(traj.pt_residuals)),
        closure_residual=closure,
        lift_holonomy=lifted,
        holonomy_route_gap=max_abs(lifted - realized),
        length_projector_route=length_p,
        length_route_gap=abs(length - length_p),
        unitarity_drift=traj.unitarity_drift,
    )
