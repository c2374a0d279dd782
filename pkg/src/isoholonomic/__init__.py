"""Isoholonomic bounds and tight holonomic implementations of quantum gates."""

__version__ = "0.1.0"

from .bounds import (
    PhaseSpectrum,
    isoholonomic_bound,
    phases_of_gate,
    projective_isoholonomic_bound,
    qsl_time,
    state_bound,
)
from .evolution import integrate_propagator, simulate_plan, verify_tightness
from .geometry import (
    SampledCurve,
    check_loop,
    curve_length,
    holonomy,
    random_closed_loop,
    skewness,
)
from .synthesis import bloch_trajectory, build_channel, gate_library, plan_gate

__all__ = [
    "PhaseSpectrum",
    "SampledCurve",
    "bloch_trajectory",
    "build_channel",
    "check_loop",
    "curve_length",
    "gate_library",
    "holonomy",
    "integrate_propagator",
    "isoholonomic_bound",
    "phases_of_gate",
    "plan_gate",
    "projective_isoholonomic_bound",
    "qsl_time",
    "random_closed_loop",
    "simulate_plan",
    "skewness",
    "state_bound",
    "verify_tightness",
]
