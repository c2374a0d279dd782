"""JSON and CSV file formats: matrices, plans, reports, falsifier runs, Bloch data.

Complex numbers are written as ``[re, im]`` pairs, matrices row-major with
explicit ``rows``/``cols``. Every document is validated against the schema
shipped in ``isoholonomic/schemas``.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from functools import lru_cache
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .bounds import PhaseSpectrum
from .evolution import TightnessReport
from .numkernel import max_abs
from .synthesis import PhaseChannel, TightPlan, build_channel

__all__ = [
    "FileFormatError",
    "matrix_to_json",
    "matrix_from_json",
    "read_matrix",
    "write_matrix",
    "plan_to_json",
    "plan_from_json",
    "read_plan",
    "report_to_json",
    "validate",
    "dumps",
    "atomic_write",
    "bloch_csv",
]

SCHEMA_VERSION = 1


class FileFormatError(ValueError):
    """Document fails to parse, validate, or reproduce its stored values."""


@lru_cache(maxsize=None)
def _schema(name: str) -> dict:
    text = resources.files(__package__).joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def validate(doc: dict, name: str) -> None:
    try:
        jsonschema.validate(doc, _schema(name))
    except jsonschema.ValidationError as exc:
        raise FileFormatError(f"{name} document invalid: {exc.message}") from exc


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=1, allow_nan=False) + "\n"


def atomic_write(path: str | os.PathLike, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _pairs(a) -> list:
    a = np.asarray(a, dtype=complex).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in a]


def matrix_to_json(M, label: str | None = None) -> dict:
    M = np.asarray(M, dtype=complex)
    if M.ndim == 1:
        M = M[:, None]
    doc = {"rows": int(M.shape[0]), "cols": int(M.shape[1]), "entries": _pairs(M)}
    if label is not None:
        doc["label"] = label
    return doc


def _complex_array(pairs) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float).reshape(-1, 2)
    out = arr[:, 0] + 1j * arr[:, 1]
    if not np.all(np.isfinite(out)):
        raise FileFormatError("non-finite entry")
    return out


def matrix_from_json(doc: dict) -> np.ndarray:
    validate(doc, "matrix")
    rows, cols = doc["rows"], doc["cols"]
    if len(doc["entries"]) != rows * cols:
        raise FileFormatError(f"{len(doc['entries'])} entries for a {rows}x{cols} matrix")
    return _complex_array(doc["entries"]).reshape(rows, cols)


def _load_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FileFormatError(f"cannot read {path}: {exc}") from exc


def read_matrix(path) -> np.ndarray:
    return matrix_from_json(_load_json(path))


def write_matrix(path, M, label: str | None = None) -> None:
    atomic_write(path, dumps(matrix_to_json(M, label)))


def _channel_to_json(c: PhaseChannel, eigen_index: int) -> dict:
    return {
        "eigen_index": eigen_index,
        "theta": c.theta,
        "laps": c.laps,
        "v": _pairs(c.v),
        "w": _pairs(c.w),
        "eps0": _pairs(c.eps0),
        "eps1": _pairs(c.eps1),
        "r": [float(x) for x in c.r],
        "a": [float(x) for x in c.a],
        "omega": [float(x) for x in c.omega],
        "A": matrix_to_json(c.A),
        "H": matrix_to_json(c.H),
    }


def plan_to_json(p: TightPlan) -> dict:
    active = [k for k, th in enumerate(p.phases.phases) if th > 0]
    return {
        "schema": "isoholonomic/plan",
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "tau": p.tau,
        "gate": matrix_to_json(p.gate),
        "embedding_frame": matrix_to_json(p.embedding_frame),
        "eigenvectors": matrix_to_json(p.eigenvectors),
        "phases": list(p.phases.phases),
        "ancillas": matrix_to_json(p.ancillas),
        "channels": [_channel_to_json(c, k) for c, k in zip(p.channels, active)],
    }


def plan_from_json(doc: dict, atol: float = 1e-12) -> TightPlan:
    """Rebuild a plan; channels are re-synthesised and checked against the stored operators."""
    validate(doc, "plan")
    tau = float(doc["tau"])
    gate = matrix_from_json(doc["gate"])
    E = matrix_from_json(doc["embedding_frame"])
    W = matrix_from_json(doc["eigenvectors"])
    ancillas = matrix_from_json(doc["ancillas"])
    phases = PhaseSpectrum(tuple(doc["phases"]))
    V = E @ W
    if max_abs(gate @ W - W * np.exp(1j * phases.as_array())) > 1e-9:
        raise FileFormatError("eigenvectors do not diagonalise the gate with the stored phases")
    channels = []
    for ch in doc["channels"]:
        v = _complex_array(ch["v"])
        if max_abs(v - V[:, ch["eigen_index"]]) > atol:
            raise FileFormatError("channel vector differs from the embedded eigenvector")
        c = build_channel(v, _complex_array(ch["w"]), ch["theta"], tau, ch["laps"])
        for key in ("A", "H"):
            if max_abs(getattr(c, key) - matrix_from_json(ch[key])) > atol:
                raise FileFormatError(f"stored {key} does not match the rebuilt channel")
        channels.append(c)
    return TightPlan(gate, E, W, V, phases, ancillas, tuple(channels), tau)


def read_plan(path) -> TightPlan:
    return plan_from_json(_load_json(path))


def report_to_json(
    r: TightnessReport,
    *,
    steps: int,
    mode: str,
    failures: list[str],
    wall_clock: float,
    seed: int | None = None,
) -> dict:
    body = {}
    for key, value in r.as_dict().items():
        body[key] = matrix_to_json(value) if isinstance(value, np.ndarray) else float(value)
    doc = {
        "schema": "isoholonomic/report",
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "steps": int(steps),
        "tau": float(r.tau),
        "mode": mode,
        "seed": seed,
        "wall_clock_seconds": float(wall_clock),
        "tight": not failures,
        "failures": list(failures),
        "report": body,
    }
    validate(doc, "report")
    return doc


def bloch_csv(t, r, omega) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "r1", "r2", "r3", "w1", "w2", "w3"])
    for row in zip(t, r, omega):
        writer.writerow([repr(float(row[0]))] + [repr(float(x)) for x in row[1]] + [repr(float(x)) for x in row[2]])
    return buf.getvalue()
