"""Numerical tolerances shared by every module.

One frozen record holds all thresholds so that a run can be reproduced from
a single set of numbers. ``BALTRUNC_TOL`` in the environment overrides
fields, either as a JSON object (``{"hinf": 1e-10}``) or as a comma
separated ``key=value`` list (``hinf=1e-10,cert=1e-5``).
"""
from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    # numkernel
    pivot: float = 1e-14            # LU pivot floor, relative to ||A||_inf
    symmetry: float = 1e-10         # allowed ||A - A^T||_inf / ||A||_inf
    qr_sweeps_per_dim: int = 30     # eigensolver budget: 30*n sweeps
    jacobi_sweeps: int = 60
    # lti / gramian
    minimality: float = 1e-14       # smallest Gramian eigenvalue / largest
    hsv_floor: float = 1e-14        # smallest HSV / largest before NotMinimal
    multiplicity_gap: float = 1e-8  # relative gap merging repeated HSVs
    complex_eig: float = 1e-8       # imag/|lambda| tolerated in cross Gramian
    kron_max_dim: int = 24          # vectorized solve up to this order
    # balance
    canonical: float = 1e-8
    cert: float = 1e-6
    # hinfnorm
    hinf: float = 1e-8
    hamiltonian_axis: float = 1e-8
    grid_points: int = 400
    # arrowhead
    arrow_zero: float = 1e-13
    arrow_gap: float = 1e-12
    arrow_shift: float = 1e-13
    zero_imag: float = 1e-9         # imag/|z| above which a numerator zero is complex
    zero_merge: float = 1e-6        # relative distance at which two zeros count as one
    coprime: float = 1e-10          # |D(z)| / sum|D_k||z|^k at a numerator zero z

    def replace(self, **changes) -> "Tolerances":
        return dataclasses.replace(self, **changes)


def _parse_overrides(text: str) -> dict:
    text = text.strip()
    if not text:
        return {}
    if text.startswith("{"):
        raw = json.loads(text)
    else:
        raw = {}
        for item in text.split(","):
            key, _, value = item.partition("=")
            raw[key.strip()] = value.strip()
    fields = {f.name: f for f in dataclasses.fields(Tolerances)}
    out = {}
    for key, value in raw.items():
        if key not in fields:
            raise ValueError(f"unknown tolerance field {key!r}")
        kind = int if fields[key].type in ("int", int) else float
        out[key] = kind(value)
    return out


def load_tolerances(env: dict | None = None) -> Tolerances:
    """Defaults, overridden by ``BALTRUNC_TOL`` when present."""
    env = os.environ if env is None else env
    return Tolerances(**_parse_overrides(env.get("BALTRUNC_TOL", "")))


DEFAULT = Tolerances()
