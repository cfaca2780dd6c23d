"""H-infinity norm and frequency response of stable SISO systems."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numkernel as nk
from .config import DEFAULT, Tolerances
from .errors import NoConvergence, SingularMatrix
from .lti import StateSpace, require_stable, transfer_batch, transfer_eval

_MAX_ITER = 100


@dataclass(frozen=True)
class HinfResult:
    norm: float
    peak_frequency: float  # rad/s; inf when the supremum is the feedthrough |d|
    iterations: int


def _mag(sys: StateSpace, w, tol: Tolerances) -> np.ndarray:
    return np.abs(transfer_batch(sys, 1j * np.asarray(w, dtype=float), tol))


def _zoom_max(f, a: float, b: float, points: int = 33, rounds: int = 8):
    """Maximize ``f`` (vectorized) on ``[a, b]`` by repeated grid refinement.

    Each round samples ``points`` values and keeps the two cells around the
    best one, so the bracket shrinks sixteenfold per round.
    """
    best_x, best_v = a, -np.inf
    for _ in range(rounds):
        x = np.linspace(a, b, points)
        v = f(x)
        k = int(np.argmax(v))
        if v[k] > best_v:
            best_x, best_v = float(x[k]), float(v[k])
        a, b = x[max(k - 1, 0)], x[min(k + 1, points - 1)]
        if b - a <= 1e-15 * max(abs(a), abs(b), 1e-300):
            break
    return best_x, best_v


def _refine(sys: StateSpace, w: np.ndarray, mags: np.ndarray, tol: Tolerances):
    """Polish the largest sampled magnitude within its neighbouring samples."""
    k = int(np.argmax(mags))
    best_w, best = float(w[k]), float(mags[k])
    lo_w = w[k - 1] if k > 0 else w[k]
    hi_w = w[k + 1] if k + 1 < len(w) else w[k]
    if hi_w <= lo_w:
        return best_w, best
    if lo_w > 0:
        t, v = _zoom_max(lambda t: _mag(sys, np.exp(t), tol), np.log(lo_w), np.log(hi_w))
        x = np.exp(t)
    else:
        x, v = _zoom_max(lambda t: _mag(sys, t, tol), lo_w, hi_w)
    if v > best:
        best_w, best = float(x), float(v)
    return best_w, best


def hamiltonian(sys: StateSpace, g: float) -> np.ndarray:
    """Hamiltonian whose imaginary-axis eigenvalues are the frequencies with ``|G(iw)| = g``."""
    A, b, c, d = sys.A, sys.b, sys.c, sys.d
    R = g * g - d * d
    F = A + np.outer(b, c) * (d / R)
    return np.block([[F, np.outer(b, b) / R],
                     [-np.outer(c, c) * (g * g / R), -F.T]])


def _crossings(sys: StateSpace, g: float, tol: Tolerances) -> np.ndarray:
    H = hamiltonian(sys, g)
    lam = nk.eigenvalues(H, tol=tol).values
    # rounding in the Hamiltonian eigenvalues scales with ||H||, which grows
    # like ||b||^2 / g^2; anything plausibly on the axis is kept as a candidate
    slack = max(tol.hamiltonian_axis, 1e3 * nk.EPS * np.abs(H).sum(axis=1).max())
    near = np.abs(lam.real) <= slack * np.maximum(1.0, np.abs(lam))
    return np.unique(np.abs(lam[near].imag))


def hinf_norm(sys: StateSpace, tol: float = 1e-8, tols: Tolerances = DEFAULT) -> HinfResult:
    """``sup_w |G(iw)|`` to relative accuracy ``tol``.

    A log-spaced grid spanning the pole magnitudes gives an attained lower
    bound. Level-set iterations then test ``g = lo (1 + tol)``: the
    Hamiltonian proposes the frequencies where ``|G|`` may cross ``g``, and
    ``|G|`` is evaluated between consecutive crossings. A value above ``g``
    raises the lower bound; otherwise ``g`` is a certified upper bound and the
    iteration stops. The reported norm is always a value of ``|G|`` actually
    attained (or ``|d|``), so spurious axis eigenvalues caused by rounding can
    only cost iterations, never accuracy.
    """
    require_stable(sys, tols)
    d = abs(sys.d)
    if sys.n == 0:
        return HinfResult(d, np.inf, 0)
    poles = np.abs(nk.eigenvalues(sys.A, tol=tols).values)
    w_lo = max(poles.min(), 1e-300) * 1e-2
    w_hi = max(poles.max(), 1e-300) * 1e2
    w = np.concatenate([[0.0], np.geomspace(w_lo, w_hi, tols.grid_points)])
    mags = _mag(sys, w, tols)
    peak_w, lo = _refine(sys, w, mags, tols)
    if d >= lo:
        peak_w, lo = np.inf, d
    if lo == 0.0:
        return HinfResult(0.0, 0.0, 0)
    for it in range(1, _MAX_ITER + 1):
        g = lo * (1.0 + tol)
        if g <= d * (1.0 + 1e-10):
            g = d * (1.0 + 1e-10) * (1.0 + tol)
        cand = _crossings(sys, g, tols)
        if cand.size == 0:
            return HinfResult(float(lo), float(peak_w), it)
        pts = np.concatenate([[0.0], cand])
        probe = np.unique(np.concatenate([cand, 0.5 * (pts[:-1] + pts[1:])]))
        pm = _mag(sys, probe, tols)
        k = int(np.argmax(pm))
        if pm[k] <= g:
            return HinfResult(float(lo), float(peak_w), it)
        neighbours = np.unique(np.concatenate([pts, probe]))
        j = int(np.searchsorted(neighbours, probe[k]))
        window = neighbours[max(j - 1, 0):j + 2]
        pw, pv = _refine(sys, window, _mag(sys, window, tols), tols)
        if pv > pm[k]:
            peak_w, lo = pw, pv
        else:
            peak_w, lo = float(probe[k]), float(pm[k])
    raise NoConvergence(f"H-infinity iteration did not settle within {_MAX_ITER} steps")


def frequency_response(sys: StateSpace, omegas, tols: Tolerances = DEFAULT) -> list[tuple[float, complex]]:
    """``(w, G(iw))`` pairs; a point that hits a pole carries ``nan``."""
    omegas = np.asarray(omegas, dtype=float).reshape(-1)
    try:
        vals = transfer_batch(sys, 1j * omegas, tols)
        return [(float(w), complex(v)) for w, v in zip(omegas, vals)]
    except SingularMatrix:
        pass
    out = []
    for w in omegas:
        try:
            out.append((float(w), transfer_eval(sys, 1j * w, tols)))
        except SingularMatrix:
            out.append((float(w), complex(np.nan, np.nan)))
    return out
