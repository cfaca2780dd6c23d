"""Balanced realizations, the sign-symmetric canonical form, and reduction.

The certificate compares the achieved H-infinity error of a reduced model with
twice the sum of the discarded Hankel singular values. When every discarded
state carries the same sign parameter the two coincide, which is what
:func:`certify` reports as ``tight``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numkernel as nk
from .config import DEFAULT, Tolerances
from .errors import (BadDimension, BadInput, RepeatedHSV, SingularA11, SingularA22,
                     SingularMatrix, SplitsMultiplicityGroup)
from .gramian import (HankelSpectrum, SignSpectrum, group_values, sign_spectrum,
                      square_root_factors)
from .hinfnorm import hinf_norm
from .lti import StateSpace, error_system, require_stable

TRUNCATION = "truncation"
SINGULAR_PERTURBATION = "singular_perturbation"
_METHOD_ALIASES = {"truncation": TRUNCATION, "bt": TRUNCATION,
                   "singular_perturbation": SINGULAR_PERTURBATION, "spa": SINGULAR_PERTURBATION}


@dataclass(frozen=True)
class BalancedForm:
    sys: StateSpace
    sigma: HankelSpectrum
    signs: SignSpectrum
    canonical: bool
    gamma: np.ndarray | None = None  # set by to_canonical

    @property
    def n(self) -> int:
        return self.sys.n


@dataclass(frozen=True)
class ReductionCertificate:
    order_r: int
    reduced: StateSpace
    method: str
    bound: float
    achieved_error: float
    tight: bool
    s2_uniform: bool
    peak_frequency: float = 0.0

    @property
    def unexpected_tightness(self) -> bool:
        """Tight although the discarded signs are mixed (flagged, not an error)."""
        return self.tight and not self.s2_uniform


def is_canonical(sys: StateSpace, signs, tol: float = 1e-8) -> bool:
    """``A = S A^T S`` and ``b = (c S)^T`` to relative tolerance."""
    S = np.asarray(signs, dtype=float)
    A, b, c = sys.A, sys.b, sys.c
    okA = np.linalg.norm(A - S[:, None] * A.T * S[None, :]) <= tol * np.linalg.norm(A)
    okb = np.linalg.norm(b - S * c) <= tol * np.linalg.norm(b)
    return bool(okA and okb)


def balance(sys: StateSpace, tol: Tolerances = DEFAULT) -> BalancedForm:
    """Square-root balancing.

    With ``P = Lp Lp^T``, ``Q = Lq Lq^T`` and ``Lq^T Lp = U diag(s) V^T`` the
    transformation ``T = Lp V s^-1/2`` (inverse ``s^-1/2 U^T Lq^T``) makes both
    Gramians equal to ``diag(s)``.
    """
    require_stable(sys, tol)
    f = square_root_factors(sys, tol)
    root = np.sqrt(f.s)
    T = (f.Lp @ f.V) / root
    Tinv = (f.U / root).T @ f.Lq.T
    bal = sys.transform(T, Tinv)
    sig, mult = group_values(f.s, tol.multiplicity_gap)
    signs = sign_spectrum(bal, tol)
    return BalancedForm(bal, HankelSpectrum(sig, mult), signs,
                        is_canonical(bal, signs.signs, tol.canonical))


def build_canonical(sigma, signs, gamma) -> StateSpace:
    """Balanced realization fixed by Hankel singular values, signs and input weights.

    ``a_ij = -g_i g_j / (s_i s_j sigma_i + sigma_j)``, ``b = g``, ``c_i = s_i g_i``.
    The result is stable, minimal and balanced with Gramians ``diag(sigma)``.
    """
    sig = np.asarray(sigma, dtype=float).reshape(-1)
    s = np.asarray(signs, dtype=float).reshape(-1)
    g = np.asarray(gamma, dtype=float).reshape(-1)
    if not (sig.size == s.size == g.size):
        raise BadInput("sigma, signs and gamma must have equal length")
    if sig.size == 0:
        raise BadInput("need at least one state")
    if not np.all(np.isfinite(sig)) or np.any(sig <= 0) or np.any(np.diff(sig) >= 0):
        raise BadInput("sigma must be positive and strictly decreasing")
    if not np.all(np.isin(s, (-1.0, 1.0))):
        raise BadInput("signs must be +1 or -1")
    if not np.all(np.isfinite(g)) or np.any(g <= 0):
        raise BadInput("gamma must be positive")
    A = -np.outer(g, g) / (np.outer(s, s) * sig[:, None] + sig[None, :])
    return StateSpace(A, g.copy(), s * g, 0.0)


def to_canonical(sys: StateSpace, tol: Tolerances = DEFAULT) -> BalancedForm:
    """Canonical balanced realization ``A = S A^T S``, ``b = (c S)^T`` with ``b > 0``.

    The input weights come from the diagonal of the balanced Lyapunov
    equation, ``2 sigma_i a_ii + g_i^2 = 0``.
    """
    bal = balance(sys, tol)
    if not bal.sigma.distinct:
        raise RepeatedHSV(f"Hankel singular values repeat (multiplicities {bal.sigma.multiplicities})")
    sig = bal.sigma.values
    gamma = np.sqrt(2.0 * sig * np.abs(np.diag(bal.sys.A)))
    canon = build_canonical(sig, bal.signs.signs, gamma)
    canon = StateSpace(canon.A, canon.b, canon.c, sys.d)
    return BalancedForm(canon, bal.sigma, bal.signs, True, gamma)


def _check_order(bal: BalancedForm, r: int):
    if not 0 <= r <= bal.n:
        raise BadDimension(f"order {r} outside 0..{bal.n}")
    if r not in bal.sigma.boundaries():
        raise SplitsMultiplicityGroup(f"order {r} separates equal Hankel singular values")


def truncate(bal: BalancedForm, r: int) -> StateSpace:
    """Keep the ``r`` leading balanced states."""
    _check_order(bal, r)
    s = bal.sys
    return StateSpace(s.A[:r, :r], s.b[:r], s.c[:r], s.d)


def singular_perturbation(bal: BalancedForm, r: int, tol: Tolerances = DEFAULT) -> StateSpace:
    """Residualize the trailing states: set their derivatives to zero.

    Matches the full model exactly at ``s = 0``.
    """
    _check_order(bal, r)
    s = bal.sys
    if r == s.n:
        return s
    A11, A12 = s.A[:r, :r], s.A[:r, r:]
    A21, A22 = s.A[r:, :r], s.A[r:, r:]
    b1, b2, c1, c2 = s.b[:r], s.b[r:], s.c[:r], s.c[r:]
    try:
        Y = nk.lu_solve(A22, np.column_stack([A21, b2]), tol)
    except SingularMatrix as exc:
        raise SingularA22(str(exc)) from exc
    A22iA21, A22ib2 = Y[:, :r], Y[:, r]
    return StateSpace(A11 - A12 @ A22iA21, b1 - A12 @ A22ib2,
                      c1 - c2 @ A22iA21, s.d - c2 @ A22ib2)


def error_bound(bal: BalancedForm, r: int) -> float:
    """Twice the sum of the distinct Hankel singular values beyond order ``r``."""
    _check_order(bal, r)
    k = bal.sigma.boundaries().index(r)
    return float(2.0 * bal.sigma.sigmas[k:].sum())


def certify(sys: StateSpace | BalancedForm, r: int, method: str = TRUNCATION,
            tol: Tolerances = DEFAULT) -> ReductionCertificate:
    """Reduce to order ``r`` and compare the achieved error with the bound."""
    try:
        method = _METHOD_ALIASES[method]
    except KeyError:
        raise BadInput(f"unknown reduction method {method!r}") from None
    bal = sys if isinstance(sys, BalancedForm) else balance(sys, tol)
    bound = error_bound(bal, r)
    reduced = truncate(bal, r) if method == TRUNCATION else singular_perturbation(bal, r, tol)
    res = hinf_norm(error_system(bal.sys, reduced), tol.hinf, tol)
    achieved = res.norm
    trailing = bal.signs.signs[r:]
    s2_uniform = bool(trailing.size == 0 or np.all(trailing == trailing[0]))
    if bound > 0:
        tight = abs(bound - achieved) <= tol.cert * bound
    else:
        tight = achieved <= 1e-12
    return ReductionCertificate(r, reduced, method, bound, achieved, bool(tight),
                                s2_uniform, res.peak_frequency)


def psi_zero(bal: BalancedForm, r: int, tol: Tolerances = DEFAULT) -> np.ndarray:
    """``-A22 + A21 A11^-1 A12``: symmetric whenever the trailing signs agree."""
    n = bal.n
    if not 1 <= r < n:
        raise BadDimension(f"need 1 <= r < n = {n}, got {r}")
    A = bal.sys.A
    try:
        Y = nk.lu_solve(A[:r, :r], A[:r, r:], tol)
    except SingularMatrix as exc:
        raise SingularA11(str(exc)) from exc
    return -A[r:, r:] + A[r:, :r] @ Y


def asymmetry(M) -> float:
    """``||M - M^T||_F / ||M||_F``."""
    M = np.asarray(M)
    nrm = np.linalg.norm(M)
    return float(np.linalg.norm(M - M.T) / nrm) if nrm else 0.0
