"""Arrowhead realizations and sign parameters read off their entries.

An arrowhead system has ``A`` supported on the diagonal ``d``, the first row
(``alpha``) and the first column (``beta``), with ``b = gamma e1`` and
``c = e1^T``. Its transfer function is the continued-fraction-like

    G(s) = gamma / (s - d1 - sum_i alpha_i beta_i / (s - d_i)).

For minimum-phase arrows the multiset of sign parameters is
``{sign(gamma)} + {sign(gamma alpha_i beta_i)}``, so no Gramian is needed to
know how many states carry each sign.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import numkernel as nk
from .config import DEFAULT, Tolerances
from .errors import (BadInput, ComplexZeros, DegreeMismatch, HypothesisViolated, NotCoprime,
                     NotStable, PoleHit, RepeatedZeros, SingularShift)
from .gramian import cross_gramian, sign_spectrum
from .lti import StateSpace, check_stability


@dataclass(frozen=True, eq=False)
class ArrowheadRealization:
    d: np.ndarray      # diagonal, head first
    alpha: np.ndarray  # first row, entries 2..n
    beta: np.ndarray   # first column, entries 2..n
    gamma: float       # input weight, b = gamma e1

    def __post_init__(self):
        d = np.array(self.d, dtype=float).reshape(-1)
        a = np.array(self.alpha, dtype=float).reshape(-1)
        b = np.array(self.beta, dtype=float).reshape(-1)
        if d.size == 0:
            raise BadInput("an arrowhead needs at least one state")
        if a.size != d.size - 1 or b.size != d.size - 1:
            raise BadInput(f"alpha and beta need {d.size - 1} entries, got {a.size} and {b.size}")
        g = float(self.gamma)
        if g == 0.0 or not np.isfinite(g):
            raise BadInput("gamma must be finite and nonzero")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise BadInput("arrowhead entries must be finite")
        for name, v in (("d", d), ("alpha", a), ("beta", b)):
            v.setflags(write=False)
            object.__setattr__(self, name, v)
        object.__setattr__(self, "gamma", g)

    @property
    def n(self) -> int:
        return self.d.size

    def scale(self) -> float:
        return float(max(np.abs(self.d).max(), np.abs(self.alpha).max(initial=0.0),
                         np.abs(self.beta).max(initial=0.0)))


@dataclass(frozen=True)
class SignDiagnosis:
    sign_multiset: tuple[int, ...]        # sorted descending
    formula_signs: tuple[int, ...]        # per arrow state, head first
    hypothesis_ok: bool
    uniform_trailing: bool
    canonical_permutation: tuple[int, ...] | None  # 1-based: state i -> sign index
    reason: str = ""


def to_state_space(ar: ArrowheadRealization) -> StateSpace:
    n = ar.n
    A = np.diag(ar.d)
    A[0, 1:] = ar.alpha
    A[1:, 0] = ar.beta
    b = np.zeros(n)
    b[0] = ar.gamma
    c = np.zeros(n)
    c[0] = 1.0
    return StateSpace(A, b, c, 0.0)


def arrowhead_inverse(ar: ArrowheadRealization, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Inverse of the arrow matrix as a diagonal plus a rank-one term.

    ``A^-1 = diag(0, D^-1) + rho u v^T`` with ``u = (-1, D^-1 beta)``,
    ``v = (-1, alpha D^-1)`` and ``rho = 1 / (d1 - alpha D^-1 beta)``.
    """
    floor = tol.arrow_shift * ar.scale()
    tail = ar.d[1:]
    if np.any(np.abs(tail) <= floor):
        raise SingularShift("a trailing diagonal entry is zero")
    schur = ar.d[0] - np.sum(ar.alpha * ar.beta / tail)
    if abs(schur) <= floor:
        raise SingularShift("the head Schur complement vanishes")
    u = np.concatenate([[-1.0], ar.beta / tail])
    v = np.concatenate([[-1.0], ar.alpha / tail])
    out = np.outer(u, v) / schur
    out[np.arange(1, ar.n), np.arange(1, ar.n)] += 1.0 / tail
    return out


def arrowhead_transfer(ar: ArrowheadRealization, s: complex, tol: Tolerances = DEFAULT) -> complex:
    floor = tol.arrow_shift * max(ar.scale(), abs(s))
    gaps = s - ar.d[1:]
    if np.any(np.abs(gaps) <= floor):
        raise PoleHit(f"s = {s} coincides with a trailing diagonal entry")
    den = s - ar.d[0] - np.sum(ar.alpha * ar.beta / gaps)
    if abs(den) <= floor:
        raise PoleHit(f"s = {s} is a pole")
    return complex(ar.gamma / den)


def check_arrowhead_minimality(ar: ArrowheadRealization, tol: Tolerances = DEFAULT) -> bool:
    """Nonzero arms and pairwise distinct trailing diagonal entries."""
    sc = ar.scale()
    if np.any(np.abs(ar.alpha) <= tol.arrow_zero * sc) or np.any(np.abs(ar.beta) <= tol.arrow_zero * sc):
        return False
    tail = np.sort(ar.d[1:])
    return not np.any(np.diff(tail) <= tol.arrow_gap * sc)


def leading_subsystems_stable(ar: ArrowheadRealization, tol: Tolerances = DEFAULT) -> bool:
    """Every leading principal block of the arrow matrix is Hurwitz."""
    A = to_state_space(ar).A
    for k in range(1, ar.n + 1):
        if k == 1:
            ok = A[0, 0] < 0
        else:
            ok = check_stability(StateSpace(A[:k, :k], np.zeros(k), np.zeros(k)), tol).stable
        if not ok:
            return False
    return True


def formula_signs(ar: ArrowheadRealization) -> np.ndarray:
    g = np.sign(ar.gamma)
    return np.concatenate([[g], np.sign(ar.gamma * ar.alpha * ar.beta)]).astype(int)


def _participation(X: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """``p[i, j]``: weight of state ``i`` in the eigenpair ``j`` of ``X``."""
    V = nk.eigenvectors(X, lam)
    W = nk.eigenvectors(X.T, lam)
    num = np.abs(W.conj() * V)
    den = np.abs(np.sum(W.conj() * V, axis=0))
    return num / np.where(den > 0, den, 1.0)


def match_signs(ar: ArrowheadRealization, tol: Tolerances = DEFAULT) -> tuple[int, ...] | None:
    """Assign each arrow state to a position of the dense sign spectrum.

    Only positions with the state's own sign are admissible. Ties among equal
    signs go to the assignment that maximizes total participation of the
    states in the corresponding cross-Gramian eigenvectors. Returns ``None``
    if the sign multisets disagree.
    """
    sys = to_state_space(ar)
    spectrum = sign_spectrum(sys, tol)
    own = formula_signs(ar)
    if sorted(own) != sorted(spectrum.signs.tolist()):
        return None
    p = _participation(cross_gramian(sys, tol), spectrum.lambdas)
    cost = -p
    cost[own[:, None] != spectrum.signs[None, :]] = 1e6
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(ar.n, dtype=int)
    perm[rows] = cols
    return tuple(int(j) + 1 for j in perm)


def diagnose_signs(ar: ArrowheadRealization, strict: bool = False,
                   tol: Tolerances = DEFAULT) -> SignDiagnosis:
    """Sign parameters from the arrow entries, with the conditions that justify them.

    The formula needs a minimal arrow whose diagonal is negative and whose
    leading blocks are all stable. When those fail the multiset is still
    returned with ``hypothesis_ok=False``, or :class:`HypothesisViolated` is
    raised if ``strict``. When every ``alpha_i beta_i`` is negative the order
    is known outright (head sign first, the rest opposite); otherwise the
    permutation is recovered by matching against the dense cross Gramian.
    """
    own = formula_signs(ar)
    multiset = tuple(sorted(own.tolist(), reverse=True))
    reason = ""
    if not check_arrowhead_minimality(ar, tol):
        reason = "arrow is not minimal"
    elif np.any(ar.d >= 0):
        reason = "diagonal has a non-negative entry"
    elif not leading_subsystems_stable(ar, tol):
        reason = "a leading subsystem is unstable"
    ok = not reason
    if strict and not ok:
        raise HypothesisViolated(reason)
    uniform = bool(np.all(ar.alpha * ar.beta < 0))
    if uniform:
        perm = tuple(range(1, ar.n + 1))
    elif ok:
        perm = match_signs(ar, tol)
    else:
        perm = None
    return SignDiagnosis(multiset, tuple(own.tolist()), ok, uniform, perm, reason)


def permuted_realization(ar: ArrowheadRealization, tol: Tolerances = DEFAULT):
    """Reorder the trailing states into canonical sign order.

    Returns the reordered arrow and the 1-based position ``k`` that the head
    state occupies in the canonical order; inserting ``sign(gamma)`` at
    position ``k`` among the trailing signs reproduces the sign spectrum.
    """
    diag = diagnose_signs(ar, strict=True, tol=tol)
    perm = diag.canonical_permutation
    if perm is None:
        raise HypothesisViolated("sign multisets of the formula and the cross Gramian disagree")
    perm = np.asarray(perm)
    order = 1 + np.argsort(perm[1:], kind="stable")
    out = ArrowheadRealization(np.concatenate([[ar.d[0]], ar.d[order]]),
                               ar.alpha[order - 1], ar.beta[order - 1], ar.gamma)
    return out, int(perm[0])


def permuted_state_space(ar: ArrowheadRealization, perm) -> StateSpace:
    """Dense realization with state ``i`` moved to position ``perm[i]`` (1-based)."""
    perm = np.asarray(perm, dtype=int) - 1
    order = np.argsort(perm)
    return to_state_space(ar).permute(order)


def _newton_polish(coeffs, z, steps: int = 3):
    dp = np.polyder(coeffs)
    for _ in range(steps):
        dv = np.polyval(dp, z)
        step = np.where(dv != 0, np.polyval(coeffs, z) / np.where(dv != 0, dv, 1.0), 0.0)
        z = z - step
    return z


def _roots(coeffs, tol: Tolerances) -> np.ndarray:
    """Roots of a polynomial via companion-matrix eigenvalues."""
    c = np.asarray(coeffs, dtype=float)
    m = c.size - 1
    if m == 0:
        return np.zeros(0, complex)
    C = np.zeros((m, m))
    C[0, :] = -c[1:] / c[0]
    C[np.arange(1, m), np.arange(m - 1)] = 1.0
    return nk.eigenvalues(C, tol=tol).values


def _strip(coeffs, name: str) -> np.ndarray:
    c = np.atleast_1d(np.asarray(coeffs, dtype=float))
    if c.ndim != 1 or not np.all(np.isfinite(c)):
        raise BadInput(f"{name} must be a finite coefficient list")
    nz = np.flatnonzero(c)
    if nz.size == 0:
        raise DegreeMismatch(f"{name} is the zero polynomial")
    return c[nz[0]:]


def canonical_arrowhead_from_tf(numer, denom, tol: Tolerances = DEFAULT) -> ArrowheadRealization:
    """Arrowhead realization of ``numer/denom`` with first column ``-1``.

    ``denom = numer * (mu s + q0) + R``; the numerator zeros become the
    trailing diagonal, the residues of ``R/numer`` (scaled by ``1/mu``) the
    first row, and ``-q0/mu`` the head. Coefficients run from the highest
    power down.
    """
    N = _strip(numer, "numerator")
    D = _strip(denom, "denominator")
    if D.size != N.size + 1:
        raise DegreeMismatch(f"denominator degree must exceed numerator degree by one "
                             f"(got {D.size - 1} and {N.size - 1})")
    poles = _roots(D, tol)
    if np.any(poles.real >= 0):
        raise NotStable("denominator is not Hurwitz")
    Q, _ = np.polydiv(D, N)
    mu, q0 = float(Q[0]), float(Q[1])
    gamma = 1.0 / mu
    head = -gamma * q0
    n = D.size - 1
    if n == 1:
        return ArrowheadRealization([head], [], [], gamma)
    z = _roots(N, tol)
    zscale = max(1.0, np.abs(z).max())
    dist = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(dist, np.inf)
    if np.any(dist <= tol.zero_merge * zscale):
        raise RepeatedZeros("numerator has a repeated zero")
    if np.any(np.abs(z.imag) > tol.zero_imag * np.maximum(np.abs(z), 1.0)):
        raise ComplexZeros("numerator has complex zeros")
    z = _newton_polish(N, np.sort(z.real))
    if np.any(np.diff(z) <= tol.zero_merge * zscale):
        raise RepeatedZeros("numerator has a repeated zero")
    Dz = np.polyval(D, z)
    size = np.polyval(np.abs(D), np.abs(z))
    if np.any(np.abs(Dz) <= tol.coprime * size):
        raise NotCoprime("numerator and denominator share a zero")
    # R(z) = D(z) at a zero of N, and N'(z) from the factored form; both avoid
    # the rounding carried by the division remainder and the expanded derivative
    diff = z[:, None] - z[None, :]
    np.fill_diagonal(diff, 1.0)
    residues = Dz / (N[0] * np.prod(diff, axis=1))
    return ArrowheadRealization(np.concatenate([[head], z]), gamma * residues,
                                -np.ones(n - 1), gamma)


def detect_arrowhead(sys: StateSpace, tol: Tolerances = DEFAULT) -> ArrowheadRealization | None:
    """Arrow parameters of a dense system already in arrowhead form, else ``None``.

    Output scaling ``c = c1 e1^T`` is folded into ``gamma``.
    """
    n = sys.n
    if n == 0 or sys.d != 0.0:
        return None
    A = sys.A
    floor = tol.arrow_zero * max(np.abs(A).max(), 1e-300)
    mask = np.ones((n, n), dtype=bool)
    mask[0, :] = mask[:, 0] = False
    mask[np.arange(n), np.arange(n)] = False
    if np.any(np.abs(A[mask]) > floor):
        return None
    b, c = sys.b, sys.c
    if b[0] == 0.0 or c[0] == 0.0:
        return None
    if np.any(np.abs(b[1:]) > tol.arrow_zero * abs(b[0])) or np.any(np.abs(c[1:]) > tol.arrow_zero * abs(c[0])):
        return None
    return ArrowheadRealization(np.diag(A).copy(), A[0, 1:].copy(), A[1:, 0].copy(), b[0] * c[0])
