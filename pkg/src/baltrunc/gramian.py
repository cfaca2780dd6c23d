"""Lyapunov and Sylvester solvers, Gramians, Hankel singular values and signs."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numkernel as nk
from .config import DEFAULT, Tolerances
from .errors import ComplexEigenvalue, NotMinimal, NotPositiveDefinite, NotStable
from .lti import StateSpace, check_stability


@dataclass(frozen=True)
class GramianPair:
    P: np.ndarray  # reachability
    Q: np.ndarray  # observability


@dataclass(frozen=True)
class HankelSpectrum:
    """Distinct Hankel singular values (descending) with their multiplicities."""

    sigmas: np.ndarray
    multiplicities: tuple[int, ...]

    @property
    def values(self) -> np.ndarray:
        """One entry per state, repeated according to multiplicity."""
        return np.repeat(self.sigmas, self.multiplicities)

    @property
    def distinct(self) -> bool:
        return all(m == 1 for m in self.multiplicities)

    def boundaries(self) -> list[int]:
        """Orders ``r`` that do not cut through a group of equal values."""
        return [int(k) for k in np.cumsum((0,) + tuple(self.multiplicities))]


@dataclass(frozen=True)
class SignSpectrum:
    signs: np.ndarray    # +1 / -1, aligned with HankelSpectrum.values
    lambdas: np.ndarray  # cross-Gramian eigenvalues, |lambda| non-increasing


def _assert_stable(A, tol: Tolerances):
    if A.shape[0] and not check_stability(StateSpace(A, np.zeros(len(A)), np.zeros(len(A))), tol).stable:
        raise NotStable("coefficient matrix has an eigenvalue with non-negative real part")


def _kron_solver(A, B, tol: Tolerances):
    # vec(AX + XB) = (I kron A + B^T kron I) vec(X), column-major vec
    n, m = A.shape[0], B.shape[0]
    K = np.kron(np.eye(m), A) + np.kron(B.T, np.eye(n))
    lu, piv = nk.lu_factor(K, tol)
    return lambda C: nk.lu_substitute(lu, piv, -C.reshape(-1, order="F")).reshape((n, m), order="F")


def _schur_solver(A, B, tol: Tolerances):
    TA, UA = nk.schur(A, tol)
    TB, UB = nk.schur(B, tol)
    n, m = A.shape[0], B.shape[0]
    eye = np.eye(n)

    def solve(C):
        F = -(UA.conj().T @ C @ UB)
        Y = np.zeros((n, m), dtype=complex)
        for k in range(m):
            rhs = F[:, k] - Y[:, :k] @ TB[:k, k]
            Y[:, k] = nk.solve_upper(TA + TB[k, k] * eye, rhs)
        return (UA @ Y @ UB.conj().T).real

    return solve


def _sylvester(A, B, C, tol: Tolerances, refine: int = 1):
    """``A X + X B + C = 0`` with ``refine`` steps of residual correction.

    One correction step recovers roughly two digits in the smallest Gramian
    eigenvalues, which is what the smallest Hankel singular values feed on.
    """
    if A.shape[0] == 0:
        return np.zeros((0, 0))
    if max(A.shape[0], B.shape[0]) <= tol.kron_max_dim:
        solve = _kron_solver(A, B, tol)
    else:
        solve = _schur_solver(A, B, tol)
    X = solve(C)
    for _ in range(refine):
        X = X + solve(A @ X + X @ B + C)
    return X


def solve_lyapunov(A, M, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Solve ``A X + X A^T + M = 0`` for stable ``A`` and symmetric ``M``.

    Kronecker-vectorized LU for small orders, Bartels-Stewart on complex
    Schur forms above ``tol.kron_max_dim``. The result is symmetrized.
    """
    A = nk.as_matrix(A)
    M = nk.as_matrix(M)
    _assert_stable(A, tol)
    X = _sylvester(A, A.T, M, tol)
    return 0.5 * (X + X.T)


def solve_sylvester(A, C, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Solve ``A X + X A + C = 0`` for stable ``A``."""
    A = nk.as_matrix(A)
    C = nk.as_matrix(C)
    _assert_stable(A, tol)
    return _sylvester(A, A, C, tol)


def gramians(sys: StateSpace, tol: Tolerances = DEFAULT) -> GramianPair:
    P = solve_lyapunov(sys.A, np.outer(sys.b, sys.b), tol)
    Q = solve_lyapunov(sys.A.T, np.outer(sys.c, sys.c), tol)
    return GramianPair(P, Q)


def cross_gramian(sys: StateSpace, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Solution of ``A X + X A + b c = 0``; for SISO systems ``X^2 = P Q``."""
    return solve_sylvester(sys.A, np.outer(sys.b, sys.c), tol)


@dataclass(frozen=True)
class SquareRootFactors:
    """Cholesky factors of the Gramians and the SVD of ``Lq^T Lp``."""

    Lp: np.ndarray
    Lq: np.ndarray
    U: np.ndarray
    s: np.ndarray
    V: np.ndarray


def square_root_factors(sys: StateSpace, tol: Tolerances = DEFAULT) -> SquareRootFactors:
    pair = gramians(sys, tol)
    try:
        Lp = nk.cholesky(pair.P, tol)
        Lq = nk.cholesky(pair.Q, tol)
    except NotPositiveDefinite as exc:
        raise NotMinimal(f"Gramian is not positive definite ({exc})") from exc
    U, s, V = nk.svd(Lq.T @ Lp, tol)
    if sys.n and s[-1] <= tol.hsv_floor * s[0]:
        raise NotMinimal(f"smallest Hankel singular value {s[-1]:.3e} is below "
                         f"{tol.hsv_floor:g} * {s[0]:.3e}")
    return SquareRootFactors(Lp, Lq, U, s, V)


def group_values(values, gap: float) -> tuple[np.ndarray, tuple[int, ...]]:
    """Merge a descending sequence into groups whose consecutive gap is small."""
    groups: list[list[float]] = []
    for v in values:
        if groups and groups[-1][-1] - v <= gap * groups[-1][-1]:
            groups[-1].append(v)
        else:
            groups.append([v])
    sig = np.array([np.mean(g) for g in groups])
    return sig, tuple(len(g) for g in groups)


def hankel_spectrum(sys: StateSpace, tol: Tolerances = DEFAULT) -> HankelSpectrum:
    """Hankel singular values from the singular values of ``Lq^T Lp``.

    Mathematically these are the square roots of the eigenvalues of ``P Q``;
    going through the Cholesky factors keeps the smallest values accurate
    relative to their own size rather than to ``sigma_1``.
    """
    f = square_root_factors(sys, tol)
    sig, mult = group_values(f.s, tol.multiplicity_gap)
    return HankelSpectrum(sig, mult)


def sign_spectrum(sys: StateSpace, tol: Tolerances = DEFAULT) -> SignSpectrum:
    """Signs of the cross-Gramian eigenvalues, ordered by ``|lambda|``.

    Within a group of (nearly) equal magnitudes the eigenvalues are listed
    positive first.
    """
    X = cross_gramian(sys, tol)
    lam = nk.eigenvalues(X, tol=tol).values
    scale = np.abs(lam).max() if lam.size else 0.0
    bad = np.abs(lam.imag) > tol.complex_eig * np.maximum(np.abs(lam), 1e3 * nk.EPS * scale)
    if np.any(bad):
        raise ComplexEigenvalue(f"cross Gramian eigenvalue {lam[bad][0]:.6g} is not real")
    lam = lam.real
    order = np.argsort(-np.abs(lam), kind="stable")
    lam = lam[order]
    _, mult = group_values(np.abs(lam), tol.multiplicity_gap)
    out, start = [], 0
    for m in mult:
        out.extend(sorted(lam[start:start + m], reverse=True))
        start += m
    lam = np.array(out)
    if np.any(lam == 0.0):
        raise NotMinimal("cross Gramian is singular")
    return SignSpectrum(np.sign(lam).astype(int), lam)
