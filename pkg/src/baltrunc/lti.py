"""SISO state-space systems ``x' = A x + b u``, ``y = c x + d u``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numkernel as nk
from .config import DEFAULT, Tolerances
from .errors import BadDimension, NotStable, SingularMatrix


def _frozen(x) -> np.ndarray:
    x = np.array(x, dtype=float)
    x.setflags(write=False)
    return x


@dataclass(frozen=True, eq=False)
class StateSpace:
    """Dense realization with transfer function ``c (sI - A)^-1 b + d``.

    ``b`` and ``c`` are stored as 1-D arrays of length ``n``. An order-zero
    system (empty ``A``) is a pure feedthrough ``d``.
    """

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: float = 0.0

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        if A.size == 0:
            A = A.reshape(0, 0)
        b = np.asarray(self.b, dtype=float).reshape(-1)
        c = np.asarray(self.c, dtype=float).reshape(-1)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise BadDimension(f"A must be square, got shape {A.shape}")
        n = A.shape[0]
        if b.shape != (n,) or c.shape != (n,):
            raise BadDimension(f"b and c must have length {n}, got {b.size} and {c.size}")
        d = float(np.asarray(self.d, dtype=float).reshape(-1)[0]) if np.size(self.d) == 1 else None
        if d is None:
            raise BadDimension("d must be a scalar")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b)) and np.all(np.isfinite(c)) and np.isfinite(d)):
            raise ValueError("system entries must be finite")
        object.__setattr__(self, "A", _frozen(A))
        object.__setattr__(self, "b", _frozen(b))
        object.__setattr__(self, "c", _frozen(c))
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def transform(self, T, Tinv=None) -> "StateSpace":
        """Change of coordinates ``x = T z``."""
        T = np.asarray(T, dtype=float)
        Tinv = nk.inv(T) if Tinv is None else np.asarray(Tinv, dtype=float)
        return StateSpace(Tinv @ self.A @ T, Tinv @ self.b, self.c @ T, self.d)

    def permute(self, order) -> "StateSpace":
        order = np.asarray(order, dtype=int)
        return StateSpace(self.A[np.ix_(order, order)], self.b[order], self.c[order], self.d)

    def __eq__(self, other):
        if not isinstance(other, StateSpace):
            return NotImplemented
        return (self.n == other.n and self.d == other.d and np.array_equal(self.A, other.A)
                and np.array_equal(self.b, other.b) and np.array_equal(self.c, other.c))

    __hash__ = None


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    spectral_abscissa: float


def static_gain(d: float) -> StateSpace:
    return StateSpace(np.zeros((0, 0)), np.zeros(0), np.zeros(0), d)


def transfer_eval(sys: StateSpace, s: complex, tol: Tolerances = DEFAULT) -> complex:
    """``G(s)`` by a complex LU solve of ``(sI - A) x = b``."""
    if sys.n == 0:
        return complex(sys.d)
    M = s * np.eye(sys.n) - sys.A
    x = nk.lu_solve(M.astype(complex), sys.b.astype(complex), tol)
    return complex(sys.c @ x + sys.d)


def transfer_batch(sys: StateSpace, s, tol: Tolerances = DEFAULT) -> np.ndarray:
    """``G`` at many points at once; any pole hit raises :class:`SingularMatrix`."""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    if sys.n == 0 or s.size == 0:
        return np.full(s.shape, complex(sys.d))
    M = s[:, None, None] * np.eye(sys.n) - sys.A
    x = nk.lu_solve(M, np.broadcast_to(sys.b.astype(complex), (s.size, sys.n)), tol)
    return x @ sys.c + sys.d


def check_stability(sys: StateSpace, tol: Tolerances = DEFAULT) -> StabilityReport:
    """Asymptotic stability; a spectral abscissa of exactly zero is unstable."""
    if sys.n == 0:
        return StabilityReport(True, -np.inf)
    lam = nk.eigenvalues(sys.A, tol=tol).values
    alpha = float(np.max(lam.real))
    return StabilityReport(alpha < 0.0, alpha)


def require_stable(sys: StateSpace, tol: Tolerances = DEFAULT) -> StabilityReport:
    rep = check_stability(sys, tol)
    if not rep.stable:
        raise NotStable(f"spectral abscissa {rep.spectral_abscissa:.6g} is not negative")
    return rep


def check_minimality(sys: StateSpace, tol: Tolerances = DEFAULT) -> bool:
    """Both Gramians numerically positive definite.

    The test is ``min eig > tol.minimality * max eig`` for each Gramian. The
    default threshold of ``1e-14`` keeps lightly controllable but genuinely
    minimal models (Hankel singular values spanning nine decades) on the
    right side.
    """
    from .gramian import gramians

    require_stable(sys, tol)
    if sys.n == 0:
        return True
    pair = gramians(sys, tol)
    for G in (pair.P, pair.Q):
        lam, _ = nk.sym_eig(G, tol)
        if not lam[0] > 0 or lam[-1] <= tol.minimality * lam[0]:
            return False
    return True


def leading_subsystem(sys: StateSpace, k: int) -> StateSpace:
    """The first ``k`` states: ``(A[:k,:k], b[:k], c[:k], d)``."""
    if not 1 <= k < sys.n:
        raise BadDimension(f"need 1 <= k < n = {sys.n}, got k = {k}")
    return StateSpace(sys.A[:k, :k], sys.b[:k], sys.c[:k], sys.d)


def error_system(full: StateSpace, reduced: StateSpace) -> StateSpace:
    """Block-diagonal realization of ``G - G_r``."""
    n, r = full.n, reduced.n
    A = np.zeros((n + r, n + r))
    A[:n, :n] = full.A
    A[n:, n:] = reduced.A
    return StateSpace(A, np.concatenate([full.b, reduced.b]),
                      np.concatenate([full.c, -reduced.c]), full.d - reduced.d)


def dc_gain(sys: StateSpace, tol: Tolerances = DEFAULT) -> float:
    """``d - c A^-1 b``."""
    if sys.n == 0:
        return sys.d
    return float(sys.d - sys.c @ nk.lu_solve(sys.A, sys.b, tol))
