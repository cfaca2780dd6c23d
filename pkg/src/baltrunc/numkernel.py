"""Dense linear-algebra kernels.

Everything downstream (Gramians, balancing, H-infinity norms, arrowhead
checks) goes through the routines here rather than through LAPACK, so the
numerics of the whole package are visible in one file. Matrices are plain
``numpy.ndarray`` objects of dtype float64 (complex128 where noted). The
problem sizes we care about are small (n <= 64), so the implementations
favour clarity over blocking.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import NoConvergence, NotPositiveDefinite, NotSymmetric, SingularMatrix

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues (complex) and, optionally, unit-norm right eigenvectors."""

    values: np.ndarray
    vectors: np.ndarray | None = None

    def __len__(self):
        return len(self.values)


def as_matrix(A, dtype=float) -> np.ndarray:
    a = np.asarray(A, dtype=dtype)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def _require_square(a: np.ndarray):
    if a.shape[-1] != a.shape[-2]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")


# ---------------------------------------------------------------------------
# LU with partial pivoting (batched over leading axes)

def lu_factor(A, tol: Tolerances = DEFAULT, check: bool = True):
    """Factor ``P A = L U`` for a matrix or a stack of matrices.

    Returns the packed factors (unit-lower L below the diagonal, U on and
    above it) and the row permutation of each matrix in the stack. With
    ``check`` set, a pivot below ``tol.pivot * ||A||_inf`` raises
    :class:`SingularMatrix`; without it, such pivots are nudged to that floor
    (used by inverse iteration, where near-singularity is the point).
    """
    a0 = np.asarray(A)
    dtype = np.result_type(a0.dtype, np.float64)
    a = np.array(a0, dtype=dtype, copy=True)
    _require_square(a)
    n = a.shape[-1]
    lead = a.shape[:-2]
    a = a.reshape((-1, n, n))
    m = a.shape[0]
    piv = np.tile(np.arange(n), (m, 1))
    if n == 0:
        return a.reshape(lead + (0, 0)), piv.reshape(lead + (0,))
    rows = np.arange(m)
    norm = np.abs(a).sum(axis=-1).max(axis=-1)
    floor = tol.pivot * norm
    for k in range(n):
        p = k + np.argmax(np.abs(a[:, k:, k]), axis=1)
        swap = p != k
        if np.any(swap):
            r = rows[swap]
            tmp = a[r, k, :].copy()
            a[r, k, :] = a[r, p[swap], :]
            a[r, p[swap], :] = tmp
            tmp = piv[r, k].copy()
            piv[r, k] = piv[r, p[swap]]
            piv[r, p[swap]] = tmp
        pivot = a[:, k, k]
        small = np.abs(pivot) <= floor
        if np.any(small):
            if check:
                raise SingularMatrix(
                    f"pivot {np.abs(pivot[small]).min():.3e} at column {k} "
                    f"below {tol.pivot:g}*||A||_inf")
            nudge = np.where(floor[small] > 0, floor[small], EPS)
            a[small, k, k] = np.where(pivot[small] == 0, nudge, pivot[small] / np.abs(pivot[small]) * nudge)
            pivot = a[:, k, k]
        a[:, k + 1:, k] /= pivot[:, None]
        a[:, k + 1:, k + 1:] -= a[:, k + 1:, k, None] * a[:, k, None, k + 1:]
    return a.reshape(lead + (n, n)), piv.reshape(lead + (n,))


def lu_substitute(lu, piv, B) -> np.ndarray:
    """Solve with packed factors from :func:`lu_factor`."""
    lu = np.asarray(lu)
    n = lu.shape[-1]
    lead = lu.shape[:-2]
    b = np.asarray(B)
    vector = b.ndim == lu.ndim - 1
    if vector:
        b = b[..., None]
    dtype = np.result_type(lu.dtype, b.dtype)
    b = np.broadcast_to(b, lead + b.shape[-2:])
    k = b.shape[-1]
    lu2 = lu.reshape((-1, n, n))
    x = np.take_along_axis(b.reshape((-1, n, k)).astype(dtype), piv.reshape((-1, n, 1)), axis=1)
    for i in range(1, n):
        x[:, i, :] -= np.einsum("bj,bjk->bk", lu2[:, i, :i], x[:, :i, :])
    for i in range(n - 1, -1, -1):
        if i < n - 1:
            x[:, i, :] -= np.einsum("bj,bjk->bk", lu2[:, i, i + 1:], x[:, i + 1:, :])
        x[:, i, :] /= lu2[:, i, i, None]
    x = x.reshape(lead + (n, k))
    return x[..., 0] if vector else x


def lu_solve(A, B, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Solve ``A X = B`` by Gaussian elimination with partial pivoting.

    ``A`` may be a stack ``(..., n, n)`` and ``B`` either ``(..., n)`` or
    ``(..., n, k)``; real and complex inputs are both accepted.
    """
    lu, piv = lu_factor(A, tol)
    return lu_substitute(lu, piv, B)


def inv(A, tol: Tolerances = DEFAULT) -> np.ndarray:
    a = np.asarray(A)
    eye = np.broadcast_to(np.eye(a.shape[-1]), a.shape)
    return lu_solve(a, eye, tol)


# ---------------------------------------------------------------------------
# Nonsymmetric eigenvalues: balancing, Hessenberg reduction, Francis QR

def balance_matrix(A):
    """Parlett-Reinsch diagonal balancing with powers of two.

    Returns the balanced matrix and the scaling vector ``d`` such that
    ``B = diag(d)^-1 A diag(d)``.
    """
    a = np.array(A, dtype=float, copy=True)
    n = a.shape[0]
    d = np.ones(n)
    radix, sqrdx = 2.0, 4.0
    off = ~np.eye(n, dtype=bool)
    # subtracting the diagonal from a full row sum cancels catastrophically
    # when the off-diagonal part is tiny, which can make the scaling cycle;
    # summing the off-diagonal entries directly and capping the passes
    # (as LAPACK does) keeps the loop finite
    for _ in range(100):
        done = True
        for i in range(n):
            c = np.abs(a[off[:, i], i]).sum()
            r = np.abs(a[i, off[i]]).sum()
            if c == 0.0 or r == 0.0:
                continue
            g, f, s = r / radix, 1.0, c + r
            while c < g and f < 1e150:
                f *= radix
                c *= sqrdx
            g = r * radix
            while c > g and f > 1e-150:
                f /= radix
                c /= sqrdx
            if (c + r) / f < 0.95 * s:
                done = False
                a[i, :] /= f
                a[:, i] *= f
                d[i] *= f
        if done:
            break
    return a, d


def hessenberg(A, want_q: bool = False):
    """Householder reduction ``A = Q H Q^H`` to upper Hessenberg form."""
    h = np.array(A, dtype=np.result_type(np.asarray(A).dtype, float), copy=True)
    n = h.shape[0]
    q = np.eye(n, dtype=h.dtype) if want_q else None
    for k in range(n - 2):
        x = h[k + 1:, k].copy()
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        h[k + 1:, k:] -= 2.0 * np.outer(v, v.conj() @ h[k + 1:, k:])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, v.conj())
        h[k + 2:, k] = 0.0
        if q is not None:
            q[:, k + 1:] -= 2.0 * np.outer(q[:, k + 1:] @ v, v.conj())
    return (h, q) if want_q else h


def _hqr(h: np.ndarray, budget: int) -> np.ndarray:
    """Francis double-shift QR on a real upper Hessenberg matrix.

    Eigenvalues only. Indices below are 1-based on a padded copy, which keeps
    the classic EISPACK bookkeeping readable.
    """
    n = h.shape[0]
    a = np.zeros((n + 1, n + 1))
    a[1:, 1:] = h
    wr = np.zeros(n + 1)
    wi = np.zeros(n + 1)
    anorm = np.abs(h).sum()
    nn, t, sweeps = n, 0.0, 0
    x = y = w = 0.0
    while nn >= 1:
        its = 0
        while True:
            for l in range(nn, 1, -1):
                s = abs(a[l - 1, l - 1]) + abs(a[l, l])
                if s == 0.0:
                    s = anorm
                if abs(a[l, l - 1]) <= EPS * s:
                    a[l, l - 1] = 0.0
                    break
            else:
                l = 1
            x = a[nn, nn]
            if l == nn:
                wr[nn], wi[nn] = x + t, 0.0
                nn -= 1
                break
            y = a[nn - 1, nn - 1]
            w = a[nn, nn - 1] * a[nn - 1, nn]
            if l == nn - 1:
                p = 0.5 * (y - x)
                q = p * p + w
                z = np.sqrt(abs(q))
                x += t
                if q >= 0.0:
                    z = p + np.copysign(z, p)
                    wr[nn - 1] = wr[nn] = x + z
                    if z != 0.0:
                        wr[nn] = x - w / z
                    wi[nn - 1] = wi[nn] = 0.0
                else:
                    wr[nn - 1] = wr[nn] = x + p
                    wi[nn - 1], wi[nn] = -z, z
                nn -= 2
                break
            if sweeps >= budget:
                raise NoConvergence(f"QR iteration exceeded {budget} sweeps")
            if its in (10, 20):
                # exceptional shift
                t += x
                idx = np.arange(1, nn + 1)
                a[idx, idx] -= x
                s = abs(a[nn, nn - 1]) + abs(a[nn - 1, nn - 2])
                y = x = 0.75 * s
                w = -0.4375 * s * s
            its += 1
            sweeps += 1
            m = nn - 2
            while m >= l:
                z = a[m, m]
                r = x - z
                s = y - z
                p = (r * s - w) / a[m + 1, m] + a[m, m + 1]
                q = a[m + 1, m + 1] - z - r - s
                r = a[m + 2, m + 1]
                s = abs(p) + abs(q) + abs(r)
                p, q, r = p / s, q / s, r / s
                if m == l:
                    break
                u = abs(a[m, m - 1]) * (abs(q) + abs(r))
                v = abs(p) * (abs(a[m - 1, m - 1]) + abs(z) + abs(a[m + 1, m + 1]))
                if u <= EPS * v:
                    break
                m -= 1
            for i in range(m + 2, nn + 1):
                a[i, i - 2] = 0.0
                if i != m + 2:
                    a[i, i - 3] = 0.0
            for k in range(m, nn):
                if k != m:
                    p = a[k, k - 1]
                    q = a[k + 1, k - 1]
                    r = a[k + 2, k - 1] if k != nn - 1 else 0.0
                    x = abs(p) + abs(q) + abs(r)
                    if x != 0.0:
                        p, q, r = p / x, q / x, r / x
                s = np.copysign(np.sqrt(p * p + q * q + r * r), p)
                if s == 0.0:
                    continue
                if k == m:
                    if l != m:
                        a[k, k - 1] = -a[k, k - 1]
                else:
                    a[k, k - 1] = -s * x
                p += s
                x, y, z = p / s, q / s, r / s
                q, r = q / p, r / p
                js = slice(k, nn + 1)
                pv = a[k, js] + q * a[k + 1, js]
                if k != nn - 1:
                    pv += r * a[k + 2, js]
                    a[k + 2, js] -= pv * z
                a[k + 1, js] -= pv * y
                a[k, js] -= pv * x
                iz = slice(l, min(nn, k + 3) + 1)
                pv = x * a[iz, k] + y * a[iz, k + 1]
                if k != nn - 1:
                    pv += z * a[iz, k + 2]
                    a[iz, k + 2] -= pv * r
                a[iz, k + 1] -= pv * q
                a[iz, k] -= pv
            if l >= nn - 1:
                break
    return wr[1:] + 1j * wi[1:]


def eigenvalues(A, vectors: bool = False, balance: bool = True,
                tol: Tolerances = DEFAULT) -> EigenDecomposition:
    """Eigenvalues of a real square matrix.

    Balancing, Householder reduction to Hessenberg form, then Francis
    double-shift QR with a budget of ``30*n`` sweeps. Complex eigenvalues come
    out in conjugate pairs. With ``vectors`` set, right eigenvectors are added
    by inverse iteration; for defective or repeated eigenvalues these are not
    guaranteed to be independent.
    """
    a = as_matrix(A)
    _require_square(a)
    n = a.shape[0]
    if n == 0:
        return EigenDecomposition(np.zeros(0, complex), np.zeros((0, 0), complex) if vectors else None)
    b = balance_matrix(a)[0] if balance else a
    # an exact power-of-two rescale keeps the shift arithmetic away from
    # underflow and overflow for matrices with extreme magnitudes
    big = np.abs(b).max()
    k = int(np.frexp(big)[1]) if big > 0 else 0
    lam = _hqr(hessenberg(np.ldexp(b, -k)), tol.qr_sweeps_per_dim * n) * 2.0 ** k
    vecs = eigenvectors(a, lam) if vectors else None
    return EigenDecomposition(lam, vecs)


def eigenvectors(A, lam, iterations: int = 3) -> np.ndarray:
    """Right eigenvectors for given eigenvalues by shifted inverse iteration."""
    a = np.asarray(A)
    n = a.shape[0]
    scale = max(np.abs(a).max(), 1.0)
    rng = np.random.default_rng(0)
    out = np.zeros((n, len(lam)), dtype=complex)
    for j, mu in enumerate(lam):
        shifted = a - (mu + 10 * EPS * scale) * np.eye(n)
        lu, piv = lu_factor(shifted.astype(complex), check=False)
        v = rng.standard_normal(n) + 0j
        for _ in range(iterations):
            v = lu_substitute(lu, piv, v)
            v /= np.linalg.norm(v)
        k = np.argmax(np.abs(v))
        out[:, j] = v * (abs(v[k]) / v[k])
    return out


def schur(A, tol: Tolerances = DEFAULT):
    """Complex Schur form ``A = Z T Z^H`` by single-shift QR on a Hessenberg matrix."""
    a = np.asarray(A, dtype=complex)
    _require_square(a)
    n = a.shape[0]
    h, z = hessenberg(a, want_q=True)
    hi, its, sweeps = n - 1, 0, 0
    budget = tol.qr_sweeps_per_dim * max(n, 1)
    while hi > 0:
        l = hi
        while l > 0:
            s = abs(h[l - 1, l - 1]) + abs(h[l, l])
            if s == 0.0:
                s = np.abs(h).sum()
            if abs(h[l, l - 1]) <= EPS * s:
                h[l, l - 1] = 0.0
                break
            l -= 1
        if l == hi:
            hi -= 1
            its = 0
            continue
        if sweeps >= budget:
            raise NoConvergence(f"complex QR exceeded {budget} sweeps")
        a11, a12, a21, a22 = h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi]
        if its in (10, 20):
            mu = a22 + abs(a21) * 1.5
        else:
            half = 0.5 * (a11 - a22)
            disc = np.sqrt(half * half + a12 * a21)
            mu1, mu2 = a22 - a12 * a21 / (half + disc) if half + disc != 0 else a22, a22
            if half - disc != 0:
                mu2 = a22 - a12 * a21 / (half - disc)
            mu = mu1 if abs(mu1 - a22) <= abs(mu2 - a22) else mu2
        its += 1
        sweeps += 1
        x, y = h[l, l] - mu, h[l + 1, l]
        for k in range(l, hi):
            if k > l:
                x, y = h[k, k - 1], h[k + 1, k - 1]
            r = np.hypot(abs(x), abs(y))
            if r == 0.0:
                continue
            if x == 0:
                c, s = 0.0, np.conj(y) / abs(y)
            else:
                c = abs(x) / r
                s = (x / abs(x)) * np.conj(y) / r
            g = np.array([[c, s], [-np.conj(s), c]])
            cols = slice(max(k - 1, 0), n)
            h[k:k + 2, cols] = g @ h[k:k + 2, cols]
            rows = slice(0, min(k + 3, hi + 1))
            h[rows, k:k + 2] = h[rows, k:k + 2] @ g.conj().T
            z[:, k:k + 2] = z[:, k:k + 2] @ g.conj().T
            if k > l:
                h[k + 1, k - 1] = 0.0
    return np.triu(h), z


def solve_upper(T, B) -> np.ndarray:
    """Back substitution with an upper-triangular ``T``."""
    n = T.shape[0]
    x = np.array(B, dtype=np.result_type(T.dtype, np.asarray(B).dtype), copy=True)
    for i in range(n - 1, -1, -1):
        if i < n - 1:
            x[i] -= T[i, i + 1:] @ x[i + 1:]
        if T[i, i] == 0:
            raise SingularMatrix("zero on the diagonal of a triangular factor")
        x[i] /= T[i, i]
    return x


# ---------------------------------------------------------------------------
# Symmetric kernels

def _check_symmetric(a, tol: Tolerances):
    scale = np.abs(a).sum(axis=1).max() if a.size else 0.0
    asym = np.abs(a - a.T).sum(axis=1).max() if a.size else 0.0
    if asym > tol.symmetry * scale:
        raise NotSymmetric(f"||A - A^T||_inf = {asym:.3e} exceeds {tol.symmetry:g}*||A||_inf")


def sym_eig(A, tol: Tolerances = DEFAULT):
    """Cyclic Jacobi eigen-decomposition of a symmetric matrix.

    Returns eigenvalues in descending order and the orthogonal matrix of
    eigenvectors, ``A = V diag(lam) V^T``.
    """
    a = as_matrix(A)
    _require_square(a)
    _check_symmetric(a, tol)
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    v = np.eye(n)
    norm = np.linalg.norm(a)
    for _ in range(tol.jacobi_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= EPS * max(np.sqrt(abs(a[p, p] * a[q, q])), 1e-3 * norm):
                    continue
                rotated = True
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p], a[:, q] = c * ap - s * aq, s * ap + c * aq
                ap, aq = a[p, :].copy(), a[q, :].copy()
                a[p, :], a[q, :] = c * ap - s * aq, s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p], v[:, q] = c * vp - s * vq, s * vp + c * vq
        if not rotated:
            break
    else:
        raise NoConvergence("Jacobi sweeps exhausted")
    lam = np.diag(a).copy()
    order = np.argsort(-lam, kind="stable")
    return lam[order], v[:, order]


def svd(M, tol: Tolerances = DEFAULT):
    """One-sided Jacobi SVD, ``M = U diag(s) V^T`` with ``s`` descending.

    Small singular values are computed to high relative accuracy, which the
    square-root balancing step relies on when Hankel singular values span many
    decades.
    """
    u = as_matrix(M).copy()
    m, n = u.shape
    v = np.eye(n)
    for _ in range(tol.jacobi_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = u[:, p] @ u[:, p]
                beta = u[:, q] @ u[:, q]
                gamma = u[:, p] @ u[:, q]
                if abs(gamma) <= EPS * np.sqrt(alpha * beta) or gamma == 0.0:
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = np.copysign(1.0, zeta) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                up, uq = u[:, p].copy(), u[:, q].copy()
                u[:, p], u[:, q] = c * up - s * uq, s * up + c * uq
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p], v[:, q] = c * vp - s * vq, s * vp + c * vq
        if not rotated:
            break
    else:
        raise NoConvergence("one-sided Jacobi sweeps exhausted")
    sig = np.linalg.norm(u, axis=0)
    order = np.argsort(-sig, kind="stable")
    sig, u, v = sig[order], u[:, order], v[:, order]
    nz = sig > 0
    u[:, nz] /= sig[nz]
    return u, sig, v


def cholesky(A, tol: Tolerances = DEFAULT) -> np.ndarray:
    """Lower-triangular ``L`` with ``L L^T = A`` and positive diagonal."""
    a = as_matrix(A)
    _require_square(a)
    _check_symmetric(a, tol)
    n = a.shape[0]
    L = np.zeros_like(a)
    floor = n * EPS * (np.abs(np.diag(a)).max() if n else 0.0)
    for j in range(n):
        pivot = a[j, j] - L[j, :j] @ L[j, :j]
        if pivot <= floor:
            raise NotPositiveDefinite(f"pivot {pivot:.3e} at row {j}")
        L[j, j] = np.sqrt(pivot)
        L[j + 1:, j] = (a[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / L[j, j]
    return L
