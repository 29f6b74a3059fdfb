"""Real symmetric eigenvalue machinery.

Implicit-shift QL for symmetric tridiagonal matrices, Householder reduction
for dense symmetric matrices, Cholesky reduction for the symmetric-definite
generalized problem, and a determinant sign scan for energy-dependent
tridiagonal wave operators.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import AsymmetryError, ConvergenceError, DomainError, NotPositiveDefiniteError

_EPS = np.finfo(float).eps
_SAFMIN = np.finfo(float).tiny


@dataclass(frozen=True)
class SymTridiag:
    """Real symmetric tridiagonal matrix: diagonal d (N), off-diagonal e (N-1)."""

    d: np.ndarray
    e: np.ndarray

    def __post_init__(self):
        d = np.array(self.d, dtype=float).reshape(-1)
        e = np.array(self.e, dtype=float).reshape(-1)
        if d.size < 1:
            raise DomainError("empty tridiagonal matrix")
        if e.size != d.size - 1:
            raise DomainError(f"off-diagonal length {e.size} does not match N-1 = {d.size - 1}")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise DomainError("non-finite entries in tridiagonal matrix")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "e", e)

    @property
    def n(self):
        return self.d.size

    def dense(self):
        return np.diag(self.d) + np.diag(self.e, 1) + np.diag(self.e, -1)

    def matvec(self, v):
        v = np.asarray(v, dtype=float)
        out = self.d[:, None] * v if v.ndim == 2 else self.d * v
        if self.n > 1:
            if v.ndim == 2:
                out[:-1] += self.e[:, None] * v[1:]
                out[1:] += self.e[:, None] * v[:-1]
            else:
                out[:-1] += self.e * v[1:]
                out[1:] += self.e * v[:-1]
        return out

    def leading(self, k):
        """Leading k x k principal submatrix."""
        return SymTridiag(self.d[:k], self.e[:k - 1])


@dataclass
class EigResult:
    values: np.ndarray
    vectors: np.ndarray | None
    residual: float


def _fix_signs(z):
    # largest-magnitude component of each column made positive
    idx = np.argmax(np.abs(z), axis=0)
    signs = np.sign(z[idx, np.arange(z.shape[1])])
    signs[signs == 0] = 1.0
    return z * signs


def _ql_implicit(d, e, z=None):
    """In-place implicit QL on diagonal d and off-diagonal e (length N, e[-1] unused).

    If z is given, the plane rotations are accumulated into its columns.
    """
    n = d.size
    max_iter = 30 * n
    total = 0
    for l in range(n):
        while True:
            m = l
            while m < n - 1:
                # deflation test of LAPACK dsteqr; the safmin term splits off
                # off-diagonals that are negligible next to zero diagonals
                if e[m] * e[m] <= _EPS * _EPS * abs(d[m] * d[m + 1]) + _SAFMIN:
                    break
                m += 1
            if m == l:
                break
            total += 1
            if total > max_iter:
                raise ConvergenceError(f"QL iteration did not converge within {max_iter} sweeps")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if z is not None:
                    zi1 = z[:, i + 1].copy()
                    z[:, i + 1] = s * z[:, i] + c * zi1
                    z[:, i] = c * z[:, i] - s * zi1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0


def eig_tridiag(M, want_vectors=False):
    """All eigenvalues (ascending) of a symmetric tridiagonal matrix by implicit QL."""
    if not isinstance(M, SymTridiag):
        M = SymTridiag(*M)
    n = M.n
    d = M.d.copy()
    e = np.zeros(n)
    e[: n - 1] = M.e
    z = np.eye(n) if want_vectors else None
    _ql_implicit(d, e, z)
    order = np.argsort(d, kind="stable")
    values = d[order]
    vectors = None
    scale = max(np.max(np.abs(M.d)), np.max(np.abs(M.e)) if n > 1 else 0.0, 1e-300)
    if want_vectors:
        vectors = _fix_signs(z[:, order])
        resid = M.matvec(vectors) - vectors * values
        residual = float(np.max(np.linalg.norm(resid, axis=0)) / scale)
    else:
        residual = _tridiag_value_residual(M, values) / scale
    return EigResult(values, vectors, residual)


def _tridiag_value_residual(M, values):
    # eigenvalue-only residual bound: trace mismatch
    return abs(float(np.sum(values) - np.sum(M.d)))


def householder_tridiagonalize(A):
    """Reduce symmetric A to tridiagonal form Q^T A Q = T. Returns (d, e, Q)."""
    A = np.array(A, dtype=float)
    n = A.shape[0]
    Q = np.eye(n)
    for k in range(n - 2):
        x = A[k + 1:, k]
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        v = x.copy()
        v[0] += math.copysign(alpha, x[0])
        vn = np.linalg.norm(v)
        if vn == 0.0:
            continue
        v /= vn
        # A <- H A H with H = I - 2 v v^T acting on rows/cols k+1..
        sub = A[k + 1:, :]
        sub -= 2.0 * np.outer(v, v @ sub)
        sub = A[:, k + 1:]
        sub -= 2.0 * np.outer(sub @ v, v)
        Qs = Q[:, k + 1:]
        Qs -= 2.0 * np.outer(Qs @ v, v)
    d = np.diag(A).copy()
    e = np.diag(A, 1).copy()
    return d, e, Q


def symmetry_defect(A):
    A = np.asarray(A, dtype=float)
    norm = np.max(np.abs(A))
    if norm == 0.0:
        return 0.0
    return float(np.max(np.abs(A - A.T)) / norm)


def eig_dense(A, want_vectors=False):
    """Eigen-decomposition of a dense symmetric matrix (Householder + QL)."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError("matrix must be square")
    defect = symmetry_defect(A)
    if defect >= 1e-12:
        raise AsymmetryError(f"matrix not symmetric (relative defect {defect:.3g})")
    n = A.shape[0]
    As = 0.5 * (A + A.T)
    d, e, Q = householder_tridiagonalize(As)
    ee = np.zeros(n)
    ee[: n - 1] = e
    z = Q.copy() if want_vectors else None
    _ql_implicit(d, ee, z)
    order = np.argsort(d, kind="stable")
    values = d[order]
    scale = max(np.max(np.abs(As)), 1e-300)
    vectors = None
    if want_vectors:
        vectors = _fix_signs(z[:, order])
        residual = float(np.max(np.linalg.norm(As @ vectors - vectors * values, axis=0)) / scale)
    else:
        residual = abs(float(np.sum(values) - np.trace(As))) / scale
    return EigResult(values, vectors, residual)


def cholesky(B):
    """Lower-triangular L with B = L L^T."""
    B = np.asarray(B, dtype=float)
    n = B.shape[0]
    L = np.zeros_like(B)
    for j in range(n):
        piv = B[j, j] - L[j, :j] @ L[j, :j]
        if not piv > 0.0:
            raise NotPositiveDefiniteError(j, float(piv))
        L[j, j] = math.sqrt(piv)
        if j + 1 < n:
            L[j + 1:, j] = (B[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / L[j, j]
    return L


def solve_lower(L, X):
    """Forward substitution for L Y = X."""
    X = np.array(X, dtype=float)
    Y = np.zeros_like(X)
    for i in range(L.shape[0]):
        Y[i] = (X[i] - L[i, :i] @ Y[:i]) / L[i, i]
    return Y


def solve_upper(U, X):
    """Back substitution for U Y = X."""
    X = np.array(X, dtype=float)
    Y = np.zeros_like(X)
    for i in range(U.shape[0] - 1, -1, -1):
        Y[i] = (X[i] - U[i, i + 1:] @ Y[i + 1:]) / U[i, i]
    return Y


def eig_generalized(A, B, want_vectors=False):
    """Solve A f = lam B f for symmetric A and symmetric positive-definite B."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    for name, M in (("A", A), ("B", B)):
        defect = symmetry_defect(M)
        if defect >= 1e-12:
            raise AsymmetryError(f"{name} not symmetric (relative defect {defect:.3g})")
    L = cholesky(0.5 * (B + B.T))
    X = solve_lower(L, 0.5 * (A + A.T))
    C = solve_lower(L, X.T).T
    C = 0.5 * (C + C.T)
    res = eig_dense(C, want_vectors=want_vectors)
    values = res.values
    vectors = None
    scale = max(np.max(np.abs(A)), 1e-300)
    if want_vectors:
        vectors = _fix_signs(solve_upper(L.T, res.vectors))
        r = A @ vectors - (B @ vectors) * values
        denom = scale + np.abs(values) * np.max(np.abs(B))
        residual = float(np.max(np.linalg.norm(r, axis=0) / denom))
    else:
        residual = res.residual
    return EigResult(values, vectors, residual)


def det_sign(M):
    """Sign of det(M) for a SymTridiag via the LDL^T pivot recurrence.

    The pivots q_k = d_k - e_{k-1}^2 / q_{k-1} are ratios of successive
    leading minors, so their product never overflows the sign bookkeeping.
    """
    d, e = M.d, M.e
    tiny = _EPS * max(np.max(np.abs(d)), np.max(np.abs(e)) if e.size else 0.0, 1e-300)
    sign = 1.0
    q = d[0]
    for k in range(d.size):
        if k > 0:
            q = d[k] - e[k - 1] ** 2 / q
        if q == 0.0:
            q = tiny
        if q < 0.0:
            sign = -sign
    return sign


def det_scan(J, E_lo, E_hi, n_grid=400, tol=1e-10):
    """Roots of E -> det J(E) in [E_lo, E_hi] by sign-change bracketing and bisection."""
    if not E_lo < E_hi:
        raise DomainError("det_scan needs E_lo < E_hi")
    grid = np.linspace(E_lo, E_hi, int(n_grid) + 1)
    signs = [det_sign(J(E)) for E in grid]
    roots = []
    for i in range(len(grid) - 1):
        if signs[i] == signs[i + 1]:
            continue
        a, b = grid[i], grid[i + 1]
        sa = signs[i]
        while b - a > tol:
            c = 0.5 * (a + b)
            sc = det_sign(J(c))
            if sc == sa:
                a = c
            else:
                b = c
        roots.append(0.5 * (a + b))
    return roots


def count_below(M, x):
    """Number of eigenvalues of SymTridiag M strictly below x (Sturm count)."""
    d, e = M.d, M.e
    tiny = _EPS * max(np.max(np.abs(d)), np.max(np.abs(e)) if e.size else 0.0, 1e-300)
    count = 0
    q = d[0] - x
    for k in range(d.size):
        if k > 0:
            q = d[k] - x - e[k - 1] ** 2 / q
        if q == 0.0:
            q = -tiny
        if q < 0.0:
            count += 1
    return count
