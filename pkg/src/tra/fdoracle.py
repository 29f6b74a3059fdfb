"""Finite-difference oracle for -1/2 psi'' + [V + ell(ell+1)/(2x^2)] psi = E psi.

Plain three-point central differences with Dirichlet walls at x_min and
x_max.  Reported energies are Richardson-extrapolated from the base grid
and two successive halvings of the spacing; the change between the two
extrapolants is the convergence check.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ConvergenceError, DomainError
from .potentials import potential_eval


@dataclass(frozen=True)
class FDGrid:
    """Uniform grid of n_points interior nodes between Dirichlet walls."""

    x_min: float
    x_max: float
    n_points: int = 4000
    radial: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max) and self.x_min < self.x_max):
            raise DomainError("FD grid needs finite x_min < x_max")
        if int(self.n_points) != self.n_points or self.n_points < 200:
            raise DomainError("FD grid needs at least 200 points")
        if self.radial and not self.x_min > 0:
            raise DomainError("radial grids need x_min > 0")

    @property
    def h(self):
        return (self.x_max - self.x_min) / (self.n_points + 1)

    @property
    def x(self):
        return self.x_min + self.h * np.arange(1, self.n_points + 1)

    def refined(self):
        """Grid with half the spacing (same walls)."""
        return FDGrid(self.x_min, self.x_max, 2 * self.n_points + 1, self.radial)


def eq100_grid(lam=1.0, n_points=4000):
    """Default box for the Eq. 100 potential: [1e-4, 30/lam]."""
    return FDGrid(1e-4, 30.0 / lam, n_points)


def _effective(V, ell, grid):
    x = grid.x
    v = potential_eval(V, x)
    if ell:
        if not grid.radial:
            raise DomainError("angular momentum needs a radial grid")
        v = v + ell * (ell + 1) / (2 * x * x)
    return x, v


def _fd_matrix(V, ell, grid):
    x, v = _effective(V, ell, grid)
    h2 = grid.h ** 2
    d = 1.0 / h2 + v
    e = np.full(grid.n_points - 1, -0.5 / h2)
    return x, d, e


def fd_raw(V, ell, grid, k):
    """Lowest k eigenvalues of the discretized operator on one grid."""
    if k < 1 or k > grid.n_points:
        raise DomainError("k must be between 1 and n_points")
    _, d, e = _fd_matrix(V, ell, grid)
    return eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, k - 1))


def fd_spectrum(V, ell, grid, k, tol=1e-6):
    """Lowest k eigenvalues, Richardson-extrapolated (h, h/2, h/4).

    Raises ConvergenceError if the two extrapolants differ by more than
    tol * max(1, |E|) for any level.
    """
    g1 = grid.refined()
    g2 = g1.refined()
    E0, E1, E2 = (fd_raw(V, ell, g, k) for g in (grid, g1, g2))
    R1 = (4 * E1 - E0) / 3
    R2 = (4 * E2 - E1) / 3
    bad = np.abs(R2 - R1) > tol * np.maximum(1.0, np.abs(R2))
    if np.any(bad):
        i = int(np.argmax(bad))
        raise ConvergenceError(f"FD level {i} not converged under grid doubling "
                               f"(change {abs(R2[i] - R1[i]):.3g})")
    return R2


def fd_convergence_ratios(V, ell, grid, k):
    """(E(h) - E(h/2)) / (E(h/2) - E(h/4)) per level; about 4 for second order."""
    g1 = grid.refined()
    E0, E1, E2 = (fd_raw(V, ell, g, k) for g in (grid, g1, g1.refined()))
    return (E0 - E1) / (E1 - E2)


def fd_bound_states(V, ell, grid, k_max=40, tol=1e-6):
    """Richardson-extrapolated energies below the threshold V_eff(x_max).

    For potentials vanishing at infinity the threshold is ~0, so this is
    the bound-state list; for confining potentials every level counts.
    """
    threshold = float(_effective(V, ell, FDGrid(grid.x_max - 1e-9, grid.x_max, 200,
                                                 grid.radial))[1][-1])
    k = min(k_max, grid.n_points)
    raw = fd_raw(V, ell, grid, k)
    n = int(np.sum(raw < threshold))
    if n == 0:
        return np.array([])
    E = fd_spectrum(V, ell, grid, n, tol=tol)
    return E[E < threshold]


def fd_wavefunction(V, ell, grid, m):
    """m-th eigenvector on the base grid: (energy, x, psi) with sum psi^2 h = 1.

    The sign is fixed so that the first antinode (first local maximum of
    |psi|) is positive.
    """
    if m < 0 or int(m) != m:
        raise IndexError(f"state index must be a nonnegative integer, got {m!r}")
    x, d, e = _fd_matrix(V, ell, grid)
    n_bound = len(fd_bound_states(V, ell, grid, k_max=m + 2))
    if m >= n_bound:
        raise IndexError(f"state {m} requested but only {n_bound} bound states found")
    vals, vecs = eigh_tridiagonal(d, e, select="i", select_range=(m, m))
    psi = vecs[:, 0] / math.sqrt(grid.h)
    a = np.abs(psi)
    peak = np.flatnonzero((a[1:-1] >= a[:-2]) & (a[1:-1] >= a[2:]) & (a[1:-1] > 1e-3 * a.max()))
    first = peak[0] + 1 if peak.size else int(np.argmax(a))
    if psi[first] < 0:
        psi = -psi
    return float(vals[0]), x, psi
