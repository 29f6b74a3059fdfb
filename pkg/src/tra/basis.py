"""Coordinate maps y(x), basis elements phi_n and Gauss quadrature.

Jacobi basis:   phi_n = A_n (1-y)^alpha (1+y)^beta P_n^{(mu,nu)}(y),  y in [-1, 1]
Laguerre basis: phi_n = A_n y^alpha e^{-beta y} L_n^nu(y),           y in [0, inf)

The exponent alpha sits on (1-y), the side carrying the polynomial
parameter mu, so that 2 alpha = mu, 2 beta = nu + 1 is the configuration
used for the Eq. 100 potential.
"""

from dataclasses import dataclass
import math

import numpy as np

from .eigensolve import SymTridiag, eig_tridiag
from .errors import ConvergenceError, DomainError
from .orthopoly import (PolynomialFamily, eval_sequence, jacobi_norm_log, jacobi_position_coeffs,
                        laguerre_norm_log, laguerre_position_coeffs)

JACOBI_MAPS = ("ShiftedExp", "Tanh", "TanhSq", "Sin", "SinSq")
LAGUERRE_MAPS = ("Quadratic", "Linear", "Exp")
MAP_NAMES = JACOBI_MAPS + LAGUERRE_MAPS


@dataclass(frozen=True)
class CoordinateMap:
    """Change of variable x -> y(x) with scale lam > 0.

    ``scale`` is the prefactor of the Exp map, y = scale * exp(-lam x)
    (``decay=True``) or y = scale * exp(lam x) (``decay=False``).
    SinSq is y = 2 sin^2(lam x / 2) - 1 = -cos(lam x) on [0, pi/lam].
    """

    name: str
    lam: float = 1.0
    scale: float = 1.0
    decay: bool = True

    def __post_init__(self):
        if self.name not in MAP_NAMES:
            raise DomainError(f"unknown coordinate map {self.name!r}")
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise DomainError("map scale lam must be positive")
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise DomainError("Exp map prefactor must be positive")

    @property
    def kind(self):
        return "Jacobi" if self.name in JACOBI_MAPS else "Laguerre"

    @property
    def domain(self):
        lam = self.lam
        return {
            "ShiftedExp": (0.0, math.inf),
            "Tanh": (-math.inf, math.inf),
            "TanhSq": (0.0, math.inf),
            "Sin": (-math.pi / (2 * lam), math.pi / (2 * lam)),
            "SinSq": (0.0, math.pi / lam),
            "Quadratic": (0.0, math.inf),
            "Linear": (0.0, math.inf),
            "Exp": (-math.inf, math.inf),
        }[self.name]

    @property
    def y_range(self):
        return (-1.0, 1.0) if self.kind == "Jacobi" else (0.0, math.inf)


def _check_domain(cmap, x):
    lo, hi = cmap.domain
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)) or np.any(x < lo) or np.any(x > hi):
        raise DomainError(f"x outside the {cmap.name} domain [{lo}, {hi}]")
    return x


def map_eval(cmap, x):
    """Return (y, y', y'') at x (scalars or arrays); primes are d/dx."""
    x = _check_domain(cmap, x)
    lam = cmap.lam
    name = cmap.name
    if name == "ShiftedExp":
        ex = np.exp(-lam * x)
        y, y1, y2 = 1 - 2 * ex, 2 * lam * ex, -2 * lam * lam * ex
    elif name == "Tanh":
        y = np.tanh(lam * x)
        y1 = lam * (1 - y * y)
        y2 = -2 * lam * lam * y * (1 - y * y)
    elif name == "TanhSq":
        t = np.tanh(lam * x)
        s = 1 - t * t
        y, y1, y2 = 2 * t * t - 1, 4 * lam * t * s, 4 * lam * lam * s * (1 - 3 * t * t)
    elif name == "Sin":
        y, y1, y2 = np.sin(lam * x), lam * np.cos(lam * x), -lam * lam * np.sin(lam * x)
    elif name == "SinSq":
        y, y1, y2 = -np.cos(lam * x), lam * np.sin(lam * x), lam * lam * np.cos(lam * x)
    elif name == "Quadratic":
        y, y1, y2 = (lam * x) ** 2, 2 * lam * lam * x, 2 * lam * lam + 0 * x
    elif name == "Linear":
        y, y1, y2 = lam * x, lam + 0 * x, 0 * x
    else:
        sgn = -1.0 if cmap.decay else 1.0
        y = cmap.scale * np.exp(sgn * lam * x)
        y1, y2 = sgn * lam * y, lam * lam * y
    if np.ndim(y) == 0:
        return float(y), float(y1), float(y2)
    return y, y1, y2


def map_inverse(cmap, y):
    """x(y), the inverse of the map on its domain."""
    y = np.asarray(y, dtype=float)
    lo, hi = cmap.y_range
    if np.any(y < lo) or np.any(y > hi):
        raise DomainError(f"y outside the {cmap.name} range")
    lam = cmap.lam
    name = cmap.name
    with np.errstate(divide="ignore"):
        if name == "ShiftedExp":
            x = -np.log((1 - y) / 2) / lam
        elif name == "Tanh":
            x = np.arctanh(y) / lam
        elif name == "TanhSq":
            x = np.arctanh(np.sqrt((1 + y) / 2)) / lam
        elif name == "Sin":
            x = np.arcsin(y) / lam
        elif name == "SinSq":
            x = np.arccos(-y) / lam
        elif name == "Quadratic":
            x = np.sqrt(y) / lam
        elif name == "Linear":
            x = y / lam
        else:
            x = np.log(y / cmap.scale) / lam
            x = -x if cmap.decay else x
    return float(x) if x.ndim == 0 else x


def map_measure(cmap):
    """The factor 1/|y'(x(y))| that turns dx into dy, as a power law in y.

    Jacobi maps: (c, a, b) with 1/|y'| = c (1-y)^a (1+y)^b.
    Laguerre maps: (c, p) with 1/|y'| = c y^p.
    """
    lam = cmap.lam
    return {
        "ShiftedExp": (1 / lam, -1.0, 0.0),
        "Tanh": (1 / lam, -1.0, -1.0),
        "TanhSq": (1 / (math.sqrt(2) * lam), -1.0, -0.5),
        "Sin": (1 / lam, -0.5, -0.5),
        "SinSq": (1 / lam, -0.5, -0.5),
        "Quadratic": (1 / (2 * lam), -0.5),
        "Linear": (1 / lam, 0.0),
        "Exp": (1 / lam, -1.0),
    }[cmap.name]


@dataclass(frozen=True)
class BasisSpec:
    """Basis family, exponents, polynomial parameters, map and A_n rule.

    ``norm`` selects A_n: "weight" makes A_n P_n orthonormal under the
    polynomial weight alone (the Jacobi A_n printed with Eq. 104);
    "measure" also absorbs the map's measure constant c (the Laguerre
    A_n = sqrt(2 lam Gamma(n+1)/Gamma(n+nu+1)) of the Quadratic map).
    Default: "weight" for Jacobi, "measure" for Laguerre.
    """

    family: str
    alpha: float
    beta: float
    nu: float
    cmap: CoordinateMap
    mu: float = 0.0
    norm: str | None = None

    def __post_init__(self):
        if self.family not in ("Jacobi", "Laguerre"):
            raise DomainError(f"unknown basis family {self.family!r}")
        if self.cmap.kind != self.family:
            raise DomainError(f"map {self.cmap.name} is not compatible with the {self.family} basis")
        if self.family == "Jacobi":
            if not (self.alpha >= 0 and self.beta >= 0):
                raise DomainError("Jacobi basis requires alpha, beta >= 0")
            if not (self.mu > -1 and self.nu > -1):
                raise DomainError("Jacobi basis requires mu, nu > -1")
        else:
            if not (self.nu > -1 and self.alpha >= 0):
                raise DomainError("Laguerre basis requires nu > -1 and alpha >= 0")
            if not self.beta > 0:
                raise DomainError("Laguerre basis requires beta > 0")
        if self.norm is None:
            object.__setattr__(self, "norm", "weight" if self.family == "Jacobi" else "measure")
        if self.norm not in ("weight", "measure"):
            raise DomainError(f"unknown normalization rule {self.norm!r}")

    @property
    def polynomial(self):
        if self.family == "Jacobi":
            return PolynomialFamily("JacobiP", {"mu": self.mu, "nu": self.nu})
        return PolynomialFamily("LaguerreL", {"nu": self.nu})


def norm_constants(spec, n_max):
    """A_0..A_{n_max} for the spec's normalization rule."""
    if spec.family == "Jacobi":
        logs = np.array([-0.5 * jacobi_norm_log(n, spec.mu, spec.nu) for n in range(n_max + 1)])
    else:
        logs = np.array([-0.5 * laguerre_norm_log(n, spec.nu) for n in range(n_max + 1)])
    if spec.norm == "measure":
        logs -= 0.5 * math.log(map_measure(spec.cmap)[0])
    return np.exp(logs)


def _weight_factor(spec, y):
    if spec.family == "Jacobi":
        return (1 - y) ** spec.alpha * (1 + y) ** spec.beta
    return y ** spec.alpha * np.exp(-spec.beta * y)


def basis_eval_y(spec, n, y):
    """phi_n as a function of the transformed coordinate y."""
    if n < 0 or int(n) != n:
        raise DomainError(f"basis index must be a nonnegative integer, got {n!r}")
    y = np.asarray(y, dtype=float)
    lo, hi = spec.cmap.y_range
    if not np.all(np.isfinite(y)) or np.any(y < lo) or np.any(y > hi):
        raise DomainError("y outside the basis support")
    n = int(n)
    P = eval_sequence(spec.polynomial, y, n)[n]
    out = norm_constants(spec, n)[n] * _weight_factor(spec, y) * P
    return float(out) if out.ndim == 0 else out


def basis_eval(spec, n, x):
    """phi_n(x) = A_n * weight-factor(y(x)) * P_n(y(x))."""
    y = map_eval(spec.cmap, x)[0]
    return basis_eval_y(spec, n, y)


def _poly_derivs(spec, n, y):
    # P_n, P_n', P_n'' from the derivative identity and the differential equation
    seq = eval_sequence(spec.polynomial, y, n)
    P = seq[n]
    Pm = seq[n - 1] if n > 0 else 0.0 * y
    mu, nu = spec.mu, spec.nu
    if spec.family == "Jacobi":
        if n == 0:
            return P, 0.0 * y, 0.0 * y
        s = 2 * n + mu + nu
        P1 = (-n * (y + (nu - mu) / s) * P + 2 * (n + mu) * (n + nu) / s * Pm) / (1 - y * y)
        P2 = (((mu + nu + 2) * y + mu - nu) * P1 - n * (n + mu + nu + 1) * P) / (1 - y * y)
        return P, P1, P2
    P1 = (n * P - (n + nu) * Pm) / y
    P2 = (-(nu + 1 - y) * P1 - n * P) / y
    return P, P1, P2


def basis_derivatives_y(spec, n, y):
    """(phi_n, d phi_n/dy, d^2 phi_n/dy^2) from the closed derivative forms.

    Jacobi: the bracket operators of Eqs. 33-34; Laguerre: Eqs. 47 and 50.
    y must be interior (the closed forms carry 1/(1-y^2) or 1/y).
    """
    y = np.asarray(y, dtype=float)
    if spec.family == "Jacobi":
        if np.any(np.abs(y) >= 1):
            raise DomainError("closed-form Jacobi derivatives need -1 < y < 1")
    elif np.any(y <= 0):
        raise DomainError("closed-form Laguerre derivatives need y > 0")
    P, P1, P2 = _poly_derivs(spec, int(n), y)
    pref = norm_constants(spec, int(n))[int(n)] * _weight_factor(spec, y)
    a, b = spec.alpha, spec.beta
    if spec.family == "Jacobi":
        g = b / (1 + y) - a / (1 - y)
        h = b * (b - 1) / (1 + y) ** 2 + a * (a - 1) / (1 - y) ** 2 - 2 * a * b / (1 - y * y)
    else:
        g = a / y - b
        h = -a / y ** 2 + g * g
    return pref * P, pref * (P1 + g * P), pref * (P2 + 2 * g * P1 + h * P)


def gauss_quadrature(family, N):
    """N-point Gauss rule of a JacobiP or LaguerreL weight (Golub-Welsch).

    Nodes are the eigenvalues of the orthonormal position matrix; weights
    are mu_0 times the squared first eigenvector components, where mu_0
    is the total mass of the weight.
    """
    if N < 1 or int(N) != N:
        raise DomainError(f"quadrature size must be a positive integer, got {N!r}")
    N = int(N)
    if family.name == "JacobiP":
        d, e = jacobi_position_coeffs(family["mu"], family["nu"], N)
        log_mass = jacobi_norm_log(0, family["mu"], family["nu"])
    elif family.name == "LaguerreL":
        d, e = laguerre_position_coeffs(family["nu"], N)
        log_mass = laguerre_norm_log(0, family["nu"])
    else:
        raise DomainError("Gauss quadrature is provided for JacobiP and LaguerreL only")
    res = eig_tridiag(SymTridiag(d, e), want_vectors=True)
    weights = math.exp(log_mass) * res.vectors[0] ** 2
    return res.values, weights


def measure_rule(spec, N_quad):
    """Quadrature for integrals of phi_n phi_m g(y) dx, exact when g is a polynomial.

    Returns (y nodes, weights, P table, A_n) where the weights already
    include the basis weight factors and the map measure, so that
    sum_k w_k A_n P_n(y_k) A_m P_m(y_k) g(y_k) approximates the integral.
    """
    if spec.family == "Jacobi":
        c, a, b = map_measure(spec.cmap)
        A, B = 2 * spec.alpha + a, 2 * spec.beta + b
        if not (A > -1 and B > -1):
            raise DomainError("basis elements are not square integrable under the map measure")
        nodes, w = gauss_quadrature(PolynomialFamily("JacobiP", {"mu": A, "nu": B}), N_quad)
        return nodes, c * w
    c, p = map_measure(spec.cmap)
    A = 2 * spec.alpha + p
    if not A > -1:
        raise DomainError("basis elements are not square integrable under the map measure")
    s, w = gauss_quadrature(PolynomialFamily("LaguerreL", {"nu": A}), N_quad)
    # y = s / (2 beta) turns e^{-2 beta y} into the Laguerre weight e^{-s}
    k = 2 * spec.beta
    return s / k, c * w / k ** (A + 1)


def _overlap_block(spec, n_max, N_quad):
    y, w = measure_rule(spec, N_quad)
    Pn = eval_sequence(spec.polynomial, y, n_max) * norm_constants(spec, n_max)[:, None]
    return (Pn * w) @ Pn.T


def overlap_matrix(spec, N, N_quad=None, tol=1e-9):
    """Matrix of <phi_n|phi_m> (n, m < N) under the map's dx measure.

    The rule absorbs the basis weight factors and the measure, so the
    integrand left for the nodes is a polynomial; convergence is still
    checked by doubling N_quad.
    """
    N_quad = 2 * N + 8 if N_quad is None else int(N_quad)
    if N_quad < N:
        raise DomainError(f"N_quad = {N_quad} is too small for {N} basis functions")
    S1 = _overlap_block(spec, N - 1, N_quad)
    S2 = _overlap_block(spec, N - 1, 2 * N_quad)
    change = float(np.max(np.abs(S2 - S1)))
    if change >= tol * max(1.0, float(np.max(np.abs(S2)))):
        raise ConvergenceError(f"overlap changed by {change:.3g} under quadrature doubling")
    return 0.5 * (S2 + S2.T)


def overlap(spec, n, m, N_quad):
    """<phi_n|phi_m> under the map measure (e.g. dx = dy/(lam(1-y)) for ShiftedExp)."""
    if min(n, m) < 0:
        raise DomainError("basis indices must be nonnegative")
    if N_quad < n + m + 2:
        raise DomainError(f"N_quad must be at least n+m+2 = {n + m + 2}")
    return float(overlap_matrix(spec, max(n, m) + 1, N_quad)[n, m])
