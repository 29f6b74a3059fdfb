"""Wave-operator, Hamiltonian and overlap matrices.

Analytic tridiagonal assemblies (oscillator, Eq. 114), the fixed-basis
generalized form for the Eq. 100 potential, and a quadrature assembly of
<phi_m|(H - E)|phi_n> that checks the tridiagonal structure independently.
"""

from dataclasses import dataclass
import math

import numpy as np

from .basis import (basis_derivatives_y, gauss_quadrature, map_eval, map_inverse, map_measure,
                    norm_constants, _weight_factor)
from .eigensolve import SymTridiag, eig_tridiag, symmetry_defect
from .errors import ConvergenceError, DomainError
from .orthopoly import PolynomialFamily, eval_sequence, jacobi_position_coeffs, laguerre_position_coeffs
from .potentials import transformed_potential


def position_matrix(family, N):
    """Multiplication by y in the orthonormal JacobiP or LaguerreL basis."""
    if N < 1 or int(N) != N:
        raise DomainError(f"basis size must be a positive integer, got {N!r}")
    if family.name == "JacobiP":
        d, e = jacobi_position_coeffs(family["mu"], family["nu"], int(N))
    elif family.name == "LaguerreL":
        d, e = laguerre_position_coeffs(family["nu"], int(N))
    else:
        raise DomainError("position matrices are provided for JacobiP and LaguerreL only")
    return SymTridiag(d, e)


# ---------------------------------------------------------------------------
# spherical oscillator, Laguerre basis with y = (lam r)^2


@dataclass(frozen=True)
class OscillatorMatrix:
    H: SymTridiag
    energy_scale: float
    nu: float


def oscillator_energy_scale(lam):
    """Factor turning eigenvalues of the Eq. 96 matrix into energies.

    The printed matrix is the physical Hamiltonian in the basis with
    y = (lam_b r)^2 divided by lam_b^2 exactly when lam = sqrt(2) lam_b^2,
    so E = (lam / sqrt 2) * eig.
    """
    return lam / math.sqrt(2.0)


def assemble_oscillator(omega, lam, ell, N):
    """Eq. 96 matrix: diag (2n+nu+1)(1/2 + c), off-diag (1/2 - c) sqrt((n+1)(n+nu+1)).

    c = omega^4 / lam^2, nu = ell + 1/2 (2 alpha = ell + 1, beta = 1/2).
    """
    if not (omega > 0 and lam > 0):
        raise DomainError("oscillator needs omega > 0 and lam > 0")
    if ell < 0 or int(ell) != ell:
        raise DomainError("ell must be a nonnegative integer")
    if N < 1 or int(N) != N:
        raise DomainError("basis size must be a positive integer")
    nu = ell + 0.5
    c = omega ** 4 / lam ** 2
    n = np.arange(N, dtype=float)
    d = (2 * n + nu + 1) * (0.5 + c)
    m = np.arange(N - 1, dtype=float)
    e = (0.5 - c) * np.sqrt((m + 1) * (m + nu + 1))
    return OscillatorMatrix(SymTridiag(d, e), oscillator_energy_scale(lam), nu)


def oscillator_basis_scale(lam):
    """Basis scale lam_b of y = (lam_b r)^2 matching the Eq. 96 parameter lam."""
    return math.sqrt(lam / math.sqrt(2.0))


# ---------------------------------------------------------------------------
# Eq. 100 potential, Jacobi basis with y = 1 - 2 exp(-lam x)


def eq100_nu(uR):
    """nu = sqrt(1 + 4 u_R), the basis parameter that removes the 1/(1+y) term."""
    if not uR >= -0.25:
        raise DomainError("u_R must be >= -1/4 so that nu is real")
    return math.sqrt(1 + 4 * uR)


def eq114_coeffs(mu, nu, N):
    """C_n (length N) and D_n (length N-1) of Eq. 114."""
    return jacobi_position_coeffs(mu, nu, N)


def eq114_matrix(u0, u1, uR, mu, eps, N):
    """(2/lam^2) J at energy eps with basis parameter mu (tridiagonal, symmetric)."""
    if not mu > -1:
        raise DomainError("mu must exceed -1")
    nu = eq100_nu(uR)
    C, D = eq114_coeffs(mu, nu, N)
    n = np.arange(N, dtype=float)
    d = (n + (mu + nu + 1) / 2) ** 2 + (eps + u0) + u1 * C
    return SymTridiag(d, u1 * D)


def assemble_eq114(u0, u1, uR, lam, mu, N):
    """Return eps -> (2/lam^2) J(eps) at fixed basis parameter mu.

    lam only sets units (eps = 2E/lam^2); it is validated and kept in the closure.
    """
    if not lam > 0:
        raise DomainError("lam must be positive")
    eq100_nu(uR)

    def J_of_eps(eps):
        return eq114_matrix(u0, u1, uR, mu, eps, N)

    return J_of_eps


def _matrix_function(Y, f):
    # f(Y) for symmetric tridiagonal Y through its eigen-decomposition
    res = eig_tridiag(Y, want_vectors=True)
    V = res.vectors
    F = (V * f(res.values)) @ V.T
    return 0.5 * (F + F.T)


def assemble_fixed_basis(u0, u1, uR, lam, mu, nu=None, N=20, convention="derived"):
    """Energy-independent pair (T, W) with the physical condition T f = eps W f.

    T = diag((n + (mu+nu+1)/2)^2) + u0 I + u1 Y - (mu^2/2)(I-Y)^{-1}
    W = (I+Y)(I-Y)^{-1}
    with Y the orthonormal Jacobi(mu, nu) position matrix.  Setting
    mu^2 = -4 eps gives T - eps W = Eq. 114 exactly.

    ``convention="printed"`` flips the (I-Y)^{-1} sign to +mu^2/2; kept
    only so the alternative can be quantified (see ``consistency_residual``).
    """
    if not lam > 0:
        raise DomainError("lam must be positive")
    nu_req = eq100_nu(uR)
    if nu is None:
        nu = nu_req
    elif abs(nu * nu - (1 + 4 * uR)) > 1e-12 * max(1.0, nu * nu):
        raise DomainError("nu^2 must equal 1 + 4 u_R")
    if convention not in ("derived", "printed"):
        raise DomainError(f"unknown convention {convention!r}")
    Y = position_matrix(PolynomialFamily("JacobiP", {"mu": mu, "nu": nu}), N)
    gap = 1 - eig_tridiag(Y).values[-1]
    if not gap > 0:
        raise DomainError("I - Y is singular")
    n = np.arange(N, dtype=float)
    inv = _matrix_function(Y, lambda y: 1 / (1 - y))
    sign = -1.0 if convention == "derived" else 1.0
    T = np.diag((n + (mu + nu + 1) / 2) ** 2 + u0) + u1 * Y.dense() + sign * (mu * mu / 2) * inv
    W = _matrix_function(Y, lambda y: (1 + y) / (1 - y))
    return 0.5 * (T + T.T), W


def consistency_residual(u0, u1, uR, eps, N, convention="derived"):
    """||(T -/+ eps W) - J_114(eps)|| / ||T|| at mu = sqrt(-4 eps).

    "derived" uses T - eps W, "printed" uses the printed T + eps W together
    with the printed +mu^2/2 sign.
    """
    if not eps <= 0:
        raise DomainError("the reduction needs eps <= 0")
    mu = math.sqrt(-4 * eps)
    T, W = assemble_fixed_basis(u0, u1, uR, 1.0, mu, N=N, convention=convention)
    J = eq114_matrix(u0, u1, uR, mu, eps, N).dense()
    lhs = T - eps * W if convention == "derived" else T + eps * W
    return float(np.linalg.norm(lhs - J) / np.linalg.norm(T))


# ---------------------------------------------------------------------------
# quadrature assembly


def tridiagonality_defect(M):
    """max |M_nm| over |n-m| >= 2, relative to max |M_nm|."""
    M = np.asarray(M, dtype=float)
    scale = float(np.max(np.abs(M))) if M.size else 0.0
    if scale == 0.0:
        return 0.0
    i, j = np.indices(M.shape)
    far = np.abs(i - j) >= 2
    if not far.any():
        return 0.0
    return float(np.max(np.abs(M[far])) / scale)


def _measure_factor(spec, y):
    # 1/|y'| as a function of y, relative to the polynomial weight of the basis
    m = map_measure(spec.cmap)
    if spec.family == "Jacobi":
        c, a, b = m
        return c * (1 - y) ** (a - spec.mu) * (1 + y) ** (b - spec.nu)
    c, p = m
    return c * y ** (p - spec.nu) * np.exp(y)


def _wave_operator_block(spec, V, E, N, N_quad, ell):
    # Gauss rule of the basis polynomials' own weight; everything else is pointwise
    y, w = gauss_quadrature(spec.polynomial, N_quad)
    A = norm_constants(spec, N - 1)
    P = eval_sequence(spec.polynomial, y, N - 1) * A[:, None]
    x = map_inverse(spec.cmap, y)
    _, y1, y2 = map_eval(spec.cmap, x)
    pot = transformed_potential(V, spec.cmap, y)
    if ell:
        pot = pot + ell * (ell + 1) / (2 * x * x)
    g = w * _weight_factor(spec, y) * _measure_factor(spec, y)
    rows = []
    for n in range(N):
        f, f1, f2 = basis_derivatives_y(spec, n, y)
        rows.append(-0.5 * (y1 * y1 * f2 + y2 * f1) + (pot - E) * f)
    return (P * g) @ np.array(rows).T


def quadrature_assemble(spec, V, E, N, N_quad=None, ell=0, require_convergence=True, tol=1e-9):
    """Matrix <phi_m|(H - E)|phi_n> (dx measure) by Gauss quadrature.

    (H - E) phi_n is formed pointwise from the transformed operator
    -1/2 [y'^2 d^2/dy^2 + y'' d/dy] + V(y) + ell(ell+1)/(2x^2) - E and the
    closed-form basis derivatives.  Convergence is checked by doubling
    N_quad; with ``require_convergence=False`` the doubled result is
    returned regardless (used for deliberately mis-configured bases).
    """
    N_quad = 2 * N + 8 if N_quad is None else int(N_quad)
    M1 = _wave_operator_block(spec, V, E, N, N_quad, ell)
    M2 = _wave_operator_block(spec, V, E, N, 2 * N_quad, ell)
    change = float(np.max(np.abs(M2 - M1)))
    scale = max(float(np.max(np.abs(M2))), 1e-300)
    if require_convergence and change >= tol * scale:
        raise ConvergenceError(f"wave-operator matrix changed by {change / scale:.3g} (relative) "
                               f"when N_quad doubled from {N_quad}")
    return M2


def symmetrized(M, tol=1e-8):
    """Symmetric part of M after checking its symmetry defect."""
    defect = symmetry_defect(M)
    if defect >= tol:
        raise DomainError(f"matrix symmetry defect {defect:.3g} exceeds {tol:g}")
    return 0.5 * (M + M.T)
