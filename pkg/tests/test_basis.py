import math

import numpy as np
import pytest
import scipy.special as sp
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from tra.basis import (JACOBI_MAPS, LAGUERRE_MAPS, MAP_NAMES, BasisSpec, CoordinateMap,
                       basis_derivatives_y, basis_eval, basis_eval_y, gauss_quadrature,
                       map_eval, map_inverse, map_measure, measure_rule, norm_constants, overlap,
                       overlap_matrix)
from tra.errors import DomainError
from tra.orthopoly import PolynomialFamily


def interior_points(cmap, k=7):
    lo, hi = cmap.domain
    lo = -3.0 if lo == -math.inf else lo
    hi = lo + 6.0 if hi == math.inf else hi
    return np.linspace(lo, hi, k + 2)[1:-1]


@pytest.mark.parametrize("name", MAP_NAMES)
@pytest.mark.parametrize("lam", [0.6, 1.0, 1.7])
def test_map_derivatives_match_finite_differences(name, lam):
    cmap = CoordinateMap(name, lam=lam, scale=1.3)
    for x in interior_points(cmap):
        h = 1e-4
        y0, y1, y2 = map_eval(cmap, x)
        yp, ym = map_eval(cmap, x + h)[0], map_eval(cmap, x - h)[0]
        assert y1 == pytest.approx((yp - ym) / (2 * h), rel=1e-6, abs=1e-7)
        assert y2 == pytest.approx((yp - 2 * y0 + ym) / h ** 2, rel=1e-4, abs=1e-4)


@pytest.mark.parametrize("name", MAP_NAMES)
def test_map_inverse_roundtrip(name):
    for decay in (True, False):
        cmap = CoordinateMap(name, lam=1.3, scale=0.7, decay=decay)
        x = interior_points(cmap, 11)
        y = map_eval(cmap, x)[0]
        assert np.allclose(map_inverse(cmap, y), x, rtol=1e-10, atol=1e-10)


@pytest.mark.parametrize("name", MAP_NAMES)
def test_map_measure_is_inverse_derivative(name):
    cmap = CoordinateMap(name, lam=1.4)
    meas = map_measure(cmap)
    for x in interior_points(cmap):
        y, y1, _ = map_eval(cmap, x)
        if cmap.kind == "Jacobi":
            c, a, b = meas
            pred = c * (1 - y) ** a * (1 + y) ** b
        else:
            c, p = meas
            pred = c * y ** p
        assert pred == pytest.approx(1 / abs(y1), rel=1e-10)


def test_map_validation():
    with pytest.raises(DomainError):
        CoordinateMap("Cosh")
    with pytest.raises(DomainError):
        CoordinateMap("Tanh", lam=0.0)
    with pytest.raises(DomainError):
        CoordinateMap("Exp", scale=-1.0)
    with pytest.raises(DomainError):
        map_eval(CoordinateMap("ShiftedExp"), -0.1)
    with pytest.raises(DomainError):
        map_eval(CoordinateMap("Sin", lam=1.0), 2.0)
    with pytest.raises(DomainError):
        map_inverse(CoordinateMap("Tanh"), 1.5)
    assert set(JACOBI_MAPS) | set(LAGUERRE_MAPS) == set(MAP_NAMES)


@settings(max_examples=50, deadline=None)
@given(st.floats(-0.9, 5), st.floats(-0.9, 5), st.integers(1, 40))
def test_gauss_jacobi_matches_scipy(mu, nu, N):
    x, w = gauss_quadrature(PolynomialFamily("JacobiP", {"mu": mu, "nu": nu}), N)
    xr, wr = sp.roots_jacobi(N, mu, nu)
    assert np.allclose(x, xr, atol=1e-12)
    assert np.allclose(w, wr, rtol=1e-10, atol=1e-14 * np.max(wr))


@settings(max_examples=50, deadline=None)
@given(st.floats(-0.9, 5), st.integers(1, 40))
def test_gauss_laguerre_matches_scipy(nu, N):
    x, w = gauss_quadrature(PolynomialFamily("LaguerreL", {"nu": nu}), N)
    xr, wr = sp.roots_genlaguerre(N, nu)
    assert np.allclose(x, xr, rtol=1e-11, atol=1e-12)
    assert np.allclose(w, wr, rtol=1e-9, atol=1e-13 * np.max(wr))


@pytest.mark.parametrize("N", [3, 8, 15])
def test_gauss_jacobi_exact_on_moments(N):
    mu, nu = 0.7, 1.9
    x, w = gauss_quadrature(PolynomialFamily("JacobiP", {"mu": mu, "nu": nu}), N)
    for k in range(2 * N):
        # int (1-y)^mu (1+y)^nu y^k dy by adaptive quadrature as independent oracle
        ref = quad(lambda y: (1 - y) ** mu * (1 + y) ** nu * y ** k, -1, 1, epsabs=1e-14, epsrel=1e-13)[0]
        assert np.sum(w * x ** k) == pytest.approx(ref, rel=1e-10, abs=1e-13)


def test_gauss_validation():
    with pytest.raises(DomainError):
        gauss_quadrature(PolynomialFamily("JacobiP", {"mu": 0.0, "nu": 0.0}), 0)
    with pytest.raises(DomainError):
        gauss_quadrature(PolynomialFamily("MeixnerPollaczek", {"mu": 1.0, "theta": 1.0}), 5)


def jacobi_spec(mapname, mu, nu, alpha, beta, lam=1.0, norm=None):
    return BasisSpec("Jacobi", alpha, beta, nu, CoordinateMap(mapname, lam=lam), mu=mu, norm=norm)


ORTHONORMAL = [
    # ShiftedExp: dx = dy / (lam (1-y)), so 2 alpha - 1 = mu, 2 beta = nu
    ("shiftedexp", lambda: jacobi_spec("ShiftedExp", 1.4, 2.2, (1.4 + 1) / 2, 2.2 / 2, 0.8, "measure")),
    # Tanh: dx = dy / (lam (1-y^2))
    ("tanh", lambda: jacobi_spec("Tanh", 0.6, 1.5, (0.6 + 1) / 2, (1.5 + 1) / 2, 1.3, "measure")),
    # Sin: dx = dy / (lam sqrt(1-y^2))
    ("sin", lambda: jacobi_spec("Sin", 0.5, 0.5, 0.5, 0.5, 1.0, "measure")),
    # oscillator: y = (lam x)^2, dx = dy / (2 lam sqrt y)
    ("quadratic", lambda: BasisSpec("Laguerre", (1.5 + 0.5) / 2, 0.5, 1.5, CoordinateMap("Quadratic", lam=0.9))),
]


@pytest.mark.parametrize("label,make", ORTHONORMAL, ids=[o[0] for o in ORTHONORMAL])
def test_orthonormal_configurations(label, make):
    S = overlap_matrix(make(), 15)
    assert np.max(np.abs(S - np.eye(15))) < 1e-10


def test_overlap_matches_adaptive_integration_in_x():
    spec = jacobi_spec("ShiftedExp", 1.0, 2.0, 0.5, 1.0, lam=1.0)
    for n, m in [(0, 0), (0, 1), (2, 2), (1, 3)]:
        ref = quad(lambda x: basis_eval(spec, n, x) * basis_eval(spec, m, x), 0, np.inf, limit=200)[0]
        assert overlap(spec, n, m, 40) == pytest.approx(ref, rel=1e-8, abs=1e-10)
    lag = BasisSpec("Laguerre", 1.0, 0.5, 1.0, CoordinateMap("Linear", lam=1.2))
    ref = quad(lambda x: basis_eval(lag, 2, x) * basis_eval(lag, 3, x), 0, np.inf, limit=200)[0]
    assert overlap(lag, 2, 3, 30) == pytest.approx(ref, rel=1e-8, abs=1e-10)


def test_measure_rule_integrates_weight():
    spec = jacobi_spec("Tanh", 0.6, 1.5, 1.0, 1.2, lam=1.0)
    y, w = measure_rule(spec, 30)
    # the zeroth moment is int (1-y)^(2a-1) (1+y)^(2b-1) dy / lam
    ref = 2 ** (1.0 + 1.4 + 1) * sp.beta(2.0, 2.4)
    assert np.sum(w) == pytest.approx(ref, rel=1e-12)


def test_overlap_guards():
    spec = jacobi_spec("ShiftedExp", 1.0, 2.0, 0.5, 1.0)
    with pytest.raises(DomainError):
        overlap(spec, 3, 3, 5)
    with pytest.raises(DomainError):
        overlap(spec, -1, 0, 10)
    with pytest.raises(DomainError):
        overlap_matrix(spec, 10, N_quad=5)
    with pytest.raises(DomainError):
        measure_rule(jacobi_spec("ShiftedExp", 1.0, 2.0, 0.0, 1.0), 10)


@pytest.mark.parametrize("spec", [
    jacobi_spec("ShiftedExp", 1.3, 0.7, 0.8, 1.1),
    jacobi_spec("Tanh", 0.2, 2.5, 0.6, 1.75, norm="measure"),
    BasisSpec("Laguerre", 0.9, 0.5, 1.3, CoordinateMap("Quadratic")),
    BasisSpec("Laguerre", 1.5, 0.7, 0.4, CoordinateMap("Linear")),
], ids=["shiftedexp", "tanh", "laguerre-quad", "laguerre-lin"])
def test_basis_derivatives_match_finite_differences(spec):
    ys = np.linspace(-0.8, 0.8, 9) if spec.family == "Jacobi" else np.linspace(0.3, 6.0, 9)
    h = 1e-4
    for n in range(6):
        f, f1, f2 = basis_derivatives_y(spec, n, ys)
        assert np.allclose(f, basis_eval_y(spec, n, ys), rtol=1e-13, atol=1e-14)
        fp, fm = basis_eval_y(spec, n, ys + h), basis_eval_y(spec, n, ys - h)
        scale = max(1.0, np.max(np.abs(f)))
        assert np.max(np.abs(f1 - (fp - fm) / (2 * h))) < 1e-6 * scale * (n + 1) ** 2
        assert np.max(np.abs(f2 - (fp - 2 * f + fm) / h ** 2)) < 1e-4 * scale * (n + 1) ** 4


def test_norm_constants():
    spec = jacobi_spec("ShiftedExp", 1.0, 2.0, 0.5, 1.0)
    A = norm_constants(spec, 4)
    h0 = 2 ** (1 + 2 + 1) * math.gamma(2) * math.gamma(3) / math.gamma(5)
    assert A[0] == pytest.approx(1 / math.sqrt(h0))
    lag = BasisSpec("Laguerre", 0.5, 0.5, 0.0, CoordinateMap("Quadratic", lam=2.0))
    # measure rule: A_n = sqrt(2 lam n! / Gamma(n + nu + 1))
    assert norm_constants(lag, 3) == pytest.approx(np.full(4, 2.0))


def test_basis_validation():
    with pytest.raises(DomainError):
        BasisSpec("Hermite", 0, 0, 0, CoordinateMap("Tanh"))
    with pytest.raises(DomainError):
        BasisSpec("Jacobi", 0.5, 0.5, 0.0, CoordinateMap("Linear"))
    with pytest.raises(DomainError):
        BasisSpec("Jacobi", -0.5, 0.5, 0.0, CoordinateMap("Tanh"))
    with pytest.raises(DomainError):
        BasisSpec("Jacobi", 0.5, 0.5, -1.0, CoordinateMap("Tanh"))
    with pytest.raises(DomainError):
        BasisSpec("Laguerre", 0.5, 0.0, 1.0, CoordinateMap("Linear"))
    with pytest.raises(DomainError):
        BasisSpec("Laguerre", 0.5, 0.5, 1.0, CoordinateMap("Linear"), norm="other")
    spec = jacobi_spec("Tanh", 0.5, 0.5, 0.5, 0.5)
    with pytest.raises(DomainError):
        basis_eval_y(spec, 1.5, 0.0)
    with pytest.raises(DomainError):
        basis_eval_y(spec, 1, 1.5)
    with pytest.raises(DomainError):
        basis_derivatives_y(spec, 1, 1.0)
    with pytest.raises(DomainError):
        basis_derivatives_y(BasisSpec("Laguerre", 0.5, 0.5, 1.0, CoordinateMap("Linear")), 1, 0.0)
