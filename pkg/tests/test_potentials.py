import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from scipy.optimize import brentq, minimize_scalar

from tra.basis import CoordinateMap, map_eval
from tra.errors import DomainError
from tra.potentials import (CATALOG, TABLE2_ROWS, PotentialSpec, default_map, eq100_from_u, eq100_u,
                            eq101_crossing, eq101_extremum, eq101_gamma, format_csv,
                            potential_eval, potential_grid, transformed_potential)

strength = st.floats(-50, 50)


@settings(max_examples=80, deadline=None)
@given(strength, strength, st.floats(0, 20), st.floats(0.3, 3), st.floats(0.05, 8))
def test_eq100_transformed_matches_direct(V0, V1, VR, lam, x):
    spec = PotentialSpec("Eq100", {"V0": V0, "V1": V1, "VR": VR, "lam": lam})
    cmap = CoordinateMap("ShiftedExp", lam=lam)
    y = map_eval(cmap, x)[0]
    assume(-1 < y < 1)
    direct = potential_eval(spec, x)
    assert transformed_potential(spec, cmap, y) == pytest.approx(direct, rel=1e-10, abs=1e-10)


def test_eq100_known_value():
    spec = PotentialSpec("Eq100", {"V0": -2.0, "V1": -5.0, "VR": 1.0, "lam": 1.0})
    x = math.log(2.0)  # e^{-x} = 1/2
    assert potential_eval(spec, x) == pytest.approx((-2.0 + 0.0 + 1.0 / 0.5) / 1.0)


@settings(max_examples=50, deadline=None)
@given(strength, strength, st.floats(0, 20), st.floats(0.3, 3))
def test_u_roundtrip(u0, u1, uR, lam):
    spec = eq100_from_u(u0, u1, uR, lam)
    assert np.allclose(eq100_u(spec), (u0, u1, uR), rtol=1e-14, atol=1e-13)


@settings(max_examples=60, deadline=None)
@given(st.floats(-20, 20), st.floats(0.5, 20), st.floats(0.3, 3), st.floats(0.05, 6))
def test_eq100_without_repulsion_is_eq101(V0, V1, lam, x):
    # V0 + V1 (1 - 2 e^{-lam x}) = -2 V1 (e^{-lam x} - gamma)
    for s in (1.0, -1.0):
        g = eq101_gamma(V0, s * V1)
        assume(0 < g < 1)
        a = potential_eval(PotentialSpec("Eq100", {"V0": V0, "V1": s * V1, "VR": 0.0, "lam": lam}), x)
        b = potential_eval(PotentialSpec("Eq101", {"V1": -2 * s * V1, "gamma": g, "lam": lam}), x)
        assert a == pytest.approx(b, rel=1e-11, abs=1e-11)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.3, 3), st.floats(-10, 10).filter(lambda v: abs(v) > 0.1))
def test_eq101_crossing_and_extremum(g, lam, V1):
    spec = PotentialSpec("Eq101", {"V1": V1, "gamma": g, "lam": lam})
    x0 = eq101_crossing(spec)
    assert potential_eval(spec, x0) == pytest.approx(0.0, abs=1e-12 * abs(V1))
    x1 = eq101_extremum(spec)
    assert x1 > x0
    # independent oracle: numerical extremum of V
    sgn = 1.0 if V1 > 0 else -1.0
    res = minimize_scalar(lambda x: sgn * potential_eval(spec, x), bounds=(x0 * 1.0001, x0 + 40 / lam),
                          method="bounded", options={"xatol": 1e-10})
    assert res.x == pytest.approx(x1, rel=1e-5, abs=1e-6)
    root = brentq(lambda x: potential_eval(spec, x), 1e-6 / lam, x1)
    assert root == pytest.approx(x0, rel=1e-10)


def test_oscillator_transformed():
    spec = PotentialSpec("Oscillator", {"omega": 1.3})
    cmap = CoordinateMap("Quadratic", lam=0.8)
    for r in (0.2, 1.0, 3.5):
        y = map_eval(cmap, r)[0]
        assert transformed_potential(spec, cmap, y) == pytest.approx(potential_eval(spec, r), rel=1e-13)


PARAMS = {"V0": 0.3, "V1": 1.2, "V2": 0.7, "a": 0.9, "Z": 1.0, "omega": 1.1, "lam": 1.0,
          "VR": 0.5, "gamma": 0.4}


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_catalog_entries_evaluate_inside_domain(name):
    entry = CATALOG[name]
    spec = PotentialSpec(name, {k: PARAMS[k] for k in entry.params})
    lo, hi = spec.domain
    lo_f = -5.0 if lo == -math.inf else lo
    hi_f = lo_f + 10.0 if hi == math.inf else hi
    x = np.linspace(lo_f, hi_f, 23)[1:-1]
    v = potential_eval(spec, x)
    assert v.shape == x.shape and np.all(np.isfinite(v))
    if entry.map_name is not None:
        cmap = default_map(spec)
        inside = x[(x > cmap.domain[0]) & (x < cmap.domain[1])]
        y = map_eval(cmap, inside)[0]
        ok = (y > cmap.y_range[0]) & (y < cmap.y_range[1])
        assert np.allclose(transformed_potential(spec, cmap, y[ok]), potential_eval(spec, inside[ok]),
                           rtol=1e-9, atol=1e-9)
    else:
        with pytest.raises(DomainError):
            default_map(spec)


def test_table2_rows_cover_catalog():
    assert sorted(TABLE2_ROWS) == list(range(1, 12))
    assert all(v in CATALOG for v in TABLE2_ROWS.values())


def test_rosen_morse_i_domain_is_bounded():
    spec = PotentialSpec("RosenMorseI", {"V0": 0.0, "V1": 1.0, "V2": 1.0, "a": 2.0})
    assert spec.domain == pytest.approx((-math.pi / 4, math.pi / 4))
    with pytest.raises(DomainError):
        potential_eval(spec, 1.0)


def test_spec_validation():
    with pytest.raises(DomainError):
        PotentialSpec("Yukawa", {})
    with pytest.raises(DomainError):
        PotentialSpec("Eq100", {"V0": 1.0, "V1": 1.0, "VR": 1.0})
    with pytest.raises(DomainError):
        PotentialSpec("Eq100", {"V0": 1.0, "V1": 1.0, "VR": 1.0, "lam": 1.0, "extra": 2.0})
    with pytest.raises(DomainError):
        PotentialSpec("Eq100", {"V0": 1.0, "V1": 1.0, "VR": -1.0, "lam": 1.0})
    with pytest.raises(DomainError):
        PotentialSpec("Eq100", {"V0": 1.0, "V1": 1.0, "VR": 1.0, "lam": 0.0})
    with pytest.raises(DomainError):
        PotentialSpec("Eq101", {"V1": 1.0, "gamma": 1.5, "lam": 1.0})
    with pytest.raises(DomainError):
        PotentialSpec("Morse", {"V0": 1.0, "V1": 1.0, "V2": 1.0, "a": math.nan})
    with pytest.raises(DomainError):
        eq101_gamma(1.0, 0.0)
    spec = PotentialSpec("Hydrogen", {"Z": 1.0})
    with pytest.raises(DomainError):
        potential_eval(spec, 0.0)
    with pytest.raises(DomainError):
        potential_eval(spec, math.inf)
    eq = eq100_from_u(-2, -5, 1)
    with pytest.raises(DomainError):
        transformed_potential(eq, CoordinateMap("ShiftedExp"), -1.0)
    with pytest.raises(DomainError):
        transformed_potential(eq, CoordinateMap("ShiftedExp"), 2.0)


def test_potential_grid_and_csv():
    spec = eq100_from_u(-2, -5, 1)
    x, v = potential_grid(spec, 0.1, 5.0, 5)
    assert x[0] == 0.1 and x[-1] == 5.0 and v.size == 5
    text = format_csv([x, v], ["x", "V"], meta_lines=["potential Eq100"])
    lines = text.splitlines()
    assert lines[0] == "# potential Eq100"
    assert lines[1] == "x,V"
    assert len(lines) == 7 and text.endswith("\n")
    assert float(lines[2].split(",")[1]) == pytest.approx(v[0], rel=1e-14)
    with pytest.raises(DomainError):
        potential_grid(spec, 0.0, 5.0, 5)
    with pytest.raises(DomainError):
        potential_grid(spec, 1.0, 0.5, 5)
    with pytest.raises(DomainError):
        potential_grid(spec, 0.1, 5.0, 1)
