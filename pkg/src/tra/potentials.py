"""Potential functions: the Eq. 100 three-parameter potential, its Eq. 101
relative, the spherical oscillator and the Table 2 catalog.

Units are hbar = m = 1.  The Eq. 100 solver path works with the
dimensionless u_i = 2 V_i / lam^2.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .basis import CoordinateMap, map_inverse
from .errors import DomainError

_INF = math.inf


def _eq100(x, p):
    lam = p["lam"]
    em = np.exp(-lam * x)
    return (p["V0"] + p["V1"] * (1 - 2 * em) + p["VR"] / (1 - em)) / np.expm1(lam * x)


def _eq101(x, p):
    lam = p["lam"]
    return p["V1"] * (np.exp(-lam * x) - p["gamma"]) / np.expm1(lam * x)


def _sec(t):
    return 1 / np.cos(t)


def _csc(t):
    return 1 / np.sin(t)


def _sech(t):
    return 1 / np.cosh(t)


def _csch(t):
    return 1 / np.sinh(t)


@dataclass(frozen=True)
class CatalogEntry:
    """A named potential: formula, parameter names, domain and suggested map."""

    func: object
    params: tuple
    domain: object  # params -> (lo, hi), both open unless closed_lo
    map_name: str | None
    basis: str | None
    note: str = ""


CATALOG = {
    "Eq100": CatalogEntry(_eq100, ("V0", "V1", "VR", "lam"), lambda p: (0.0, _INF),
                          "ShiftedExp", "Jacobi"),
    "Eq101": CatalogEntry(_eq101, ("V1", "gamma", "lam"), lambda p: (0.0, _INF),
                          "ShiftedExp", "Jacobi"),
    "Oscillator": CatalogEntry(lambda r, p: 0.5 * p["omega"] ** 4 * r * r, ("omega",),
                               lambda p: (0.0, _INF), "Quadratic", "Laguerre"),
    "Coulomb": CatalogEntry(lambda x, p: -p["Z"] ** 2 / x + p["Z"] ** 4 / 2, ("Z",),
                            lambda p: (0.0, _INF), "Linear", "Laguerre"),
    "Hydrogen": CatalogEntry(lambda x, p: -p["Z"] / x, ("Z",), lambda p: (0.0, _INF),
                             "Linear", "Laguerre", "plain -Z/x, used as an oracle check"),
    "Morse": CatalogEntry(
        lambda x, p: p["V0"] + p["V1"] * np.exp(-2 * p["a"] * x) - p["V2"] * np.exp(-p["a"] * x),
        ("V0", "V1", "V2", "a"), lambda p: (-_INF, _INF), "Exp", "Laguerre",
        "Table 2 lists y = e^{lam x}; the Exp map also offers y = scale e^{-lam x}"),
    "TrigScarf": CatalogEntry(
        lambda x, p: (p["V0"] + p["V1"] * _csc(p["a"] * x) ** 2
                      - p["V2"] / np.tan(p["a"] * x) * _csc(p["a"] * x)),
        ("V0", "V1", "V2", "a"), lambda p: (0.0, math.pi / p["a"]), "Sin", "Jacobi",
        "Table 2 pairs this row with y = sin(pi x/L) on -L/2 <= x <= L/2, while the "
        "companion table uses y = cos(alpha x); the Table 2 map is stored"),
    "HypScarf": CatalogEntry(
        lambda x, p: (p["V0"] + p["V1"] * _sech(p["a"] * x) ** 2
                      + p["V2"] * _sech(p["a"] * x) * np.tanh(p["a"] * x)),
        ("V0", "V1", "V2", "a"), lambda p: (-_INF, _INF), "TanhSq", "Jacobi"),
    "RosenMorseI": CatalogEntry(
        lambda x, p: p["V0"] + p["V1"] * np.tan(p["a"] * x) + p["V2"] * _sec(p["a"] * x) ** 2,
        ("V0", "V1", "V2", "a"), lambda p: (-math.pi / (2 * p["a"]), math.pi / (2 * p["a"])),
        None, "Jacobi",
        "Table 2 prints the whole line; tan and sec^2 confine it to |a x| < pi/2; "
        "no map is shipped"),
    "RosenMorseII": CatalogEntry(
        lambda x, p: p["V0"] + p["V1"] * np.tanh(p["a"] * x) - p["V2"] * _sech(p["a"] * x) ** 2,
        ("V0", "V1", "V2", "a"), lambda p: (-_INF, _INF), "Tanh", "Jacobi"),
    "HypRow8": CatalogEntry(
        lambda x, p: (p["V0"] + p["V1"] * _csch(p["a"] * x) ** 2
                      - p["V2"] / np.tanh(p["a"] * x) * _csch(p["a"] * x)),
        ("V0", "V1", "V2", "a"), lambda p: (0.0, _INF), None, "Jacobi",
        "row 8 of Table 2 (printed with the Rosen-Morse II label); no map is shipped"),
    "HypEckart": CatalogEntry(
        lambda x, p: p["V0"] - p["V1"] / np.tanh(p["a"] * x) + p["V2"] * _csch(p["a"] * x) ** 2,
        ("V0", "V1", "V2", "a"), lambda p: (0.0, _INF), "ShiftedExp", "Jacobi"),
    "PoschlTellerI": CatalogEntry(
        lambda x, p: -p["V0"] + p["V1"] * _sec(p["a"] * x) ** 2 + p["V2"] * _csc(p["a"] * x) ** 2,
        ("V0", "V1", "V2", "a"), lambda p: (0.0, math.pi / (2 * p["a"])), "SinSq", "Jacobi"),
    "PoschlTellerII": CatalogEntry(
        lambda x, p: p["V0"] - p["V1"] * _sech(p["a"] * x) ** 2 + p["V2"] * _csch(p["a"] * x) ** 2,
        ("V0", "V1", "V2", "a"), lambda p: (0.0, _INF), "TanhSq", "Jacobi"),
}

# Table 2 row number -> catalog key
TABLE2_ROWS = {
    1: "Oscillator", 2: "Coulomb", 3: "Morse", 4: "TrigScarf", 5: "HypScarf", 6: "RosenMorseI",
    7: "RosenMorseII", 8: "HypRow8", 9: "HypEckart", 10: "PoschlTellerI", 11: "PoschlTellerII",
}


@dataclass(frozen=True)
class PotentialSpec:
    """A catalog potential with its parameter values."""

    name: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in CATALOG:
            raise DomainError(f"unknown potential {self.name!r}")
        entry = CATALOG[self.name]
        missing = [k for k in entry.params if k not in self.params]
        extra = [k for k in self.params if k not in entry.params]
        if missing or extra:
            raise DomainError(f"{self.name} takes parameters {list(entry.params)}")
        p = {k: float(v) for k, v in self.params.items()}
        if not all(math.isfinite(v) for v in p.values()):
            raise DomainError("potential parameters must be finite")
        if "lam" in p and not p["lam"] > 0:
            raise DomainError("lam must be positive")
        if "a" in p and not p["a"] > 0:
            raise DomainError("range parameter a must be positive")
        if self.name == "Eq100" and not p["VR"] >= 0:
            raise DomainError("Eq. 100 requires V_R >= 0")
        if self.name == "Eq101" and not 0 < p["gamma"] < 1:
            raise DomainError("Eq. 101 requires 0 < gamma < 1")
        object.__setattr__(self, "params", p)

    def __getitem__(self, key):
        return self.params[key]

    @property
    def domain(self):
        return CATALOG[self.name].domain(self.params)


def eq100_from_u(u0, u1, uR, lam=1.0):
    """Eq. 100 spec from dimensionless u_i = 2 V_i / lam^2."""
    s = lam * lam / 2
    return PotentialSpec("Eq100", {"V0": s * u0, "V1": s * u1, "VR": s * uR, "lam": lam})


def eq100_u(spec):
    """(u0, u1, uR) of an Eq. 100 spec."""
    s = 2 / spec["lam"] ** 2
    return s * spec["V0"], s * spec["V1"], s * spec["VR"]


def eq101_gamma(V0, V1):
    """gamma = (V0 + V1) / (2 V1) linking Eq. 100 at V_R = 0 to Eq. 101."""
    if V1 == 0:
        raise DomainError("gamma needs V1 != 0")
    return (V0 + V1) / (2 * V1)


def eq101_crossing(spec):
    """Zero crossing x0 = -ln(gamma)/lam of Eq. 101."""
    return -math.log(spec["gamma"]) / spec["lam"]


def eq101_extremum(spec):
    """Extremum location x1 = -ln(1 - sqrt(1-gamma))/lam of Eq. 101."""
    return -math.log(1 - math.sqrt(1 - spec["gamma"])) / spec["lam"]


def potential_eval(spec, x):
    """V(x); x must lie strictly inside the domain."""
    x = np.asarray(x, dtype=float)
    lo, hi = spec.domain
    if not np.all(np.isfinite(x)) or np.any(x <= lo) or np.any(x >= hi):
        raise DomainError(f"x outside the open domain ({lo}, {hi}) of {spec.name}")
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        v = CATALOG[spec.name].func(x, spec.params)
    if not np.all(np.isfinite(v)):
        raise DomainError(f"{spec.name} is singular at the requested points")
    return float(v) if np.ndim(v) == 0 else v


def transformed_potential(spec, cmap, y):
    """V expressed in the transformed coordinate y, V(y(x)) = V(x).

    Eq. 100 with ShiftedExp: V(y) = ((1-y)/(1+y)) [V0 + V1 y + 2 V_R/(1+y)].
    Oscillator with Quadratic: V(y) = (omega^4 / (2 lam^2)) y.
    Other pairs pull back through the inverse map.
    """
    y = np.asarray(y, dtype=float)
    lo, hi = cmap.y_range
    if not np.all(np.isfinite(y)) or np.any(y < lo) or np.any(y > hi):
        raise DomainError("y outside the map range")
    if spec.name == "Eq100" and cmap.name == "ShiftedExp" and cmap.lam == spec["lam"]:
        if np.any(y <= -1) or np.any(y >= 1):
            raise DomainError("Eq. 100 is singular at y = -1 (x = 0) and undefined at y = 1")
        v = (1 - y) / (1 + y) * (spec["V0"] + spec["V1"] * y + 2 * spec["VR"] / (1 + y))
    elif spec.name == "Oscillator" and cmap.name == "Quadratic":
        v = spec["omega"] ** 4 / (2 * cmap.lam ** 2) * y
    else:
        v = potential_eval(spec, map_inverse(cmap, y))
    return float(v) if np.ndim(v) == 0 else v


def potential_grid(spec, x_lo, x_hi, n_points):
    """Evenly spaced samples (x, V) on [x_lo, x_hi] inside the domain."""
    if int(n_points) != n_points or n_points < 2:
        raise DomainError("n_points must be an integer >= 2")
    if not x_lo < x_hi:
        raise DomainError("grid needs x_lo < x_hi")
    x = np.linspace(x_lo, x_hi, int(n_points))
    return x, potential_eval(spec, x)


def format_csv(columns, header, meta_lines=()):
    """CSV text with '.' decimals, '\\n' newlines and 15 significant digits.

    ``meta_lines`` are emitted first as '# ' comment lines.
    """
    out = [f"# {line}" for line in meta_lines]
    out.append(",".join(header))
    cols = [np.asarray(c, dtype=float) for c in columns]
    for row in zip(*cols):
        out.append(",".join(format(float(v), ".15g") for v in row))
    return "\n".join(out) + "\n"


def default_map(spec):
    """The map Table 2 pairs with this potential, with lam from the spec if present."""
    name = CATALOG[spec.name].map_name
    if name is None:
        raise DomainError(f"no coordinate map is shipped for {spec.name}")
    lam = spec.params.get("lam", spec.params.get("a", 1.0))
    return CoordinateMap(name, lam=lam)
