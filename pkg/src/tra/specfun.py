"""Special-function primitives: complex log-gamma, Pochhammer symbols and
terminating hypergeometric series.

Complex values are Python ``complex``.  Everything is double precision.
"""

import cmath
from fractions import Fraction
import math
from numbers import Real

from .errors import DomainError, PoleError, SeriesError

# Lanczos approximation, g = 7, nine terms.
_LANCZOS_G = 7.0
_LANCZOS_P = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _check_finite(z):
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"non-finite argument {z!r}")


def _is_pole(z):
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def _log_gamma_lanczos(z):
    # valid for Re z >= 0.5
    z = z - 1.0
    x = _LANCZOS_P[0]
    for i in range(1, len(_LANCZOS_P)):
        x += _LANCZOS_P[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(x)


def log_gamma(z):
    """Log-gamma on the branch that is continuous off the negative real axis.

    For Re z < 0.5 the argument is shifted upward with
    log Gamma(z) = log Gamma(z+m) - sum_k log(z+k), which keeps the
    imaginary part continuous instead of folding it into (-pi, pi].
    """
    z = complex(z)
    _check_finite(z)
    if _is_pole(z):
        raise PoleError(f"gamma pole at z = {z.real:g}")
    if z.real >= 0.5:
        return _log_gamma_lanczos(z)
    m = int(math.ceil(0.5 - z.real))
    acc = 0.0j
    for k in range(m):
        acc += cmath.log(z + k)
    return _log_gamma_lanczos(z + m) - acc


def arg_gamma(z):
    """Continuous argument of Gamma(z), i.e. Im log Gamma(z)."""
    return log_gamma(z).imag


def gamma_real(x):
    """Gamma(x) for real x off the poles."""
    x = float(x)
    if x <= 0.0 and x == math.floor(x):
        raise PoleError(f"gamma pole at x = {x:g}")
    return math.gamma(x)


def pochhammer(a, n):
    """Rising factorial (a)_n = a (a+1) ... (a+n-1); (a)_0 = 1."""
    if n < 0 or int(n) != n:
        raise DomainError(f"pochhammer needs a nonnegative integer n, got {n!r}")
    out = 1.0 if isinstance(a, Real) else 1.0 + 0.0j
    for k in range(int(n)):
        out *= a + k
    if isinstance(out, complex):
        if not (math.isfinite(out.real) and math.isfinite(out.imag)):
            raise OverflowError(f"pochhammer({a!r}, {n}) overflows")
    elif not math.isfinite(out):
        raise OverflowError(f"pochhammer({a!r}, {n}) overflows")
    return out


class _QC:
    """Exact complex rational (Fraction real and imaginary parts)."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    def __add__(self, o):
        return _QC(self.re + o.re, self.im + o.im)

    def __mul__(self, o):
        return _QC(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def __truediv__(self, o):
        den = o.re * o.re + o.im * o.im
        return _QC((self.re * o.re + self.im * o.im) / den, (self.im * o.re - self.re * o.im) / den)

    def is_zero(self):
        return self.re == 0 and self.im == 0


def _as_qc(p):
    p = complex(p)
    if not (math.isfinite(p.real) and math.isfinite(p.imag)):
        raise DomainError(f"non-finite parameter {p!r}")
    return _QC(p.real, p.imag)


def hyp_terminating(num_params, den_params, z, n):
    """Terminating generalized hypergeometric series pFq(-n, a2, ...; b1, ...; z).

    The first numerator parameter must equal -n, so the sum stops after
    n+1 terms.  Every float converts exactly to a rational, so the series
    is summed in exact rational arithmetic and rounded once at the end:
    the alternating cancellation typical of these sums costs no digits.
    All-real input gives a result with imaginary part exactly 0.
    """
    if n < 0 or int(n) != n:
        raise DomainError(f"n must be a nonnegative integer, got {n!r}")
    n = int(n)
    num = list(num_params)
    den = list(den_params)
    if not num or num[0] != -n:
        raise DomainError("first numerator parameter must be -n")
    num = [_as_qc(a) for a in num]
    den = [_as_qc(b) for b in den]
    zq = _as_qc(z)
    term = _QC(1)
    total = _QC(1)
    for k in range(n):
        ratio = _QC(zq.re / (k + 1), zq.im / (k + 1))
        for a in num:
            ratio = ratio * _QC(a.re + k, a.im)
        for b in den:
            bk = _QC(b.re + k, b.im)
            if bk.is_zero():
                raise SeriesError(f"denominator parameter {complex(b.re, b.im)!r} hits zero at term {k + 1}")
            ratio = ratio / bk
        term = term * ratio
        total = total + term
    return complex(float(total.re), float(total.im))
