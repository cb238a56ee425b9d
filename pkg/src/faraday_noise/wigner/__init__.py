"""Wigner 3j/6j symbols and Clebsch-Gordan coefficients.

All arguments may be given as ``int``, ``Fraction``, half-integral ``float``,
strings such as ``"7/2"`` or :class:`HalfInt`. Internally every quantum
number is a twice-value integer.

Two interchangeable backends evaluate the Racah sums:

``"cython"``
    compiled double-precision kernel (``_kernels``), used when importable.
``"python"``
    exact integer/Fraction arithmetic, rounded once to ``float``.

Set ``FARADAY_NOISE_PURE=1`` to force the pure-Python backend at import, or
call :func:`use_backend` at runtime.
"""
import os
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from ..errors import InvalidQuantumNumber
from . import _pure

try:
    if os.environ.get("FARADAY_NOISE_PURE", "").strip() not in ("", "0"):
        raise ImportError("pure backend requested")
    from . import _kernels
except ImportError:
    _kernels = None

__all__ = [
    "HalfInt",
    "two",
    "triangle_ok",
    "wigner_3j",
    "wigner_6j",
    "clebsch_gordan",
    "threej2",
    "sixj2",
    "cg2",
    "backend",
    "available_backends",
    "use_backend",
    "clear_cache",
]

# Largest twice-value sent to the compiled kernel. Beyond these, cancellation
# in the double-precision alternating sum exceeds ~1e-14 and the exact backend
# takes over.
_COMPILED_LIMIT_3J = 24
_COMPILED_LIMIT_6J = 40


@dataclass(frozen=True, order=True)
class HalfInt:
    """Half-integer quantum number stored as ``twice_value``."""

    twice_value: int

    def __post_init__(self):
        if not isinstance(self.twice_value, int) or isinstance(self.twice_value, bool):
            raise InvalidQuantumNumber(f"twice_value must be int, got {self.twice_value!r}")

    @classmethod
    def of(cls, value):
        return cls(two(value))

    @property
    def is_integer(self):
        return self.twice_value % 2 == 0

    def __float__(self):
        return self.twice_value / 2

    def as_fraction(self):
        return Fraction(self.twice_value, 2)

    def __str__(self):
        if self.twice_value % 2 == 0:
            return str(self.twice_value // 2)
        return f"{self.twice_value}/2"

    def __repr__(self):
        return f"HalfInt({self})"


def two(value):
    """Return ``2 * value`` as an exact int, rejecting non-half-integers."""
    if isinstance(value, HalfInt):
        return value.twice_value
    if isinstance(value, bool):
        raise InvalidQuantumNumber(f"not a quantum number: {value!r}")
    if isinstance(value, int):
        return 2 * value
    if isinstance(value, str):
        try:
            value = Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise InvalidQuantumNumber(f"cannot parse quantum number {value!r}") from None
    if isinstance(value, Fraction):
        doubled = 2 * value
        if doubled.denominator != 1:
            raise InvalidQuantumNumber(f"{value} is not a multiple of 1/2")
        return int(doubled)
    try:
        doubled = 2 * float(value)
    except (TypeError, ValueError):
        raise InvalidQuantumNumber(f"not a quantum number: {value!r}") from None
    if not doubled.is_integer():
        raise InvalidQuantumNumber(f"{value!r} is not a multiple of 1/2")
    return int(doubled)


def _magnitude(value):
    tv = two(value)
    if tv < 0:
        raise InvalidQuantumNumber(f"angular momentum must be non-negative, got {tv / 2}")
    return tv


def triangle_ok(j1, j2, j3):
    """True iff ``|j1-j2| <= j3 <= j1+j2`` and ``j1+j2+j3`` is integral."""
    a, b, c = _magnitude(j1), _magnitude(j2), _magnitude(j3)
    return abs(a - b) <= c <= a + b and (a + b + c) % 2 == 0


# -- backend plumbing --------------------------------------------------------

_lock = threading.Lock()
_impl = _kernels if _kernels is not None else _pure


def available_backends():
    return ("cython", "python") if _kernels is not None else ("python",)


def backend():
    """Name of the active backend."""
    return "cython" if _impl is _kernels and _kernels is not None else "python"


def use_backend(name):
    """Switch the active backend and drop memoized values."""
    global _impl
    if name == "cython":
        if _kernels is None:
            raise ImportError("compiled kernel is not built")
        new = _kernels
    elif name == "python":
        new = _pure
    else:
        raise ValueError(f"unknown backend {name!r}")
    with _lock:
        _impl = new
        clear_cache()


def _pick(args, limit):
    if _impl is _pure or max(args) > limit:
        return _pure
    return _impl


@lru_cache(maxsize=None)
def threej2(tj1, tj2, tj3, tm1, tm2, tm3):
    """3j symbol on twice-value arguments (no validation)."""
    args = (tj1, tj2, tj3, tm1, tm2, tm3)
    return _pick(args, _COMPILED_LIMIT_3J).threej(*args)


def _sixj_key(ta, tb, tc, td, te, tf):
    # 24-element symmetry group: column permutations and upper/lower swaps
    # within pairs of columns
    cols = ((ta, td), (tb, te), (tc, tf))
    best = None
    for i, j, k in ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)):
        c = (cols[i], cols[j], cols[k])
        for flip in ((0, 0, 0), (1, 1, 0), (1, 0, 1), (0, 1, 1)):
            key = tuple(c[n][flip[n]] for n in range(3)) + tuple(c[n][1 - flip[n]] for n in range(3))
            if best is None or key < best:
                best = key
    return best


@lru_cache(maxsize=None)
def _sixj_canonical(ta, tb, tc, td, te, tf):
    args = (ta, tb, tc, td, te, tf)
    return _pick(args, _COMPILED_LIMIT_6J).sixj(*args)


def sixj2(ta, tb, tc, td, te, tf):
    """6j symbol on twice-value arguments, memoized on its canonical form."""
    return _sixj_canonical(*_sixj_key(ta, tb, tc, td, te, tf))


@lru_cache(maxsize=None)
def cg2(tj1, tm1, tj2, tm2, tJ, tM):
    """Clebsch-Gordan coefficient on twice-value arguments."""
    if tm1 + tm2 != tM:
        return 0.0
    args = (tj1, tm1, tj2, tm2, tJ, tM)
    return _pick((tj1, tj2, tJ), _COMPILED_LIMIT_3J).cg(*args)


def clear_cache():
    threej2.cache_clear()
    _sixj_canonical.cache_clear()
    cg2.cache_clear()


# -- public API --------------------------------------------------------------

def wigner_3j(j1, j2, j3, m1, m2, m3):
    """Wigner 3j symbol.

    Returns 0 when ``m1 + m2 + m3 != 0``, when the triangle rule fails or when
    some ``|m| > j``.

    Examples
    --------
    >>> round(wigner_3j(1, 1, 0, 1, -1, 0) ** 2, 12)
    0.333333333333
    """
    tj = [_magnitude(j) for j in (j1, j2, j3)]
    tm = [two(m) for m in (m1, m2, m3)]
    return threej2(*tj, *tm)


def wigner_6j(j1, j2, j3, j4, j5, j6):
    """Wigner 6j symbol ``{j1 j2 j3; j4 j5 j6}``; 0 unless all four triads close."""
    return sixj2(*(_magnitude(j) for j in (j1, j2, j3, j4, j5, j6)))


def clebsch_gordan(j1, m1, j2, m2, J, M):
    """Clebsch-Gordan coefficient ``<j1 m1; j2 m2 | J M>`` (Condon-Shortley phase)."""
    tj1, tj2, tJ = _magnitude(j1), _magnitude(j2), _magnitude(J)
    return cg2(tj1, two(m1), tj2, two(m2), tJ, two(M))
